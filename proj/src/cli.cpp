#include "nullwit/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <optional>
#include <sstream>

#include "nullwit/errors.hpp"
#include "nullwit/frames.hpp"
#include "nullwit/io.hpp"
#include "nullwit/optimizer.hpp"
#include "nullwit/stats.hpp"
#include "nullwit/witness.hpp"

namespace nullwit {

namespace {

enum class Format { Json, Csv };

struct Session {
  std::ostream& out;
  std::optional<std::filesystem::path> out_dir;
  std::optional<Format> format;
  std::optional<std::uint64_t> seed;
  RunManifest manifest;

  Format format_or(Format fallback) const { return format.value_or(fallback); }

  std::uint64_t require_seed() const {
    if (!seed) throw ValidationError(manifest.command + ": --seed is required for stochastic commands");
    return *seed;
  }

  // Writes one output file into --out, or to stdout when no directory is set.
  void emit(const std::string& name, const std::string& contents) {
    if (!out_dir) {
      out << contents;
      return;
    }
    write_file(*out_dir / name, contents);
    manifest.outputs.push_back({name, sha256_hex(contents)});
  }

  void finish() {
    if (!out_dir) return;
    manifest.seed = seed;
    manifest.artifact_version = std::string(kArtifactVersion);
    write_file(*out_dir / "manifest.json", dump(to_json(manifest)));
  }
};

void flatten(const Json& j, const std::string& prefix, std::string& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "." + std::to_string(i), out);
  } else {
    out += prefix;
    out += ',';
    if (j.is_number_float())
      out += format_double(j.get<double>());
    else if (j.is_string())
      out += j.get<std::string>();
    else if (j.is_null())
      out += "";
    else
      out += j.dump();
    out += '\n';
  }
}

// JSON document, or key,value rows for --format csv.
void emit_document(Session& s, const std::string& stem, const Json& doc) {
  if (s.format_or(Format::Json) == Format::Json) {
    s.emit(stem + ".json", dump(doc));
  } else {
    std::string csv;
    flatten(doc, "", csv);
    s.emit(stem + ".csv", csv);
  }
}

Frame named_frame(const std::string& name, int d, int p, const std::string& variant) {
  if (name == "simplex") return simplex_frame(d);
  if (name == "tetrahedron") return tetrahedron_frame();
  if (name == "icosahedron") return icosahedron_frame();
  if (name == "qr" || name == "quadratic_residue") return quadratic_residue_frame(p, qr_variant_from_string(variant));
  throw UnknownCaseError("unknown frame '" + name + "' (simplex, tetrahedron, icosahedron, qr)");
}

RMatrix frame_statistics(const Frame& f) {
  return probability_matrix(frame_ensemble(f), frame_povm(f)).matrix();
}

RMatrix source_statistics(const std::string& name, int d) {
  if (name == "simplex" || name == "tetrahedron" || name == "icosahedron")
    return frame_statistics(named_frame(name, d, 0, "upper"));
  const OptimumCase c = appendix_optimum(case_id_from_string(name));
  return probability_matrix(c.ensemble, c.povm).matrix();
}

RMatrix load_probability_csv(const std::string& path, double column_tolerance) {
  RMatrix p = parse_csv_matrix(read_file(path));
  if (p.rows() != p.cols()) {
    std::ostringstream os;
    os << path << ": matrix is " << p.rows() << "x" << p.cols() << ", expected square";
    throw ValidationError(os.str());
  }
  return ProbabilityMatrix(std::move(p), column_tolerance).matrix();
}

ExperimentCounts load_counts(const std::string& path, std::optional<std::int64_t> trials) {
  const std::filesystem::path fp(path);
  if (fp.extension() == ".json") {
    ExperimentCounts c = counts_from_json(parse_json(read_file(fp)));
    if (trials && *trials != c.trials()) throw ValidationError("--trials disagrees with the counts file");
    return c;
  }
  CountMatrix counts = parse_csv_counts(read_file(fp));
  if (!trials) {
    const auto sidecar = counts_sidecar_path(fp);
    if (!std::filesystem::exists(sidecar))
      throw IoError("no --trials given and no sidecar '" + sidecar.string() + "'");
    const Json meta = parse_json(read_file(sidecar));
    if (!meta.contains("trials")) throw IoError(sidecar.string() + ": missing 'trials'");
    trials = meta.at("trials").get<std::int64_t>();
  }
  return ExperimentCounts(std::move(counts), *trials);
}

int run_witness(Session& s, const std::string& input, double eps) {
  const RMatrix p = load_probability_csv(input, 1e-6);
  s.manifest.config = Json{{"input", input}, {"eps", eps}};
  emit_document(s, "witness", to_json(make_witness_report(p, eps)));
  return exit_code::kOk;
}

int run_frames_make(Session& s, const std::string& name, int d, int p, const std::string& variant, bool dual) {
  Frame f = named_frame(name, d, p, variant);
  if (dual) f = dual_frame(f);
  s.manifest.config = Json{{"name", name}, {"d", d}, {"p", p}, {"variant", variant}, {"dual", dual}};
  if (s.format_or(Format::Json) != Format::Json) throw ValidationError("frames make writes JSON only");
  s.emit("frame.json", dump(to_json(f)));
  return exit_code::kOk;
}

int run_frames_verify(Session& s, const std::string& input, double tolerance) {
  const Frame f = frame_from_json(parse_json(read_file(input)));
  const FrameReport r = verify_etf(f, tolerance);
  Json doc{{"dim", f.dim()}, {"k", f.k()}, {"field", to_string(f.field())}, {"report", to_json(r)}};
  doc["theorem_bound"] = theorem_bound(f.dim(), std::max(1, f.k()));
  if (r.is_tight)
    doc["witness"] = witness_full(frame_statistics(f));
  else
    doc["witness"] = nullptr;
  s.manifest.config = Json{{"input", input}, {"tolerance", tolerance}};
  emit_document(s, "frame_report", doc);
  return r.passed() ? exit_code::kOk : exit_code::kValidation;
}

int run_optimize(Session& s, OptimConfig cfg, std::optional<int> restarts) {
  cfg.seed = s.require_seed();
  cfg.restarts = restarts.value_or(OptimConfig::default_restarts(cfg.k));
  cfg.validate();
  s.manifest.config = Json{{"d", cfg.d},
                           {"k", cfg.k},
                           {"field", to_string(cfg.field)},
                           {"restarts", cfg.restarts},
                           {"max_iterations", cfg.max_iterations},
                           {"step_tolerance", cfg.step_tolerance},
                           {"value_tolerance", cfg.value_tolerance},
                           {"povm_rank", cfg.povm_rank},
                           {"seed", cfg.seed}};
  emit_document(s, "optimize", to_json(maximize_witness(cfg)));
  return exit_code::kOk;
}

int run_table1(Session& s, const std::string& budget_text, int threads) {
  const std::uint64_t seed = s.require_seed();
  std::optional<int> budget;
  if (budget_text != "default") {
    try {
      std::size_t used = 0;
      budget = std::stoi(budget_text, &used);
      if (used != budget_text.size() || *budget < 1) throw std::invalid_argument("budget");
    } catch (const std::logic_error&) {
      throw ValidationError("--budget must be 'default' or a positive integer");
    }
  }
  s.manifest.config = Json{{"budget", budget_text}};
  const auto cells = table_reproduction(seed, budget, threads);
  if (s.format_or(Format::Csv) == Format::Csv) {
    std::string csv = "d,k,field,value,published_value,expected,tolerance,theorem_bound,published_bold,restarts,matched\n";
    for (const auto& c : cells) {
      csv += std::to_string(c.d) + "," + std::to_string(c.k) + "," + to_string(c.field) + "," + format_double(c.value) +
             "," + (c.published_value ? format_double(*c.published_value) : std::string()) + "," + format_double(c.expected) +
             "," + format_double(table_tolerance(c.expected)) + "," + format_double(c.bound) + "," +
             (c.bold ? "1" : "0") + "," + std::to_string(c.restarts) + "," + (c.matched ? "1" : "0") + "\n";
    }
    s.emit("table1.csv", csv);
  } else {
    Json rows = Json::array();
    for (const auto& c : cells) {
      rows.push_back(Json{{"d", c.d},
                          {"k", c.k},
                          {"field", to_string(c.field)},
                          {"value", c.value},
                          {"published_value", c.published_value ? Json(*c.published_value) : Json(nullptr)},
                          {"expected", c.expected},
                          {"tolerance", table_tolerance(c.expected)},
                          {"theorem_bound", c.bound},
                          {"published_bold", c.bold},
                          {"restarts", c.restarts},
                          {"matched", c.matched}});
    }
    s.emit("table1.json", dump(rows));
  }
  return exit_code::kOk;
}

int run_simulate(Session& s, const std::string& from, const std::string& matrix, int d, std::int64_t trials) {
  const std::uint64_t seed = s.require_seed();
  if (from.empty() == matrix.empty()) throw ValidationError("simulate: give exactly one of --from and --matrix");
  const RMatrix p = matrix.empty() ? source_statistics(from, d) : load_probability_csv(matrix, 1e-10);
  RngStream rng(seed, 0);
  const ExperimentCounts c = sample_counts(ProbabilityMatrix(p), trials, rng);
  s.manifest.config = Json{{"from", from.empty() ? Json(nullptr) : Json(from)},
                           {"matrix", matrix.empty() ? Json(nullptr) : Json(matrix)},
                           {"d", d},
                           {"trials", trials}};
  if (s.format_or(Format::Csv) == Format::Csv) {
    s.emit("counts.csv", to_csv(c.counts()));
    if (s.out_dir) s.emit("counts.json", dump(Json{{"trials", trials}}));
  } else {
    s.emit("counts.json", dump(to_json(c)));
  }
  return exit_code::kOk;
}

int run_test(Session& s, const std::string& input, std::optional<std::int64_t> trials, double multiplier,
             const std::string& model, std::optional<int> d) {
  const ExperimentCounts c = load_counts(input, trials);
  std::optional<NullHypothesis> h;
  if (!model.empty() || d) {
    if (model.empty() || !d) throw ValidationError("test: --model and --d must be given together");
    h = NullHypothesis{model_from_string(model), *d};
  }
  s.manifest.config = Json{{"input", input}, {"trials", c.trials()}, {"multiplier", multiplier}};
  if (h) s.manifest.config["hypothesis"] = Json{{"model", to_string(h->model)}, {"d", h->d}};
  emit_document(s, "test", to_json(null_hypothesis_test(c, multiplier, h)));
  return exit_code::kOk;
}

int run_bounds(Session& s, int d, int k) {
  if (d < 1 || k < 1) throw ValidationError("bounds: need d >= 1 and k >= 1");
  const int n = k + 1;
  Json thresholds = Json::object();
  Json nonzero = Json::object();
  for (Model m : {Model::Classical, Model::QuantumReal, Model::QuantumComplex}) {
    thresholds[to_string(m)] = zero_threshold(m, d);
    nonzero[to_string(m)] = k < zero_threshold(m, d);
  }
  Json doc{{"d", d},
           {"k", k},
           {"theorem_bound", theorem_bound(d, k)},
           {"product_bound", product_bound(d, n)},
           {"classical_product_bound", n >= d ? Json(classical_product_bound(d, n)) : Json(nullptr)},
           {"zero_threshold", std::move(thresholds)},
           {"witness_can_be_nonzero", std::move(nonzero)}};
  s.manifest.config = Json{{"d", d}, {"k", k}};
  emit_document(s, "bounds", doc);
  return exit_code::kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Determinant null dimension witness toolkit", "nullwit"};
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::string format;
  app.add_option("--seed", seed, "Random seed (required by optimize, table1, simulate)");
  app.add_option("--out", out_dir, "Write outputs and manifest.json into this directory");
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "csv"}));

  std::string input;
  double eps = kDefaultNullTolerance;
  auto* witness = app.add_subcommand("witness", "Witness report for a probability-matrix CSV");
  witness->add_option("input", input, "CSV, one row per outcome")->required();
  witness->add_option("--eps", eps, "Null tolerance for certification");

  auto* frames = app.add_subcommand("frames", "Construct or verify equiangular tight frames");
  frames->require_subcommand(1);
  std::string frame_name, variant = "upper";
  int frame_d = 2, frame_p = 7;
  bool dual = false;
  auto* make = frames->add_subcommand("make", "Write a named frame as JSON");
  make->add_option("name", frame_name, "simplex | tetrahedron | icosahedron | qr")->required();
  make->add_option("--d", frame_d, "Dimension of the simplex frame");
  make->add_option("--p", frame_p, "Prime of the quadratic-residue frame");
  make->add_option("--variant", variant, "upper | lower | extended");
  make->add_flag("--dual", dual, "Emit the dual frame instead");
  double frame_tol = 1e-10;
  auto* verify = frames->add_subcommand("verify", "Check tightness and equiangularity of a frame JSON");
  verify->add_option("input", input, "Frame JSON")->required();
  verify->add_option("--tol", frame_tol, "Verification tolerance");

  OptimConfig cfg;
  std::string field = "real";
  std::optional<int> restarts;
  auto* optimize = app.add_subcommand("optimize", "Multi-start maximization of the witness");
  optimize->add_option("--d", cfg.d, "Dimension")->required();
  optimize->add_option("--k", cfg.k, "Witness order (k+1 preparations and outcomes)")->required();
  optimize->add_option("--field", field)->check(CLI::IsMember({"real", "complex"}));
  optimize->add_option("--restarts", restarts, "Number of restarts (default 64, 256 for k >= 5)");
  optimize->add_option("--rank", cfg.povm_rank, "Rank of the POVM elements");
  optimize->add_option("--max-iterations", cfg.max_iterations);
  optimize->add_option("--threads", cfg.threads, "Worker threads; results do not depend on it");

  std::string budget = "default";
  int table_threads = 1;
  auto* table1 = app.add_subcommand("table1", "Reproduce the table of maximal witness values");
  table1->add_option("--budget", budget, "Restarts per cell, or 'default'");
  table1->add_option("--threads", table_threads, "Worker threads; results do not depend on it");

  std::string from, matrix;
  int sim_d = 2;
  std::int64_t trials = 100000;
  auto* simulate = app.add_subcommand("simulate", "Sample multinomial counts from a model");
  simulate->add_option("--from", from, "simplex | tetrahedron | icosahedron | d3k4_real | d3k4_complex | d4k5_real | d4k5_complex");
  simulate->add_option("--matrix", matrix, "Probability-matrix CSV to sample from");
  simulate->add_option("--d", sim_d, "Dimension of the simplex source");
  simulate->add_option("--trials", trials, "Trials per preparation")->check(CLI::PositiveNumber);

  std::optional<std::int64_t> test_trials;
  double multiplier = kDefaultSignificanceMultiplier;
  std::string model;
  std::optional<int> hyp_d;
  auto* test = app.add_subcommand("test", "Null-hypothesis test on a counts file");
  test->add_option("input", input, "Counts CSV (trials from --trials or the .json sidecar) or counts JSON")->required();
  test->add_option("--trials", test_trials, "Trials per preparation");
  test->add_option("--multiplier", multiplier, "Significance multiplier on the standard error");
  test->add_option("--model", model, "Declared model: classical | quantum_real | quantum_complex");
  test->add_option("--d", hyp_d, "Declared dimension");

  int bound_d = 2, bound_k = 2;
  auto* bounds = app.add_subcommand("bounds", "Analytic bounds and zero thresholds");
  bounds->add_option("--d", bound_d)->required();
  bounds->add_option("--k", bound_k)->required();

  std::vector<std::string> argv_store{"nullwit"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_code::kOk : exit_code::kValidation;
  }

  Session s{out, std::nullopt, std::nullopt, seed, {}};
  if (!out_dir.empty()) s.out_dir = out_dir;
  if (format == "json") s.format = Format::Json;
  if (format == "csv") s.format = Format::Csv;

  try {
    if (s.out_dir) {
      std::error_code ec;
      std::filesystem::create_directories(*s.out_dir, ec);
      if (ec) throw IoError("cannot create output directory '" + out_dir + "': " + ec.message());
    }
    int code = exit_code::kOk;
    if (*witness) {
      s.manifest.command = "witness";
      code = run_witness(s, input, eps);
    } else if (*make) {
      s.manifest.command = "frames make";
      code = run_frames_make(s, frame_name, frame_d, frame_p, variant, dual);
    } else if (*verify) {
      s.manifest.command = "frames verify";
      code = run_frames_verify(s, input, frame_tol);
    } else if (*optimize) {
      s.manifest.command = "optimize";
      cfg.field = field_from_string(field);
      code = run_optimize(s, cfg, restarts);
    } else if (*table1) {
      s.manifest.command = "table1";
      code = run_table1(s, budget, table_threads);
    } else if (*simulate) {
      s.manifest.command = "simulate";
      code = run_simulate(s, from, matrix, sim_d, trials);
    } else if (*test) {
      s.manifest.command = "test";
      code = run_test(s, input, test_trials, multiplier, model, hyp_d);
    } else if (*bounds) {
      s.manifest.command = "bounds";
      code = run_bounds(s, bound_d, bound_k);
    }
    s.finish();
    return code;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::kValidation;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::kIo;
  } catch (const UnknownCaseError& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::kUnknownCase;
  } catch (const Json::exception& e) {
    err << "error: malformed JSON input: " << e.what() << "\n";
    return exit_code::kIo;
  }
}

}  // namespace nullwit
