#include "nullwit/io.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "nullwit/errors.hpp"

namespace nullwit {

namespace {

const Json& require(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw IoError(std::string("JSON: missing key '") + key + "'");
  return j.at(key);
}

Field field_of(const Json& j) { return field_from_string(require(j, "field").get<std::string>()); }

Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Complex complex_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw IoError("JSON: complex entries must be [re, im] number pairs");
  return {j[0].get<double>(), j[1].get<double>()};
}

template <class F>
auto wrap_json(F&& f) {
  try {
    return f();
  } catch (const Json::exception& e) {
    throw IoError(std::string("JSON: ") + e.what());
  }
}

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::string cur;
  for (char ch : text) {
    if (ch == '\n') {
      lines.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) lines.push_back(cur);
  while (!lines.empty() && lines.back().find_first_not_of(" \t") == std::string::npos) lines.pop_back();
  return lines;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

template <class T>
std::vector<std::vector<T>> parse_csv_cells(std::string_view text) {
  std::vector<std::vector<T>> rows;
  const auto lines = split_lines(text);
  for (std::size_t li = 0; li < lines.size(); ++li) {
    std::vector<T> row;
    std::stringstream ss(lines[li]);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      const std::string t = trim(cell);
      T value{};
      const char* first = t.data();
      const char* last = t.data() + t.size();
      const auto res = std::from_chars(first, last, value);
      if (t.empty() || res.ec != std::errc() || res.ptr != last)
        throw IoError("CSV: cannot parse '" + t + "' on line " + std::to_string(li + 1));
      row.push_back(value);
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw IoError("CSV: ragged row on line " + std::to_string(li + 1));
    rows.push_back(std::move(row));
  }
  if (rows.empty() || rows.front().empty()) throw IoError("CSV: no data");
  return rows;
}

}  // namespace

Json complex_matrix_to_json(const CMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

CMatrix complex_matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) throw IoError("JSON: matrix must be an array of rows");
  const auto n = static_cast<Eigen::Index>(j.size());
  const auto m = static_cast<Eigen::Index>(j[0].size());
  CMatrix out(n, m);
  for (Eigen::Index r = 0; r < n; ++r) {
    const Json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != m) throw IoError("JSON: ragged matrix");
    for (Eigen::Index c = 0; c < m; ++c) out(r, c) = complex_from_json(row[static_cast<std::size_t>(c)]);
  }
  return out;
}

Json real_matrix_to_json(const RMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

RMatrix real_matrix_from_json(const Json& j) {
  return wrap_json([&] {
    if (!j.is_array() || j.empty() || !j[0].is_array()) throw IoError("JSON: matrix must be an array of rows");
    const auto n = static_cast<Eigen::Index>(j.size());
    const auto m = static_cast<Eigen::Index>(j[0].size());
    RMatrix out(n, m);
    for (Eigen::Index r = 0; r < n; ++r) {
      const Json& row = j[static_cast<std::size_t>(r)];
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != m) throw IoError("JSON: ragged matrix");
      for (Eigen::Index c = 0; c < m; ++c) out(r, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
    return out;
  });
}

Json to_json(const StateVector& v) {
  Json comps = Json::array();
  for (Eigen::Index i = 0; i < v.components().size(); ++i) comps.push_back(complex_to_json(v.components()(i)));
  return Json{{"field", to_string(v.field())}, {"dim", v.dim()}, {"components", std::move(comps)}};
}

StateVector state_from_json(const Json& j) {
  return wrap_json([&] {
    const Json& comps = require(j, "components");
    if (!comps.is_array() || comps.empty()) throw IoError("JSON: state components must be a non-empty array");
    CVector v(static_cast<Eigen::Index>(comps.size()));
    for (std::size_t i = 0; i < comps.size(); ++i) v(static_cast<Eigen::Index>(i)) = complex_from_json(comps[i]);
    if (j.contains("dim") && j.at("dim").get<int>() != v.size()) throw IoError("JSON: state dim mismatch");
    return StateVector(std::move(v), field_of(j));
  });
}

Json to_json(const DensityOperator& rho) {
  return Json{{"field", to_string(rho.field())}, {"dim", rho.dim()}, {"matrix", complex_matrix_to_json(rho.matrix())}};
}

DensityOperator density_from_json(const Json& j) {
  return wrap_json([&] { return DensityOperator(complex_matrix_from_json(require(j, "matrix")), field_of(j)); });
}

Json to_json(const MeasurementOperator& m) {
  return Json{{"field", to_string(m.field())}, {"dim", m.dim()}, {"matrix", complex_matrix_to_json(m.matrix())}};
}

MeasurementOperator measurement_from_json(const Json& j) {
  return wrap_json([&] { return MeasurementOperator(complex_matrix_from_json(require(j, "matrix")), field_of(j)); });
}

Json to_json(const Povm& povm) {
  Json elems = Json::array();
  for (const auto& m : povm.elements()) elems.push_back(complex_matrix_to_json(m.matrix()));
  return Json{{"field", to_string(povm.field())}, {"dim", povm.dim()}, {"elements", std::move(elems)}};
}

Povm povm_from_json(const Json& j) {
  return wrap_json([&] {
    const Field f = field_of(j);
    std::vector<MeasurementOperator> elems;
    for (const Json& e : require(j, "elements")) elems.emplace_back(complex_matrix_from_json(e), f);
    if (elems.empty()) throw IoError("JSON: POVM without elements");
    return Povm(std::move(elems));
  });
}

Json to_json(const PreparationEnsemble& e) {
  Json states = Json::array();
  for (const auto& rho : e.states()) states.push_back(complex_matrix_to_json(rho.matrix()));
  return Json{{"field", to_string(e.field())}, {"dim", e.dim()}, {"states", std::move(states)}};
}

PreparationEnsemble ensemble_from_json(const Json& j) {
  return wrap_json([&] {
    const Field f = field_of(j);
    std::vector<DensityOperator> states;
    for (const Json& s : require(j, "states")) states.emplace_back(complex_matrix_from_json(s), f);
    if (states.empty()) throw IoError("JSON: ensemble without states");
    return PreparationEnsemble(std::move(states));
  });
}

Json to_json(const Frame& f) {
  Json vecs = Json::array();
  for (const auto& v : f.vectors()) {
    Json comps = Json::array();
    for (Eigen::Index i = 0; i < v.components().size(); ++i) comps.push_back(complex_to_json(v.components()(i)));
    vecs.push_back(std::move(comps));
  }
  return Json{{"field", to_string(f.field())}, {"dim", f.dim()}, {"vectors", std::move(vecs)}};
}

Frame frame_from_json(const Json& j) {
  return wrap_json([&] {
    const Field f = field_of(j);
    const int dim = require(j, "dim").get<int>();
    std::vector<StateVector> vecs;
    for (const Json& comps : require(j, "vectors")) {
      if (!comps.is_array() || static_cast<int>(comps.size()) != dim)
        throw IoError("JSON: frame vector length differs from dim");
      CVector v(dim);
      for (int i = 0; i < dim; ++i) v(i) = complex_from_json(comps[static_cast<std::size_t>(i)]);
      vecs.emplace_back(std::move(v), f);
    }
    if (vecs.empty()) throw IoError("JSON: frame without vectors");
    return Frame(f, std::move(vecs));
  });
}

Json to_json(const FrameReport& r) {
  return Json{{"is_tight", r.is_tight},
              {"max_frame_deviation", r.max_frame_deviation},
              {"is_equiangular", r.is_equiangular},
              {"overlap_target", r.overlap_target},
              {"max_overlap_deviation", r.max_overlap_deviation},
              {"passed", r.passed()}};
}

Json to_json(const PovmReport& r) {
  return Json{{"completeness_deviation", r.completeness_deviation},
              {"min_eigenvalue", r.min_eigenvalue},
              {"passed", r.passed}};
}

Json to_json(const CertifiedDims& c) {
  return Json{{to_string(Model::Classical), c.classical},
              {to_string(Model::QuantumReal), c.quantum_real},
              {to_string(Model::QuantumComplex), c.quantum_complex}};
}

Json to_json(const WitnessReport& r) {
  Json bounds = Json::object();
  for (const auto& [d, b] : r.theorem_bound) bounds[std::to_string(d)] = b;
  return Json{{"k", r.k},
              {"value_full", r.value_full},
              {"value_reduced", r.value_reduced},
              {"theorem_bound", std::move(bounds)},
              {"certified_min_dim", to_json(r.certified_min_dim)},
              {"tolerance_used", r.tolerance_used}};
}

Json to_json(const ParamVector& p) { return Json{{"state", p.state}, {"povm", p.povm}}; }

Json to_json(const OptimResult& r) {
  return Json{{"best_value", r.best_value},
              {"best_params", to_json(r.best_params)},
              {"ensemble", to_json(r.ensemble)},
              {"povm", to_json(r.povm)},
              {"per_restart_values", r.per_restart_values},
              {"history", r.history},
              {"iterations_used", r.iterations_used},
              {"converged", r.converged},
              {"short_circuit", r.short_circuit}};
}

Json to_json(const ErrorReport& r) {
  Json j{{"k", r.k},
         {"trials", r.trials},
         {"empirical_witness", r.empirical_witness},
         {"variance_per_trial", r.variance_per_trial},
         {"standard_error", r.standard_error},
         {"z_score", r.z_score},
         {"multiplier", r.multiplier},
         {"null_consistent", r.null_consistent}};
  if (r.hypothesis)
    j["hypothesis"] = Json{{"model", to_string(r.hypothesis->model)}, {"d", r.hypothesis->d}};
  else
    j["hypothesis"] = nullptr;
  return j;
}

Json to_json(const ExperimentCounts& c) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < c.counts().rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < c.counts().cols(); ++j) row.push_back(c.counts()(i, j));
    rows.push_back(std::move(row));
  }
  return Json{{"trials", c.trials()}, {"counts", std::move(rows)}};
}

ExperimentCounts counts_from_json(const Json& j) {
  return wrap_json([&] {
    const Json& rows = require(j, "counts");
    if (!rows.is_array() || rows.empty() || !rows[0].is_array()) throw IoError("JSON: counts must be rows");
    CountMatrix c(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != rows[0].size()) throw IoError("JSON: ragged counts");
      for (std::size_t k = 0; k < rows[r].size(); ++k)
        c(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = rows[r][k].get<std::int64_t>();
    }
    return ExperimentCounts(std::move(c), require(j, "trials").get<std::int64_t>());
  });
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw IoError(std::string("JSON: ") + e.what());
  }
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string to_csv(const RMatrix& m) {
  std::string out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out += ',';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
  return out;
}

std::string to_csv(const CountMatrix& m) {
  std::string out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out += ',';
      out += std::to_string(m(i, j));
    }
    out += '\n';
  }
  return out;
}

RMatrix parse_csv_matrix(std::string_view text) {
  const auto cells = parse_csv_cells<double>(text);
  RMatrix m(static_cast<Eigen::Index>(cells.size()), static_cast<Eigen::Index>(cells.front().size()));
  for (std::size_t i = 0; i < cells.size(); ++i)
    for (std::size_t j = 0; j < cells[i].size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = cells[i][j];
  return m;
}

CountMatrix parse_csv_counts(std::string_view text) {
  const auto cells = parse_csv_cells<std::int64_t>(text);
  CountMatrix m(static_cast<Eigen::Index>(cells.size()), static_cast<Eigen::Index>(cells.front().size()));
  for (std::size_t i = 0; i < cells.size(); ++i)
    for (std::size_t j = 0; j < cells[i].size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = cells[i][j];
  return m;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error reading '" + path.string() + "'");
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw IoError("error writing '" + path.string() + "'");
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw IoError("SHA-256 digest failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xf];
  }
  return out;
}

std::filesystem::path counts_sidecar_path(const std::filesystem::path& csv_path) {
  std::filesystem::path p = csv_path;
  p.replace_extension(".json");
  return p;
}

Json to_json(const RunManifest& m) {
  Json outs = Json::array();
  for (const auto& o : m.outputs) outs.push_back(Json{{"path", o.path}, {"sha256", o.sha256}});
  Json j{{"command", m.command}, {"config", m.config}};
  if (m.seed)
    j["seed"] = *m.seed;
  else
    j["seed"] = nullptr;
  j["artifact_version"] = m.artifact_version;
  j["outputs"] = std::move(outs);
  return j;
}

RunManifest manifest_from_json(const Json& j) {
  return wrap_json([&] {
    RunManifest m;
    m.command = require(j, "command").get<std::string>();
    m.config = require(j, "config");
    const Json& seed = require(j, "seed");
    if (!seed.is_null()) m.seed = seed.get<std::uint64_t>();
    m.artifact_version = require(j, "artifact_version").get<std::string>();
    for (const Json& o : require(j, "outputs"))
      m.outputs.push_back({require(o, "path").get<std::string>(), require(o, "sha256").get<std::string>()});
    return m;
  });
}

}  // namespace nullwit
