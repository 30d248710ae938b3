#pragma once

// Serialization: JSON documents for every library object, CSV for
// probability and count matrices, SHA-256 digests for run manifests.
//
// Matrices are row-major arrays of rows, each entry a [re, im] pair; state
// vectors are arrays of [re, im]. Every operator-bearing object carries an
// explicit "field" tag.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "nullwit/frames.hpp"
#include "nullwit/optimizer.hpp"
#include "nullwit/qcore.hpp"
#include "nullwit/stats.hpp"
#include "nullwit/witness.hpp"

namespace nullwit {

using Json = nlohmann::ordered_json;

Json complex_matrix_to_json(const CMatrix& m);
CMatrix complex_matrix_from_json(const Json& j);
Json real_matrix_to_json(const RMatrix& m);
RMatrix real_matrix_from_json(const Json& j);

Json to_json(const StateVector& v);
StateVector state_from_json(const Json& j);
Json to_json(const DensityOperator& rho);
DensityOperator density_from_json(const Json& j);
Json to_json(const MeasurementOperator& m);
MeasurementOperator measurement_from_json(const Json& j);
Json to_json(const Povm& povm);
Povm povm_from_json(const Json& j);
Json to_json(const PreparationEnsemble& e);
PreparationEnsemble ensemble_from_json(const Json& j);
Json to_json(const Frame& f);
Frame frame_from_json(const Json& j);

Json to_json(const FrameReport& r);
Json to_json(const PovmReport& r);
Json to_json(const CertifiedDims& c);
Json to_json(const WitnessReport& r);
Json to_json(const ParamVector& p);
Json to_json(const OptimResult& r);
Json to_json(const ErrorReport& r);
Json to_json(const ExperimentCounts& c);
ExperimentCounts counts_from_json(const Json& j);

/// Serialized JSON text as written to disk (two-space indent, trailing newline).
std::string dump(const Json& j);
Json parse_json(std::string_view text);  // IoError on malformed input

/// %.17g, the round-trip representation used for every CSV number.
std::string format_double(double x);

/// One row per line, comma separated, no header.
std::string to_csv(const RMatrix& m);
std::string to_csv(const CountMatrix& m);
/// IoError on malformed text or ragged rows.
RMatrix parse_csv_matrix(std::string_view text);
CountMatrix parse_csv_counts(std::string_view text);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);

/// Sidecar of a counts CSV: same path with extension .json.
std::filesystem::path counts_sidecar_path(const std::filesystem::path& csv_path);

struct ManifestOutput {
  std::string path;  // relative to the output directory
  std::string sha256;
};

struct RunManifest {
  std::string command;
  Json config;
  std::optional<std::uint64_t> seed;
  std::string artifact_version;
  std::vector<ManifestOutput> outputs;
};

Json to_json(const RunManifest& m);
RunManifest manifest_from_json(const Json& j);

inline constexpr std::string_view kArtifactVersion = "1.0.0";

}  // namespace nullwit
