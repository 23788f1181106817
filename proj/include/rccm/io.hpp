#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "rccm/simulation.hpp"

namespace rccm {

using Json = nlohmann::json;  // sorted keys -> canonical, diffable output

// Malformed or unreadable input files (CSV cells, missing subjects,
// inconsistent headers). Messages name the offending file.
class IngestionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// JSON documents that fail structural validation: wrong types, missing
// required keys, or unknown keys.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// -- plain files --------------------------------------------------------

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path,
                     const std::string& content);

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);

// -- CSV ----------------------------------------------------------------

// Header row of column names, then one row per observation; numeric cells
// are written with 17 significant digits.
void write_matrix_csv(const std::filesystem::path& path,
                      const std::vector<std::string>& header, const Matrix& m);
Matrix read_matrix_csv(const std::filesystem::path& path,
                       std::vector<std::string>* header_out);

// Sparse off-diagonal entries of a symmetric matrix as node_i,node_j,weight
// rows (1-based, i < j), magnitudes above the threshold.
void write_edges_csv(const std::filesystem::path& path, const Matrix& m,
                     double threshold = 1e-8);

// One file per subject, subject_<k>.csv for k = 1..K. Loading demands the
// exact consecutive set and identical headers across files.
void write_subject_files(const std::filesystem::path& dir,
                         const std::vector<Matrix>& raw,
                         const std::vector<std::string>& roi_names);
std::vector<Matrix> load_subject_files(const std::filesystem::path& dir,
                                       std::vector<std::string>* roi_out);

// -- matrices in JSON ----------------------------------------------------

Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j, const std::string& what);

// -- fit artifact --------------------------------------------------------

struct FitArtifact {
  std::string version;
  std::uint64_t seed = 0;
  TuningParams tuning;
  double epsilon = 0.0;
  bool converged = false;
  int iterations = 0;
  double max_change = 0.0;
  std::vector<std::string> roi_names;
  std::vector<double> weights;
  Matrix responsibilities;  // groups x subjects
  std::vector<Matrix> group_precisions;
  std::vector<Matrix> subject_precisions;
  std::vector<int> hard_assignments;
};

FitArtifact make_fit_artifact(const ModelState& state, const TuningParams& tp,
                              double epsilon, std::uint64_t seed,
                              const std::vector<std::string>& roi_names);
Json fit_artifact_to_json(const FitArtifact& a);
FitArtifact fit_artifact_from_json(const Json& j);

// -- simulation ----------------------------------------------------------

Json simulation_config_to_json(const SimulationConfig& cfg);
SimulationConfig simulation_config_from_json(const Json& j);

Json truth_to_json(const NetworkTruth& truth, const SimulationConfig& cfg);
NetworkTruth truth_from_json(const Json& j, SimulationConfig* cfg_out = nullptr);

// -- selection reports ---------------------------------------------------

Json stability_report_to_json(const StabilityReport& report,
                              const StarsConfig& cfg, StarsFitter fitter,
                              std::uint64_t seed);
Json gap_report_to_json(const GapReport& report, const GapConfig& cfg,
                        const TuningParams& base);

// -- evaluation and benchmark --------------------------------------------

Json evaluation_to_json(const EvaluationResult& r);

// Grid axes (lambda1/lambda2/lambda3 arrays plus a groups count) expanded to
// their cartesian product.
std::vector<TuningParams> tuning_grid_from_json(const Json& j);

struct BenchmarkConfig {
  SimulationConfig simulation;
  int replicates = 1;
  std::vector<Method> methods;
  BenchmarkOptions options;
};

BenchmarkConfig benchmark_config_from_json(const Json& j);
Json benchmark_result_to_json(const BenchmarkResult& result,
                              const BenchmarkConfig& cfg);
void write_benchmark_csv(const std::filesystem::path& path,
                         const BenchmarkResult& result);

}  // namespace rccm
