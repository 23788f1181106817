#include "rccm/io.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <map>
#include <regex>
#include <sstream>

#include "rccm/version.hpp"

namespace rccm {

namespace fs = std::filesystem;

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string quoted_list(const std::vector<std::string>& keys) {
  std::string out;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (i) out += ", ";
    out += "'" + keys[i] + "'";
  }
  return out;
}

// Structural validation: all required keys present, nothing outside
// required + optional. Offending keys are listed in the message.
void check_keys(const Json& j, const std::string& what,
                std::initializer_list<const char*> required,
                std::initializer_list<const char*> optional = {}) {
  if (!j.is_object()) throw SchemaError(what + " must be a JSON object");
  std::vector<std::string> missing;
  for (const char* k : required)
    if (!j.contains(k)) missing.push_back(k);
  std::vector<std::string> unknown;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto known = [&](const char* k) { return it.key() == k; };
    if (!std::any_of(required.begin(), required.end(), known) &&
        !std::any_of(optional.begin(), optional.end(), known))
      unknown.push_back(it.key());
  }
  if (missing.empty() && unknown.empty()) return;
  std::string msg = what + ":";
  if (!missing.empty()) msg += " missing keys " + quoted_list(missing);
  if (!unknown.empty()) {
    if (!missing.empty()) msg += ";";
    msg += " unknown keys " + quoted_list(unknown);
  }
  throw SchemaError(msg);
}

double get_double(const Json& j, const std::string& what, const char* key) {
  const Json& v = j.at(key);
  if (!v.is_number())
    throw SchemaError(what + "." + key + " must be a number");
  return v.get<double>();
}

int get_int(const Json& j, const std::string& what, const char* key) {
  const Json& v = j.at(key);
  if (!v.is_number_integer() && !v.is_number_unsigned())
    throw SchemaError(what + "." + key + " must be an integer");
  return v.get<int>();
}

std::uint64_t get_u64(const Json& j, const std::string& what, const char* key) {
  const Json& v = j.at(key);
  if (!(v.is_number_unsigned() ||
        (v.is_number_integer() && v.get<std::int64_t>() >= 0)))
    throw SchemaError(what + "." + key + " must be a non-negative integer");
  return v.get<std::uint64_t>();
}

bool get_bool(const Json& j, const std::string& what, const char* key) {
  const Json& v = j.at(key);
  if (!v.is_boolean()) throw SchemaError(what + "." + key + " must be a boolean");
  return v.get<bool>();
}

std::string get_string(const Json& j, const std::string& what, const char* key) {
  const Json& v = j.at(key);
  if (!v.is_string()) throw SchemaError(what + "." + key + " must be a string");
  return v.get<std::string>();
}

std::vector<double> get_double_array(const Json& v, const std::string& what) {
  if (!v.is_array()) throw SchemaError(what + " must be an array of numbers");
  std::vector<double> out;
  for (const Json& e : v) {
    if (!e.is_number()) throw SchemaError(what + " must contain only numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::vector<int> get_int_array(const Json& v, const std::string& what) {
  if (!v.is_array()) throw SchemaError(what + " must be an array of integers");
  std::vector<int> out;
  for (const Json& e : v) {
    if (!e.is_number_integer() && !e.is_number_unsigned())
      throw SchemaError(what + " must contain only integers");
    out.push_back(e.get<int>());
  }
  return out;
}

Json edge_set_to_json(const EdgeSet& s) {
  Json arr = Json::array();
  for (const auto& [i, j] : s) arr.push_back(Json::array({i, j}));
  return arr;
}

EdgeSet edge_set_from_json(const Json& v, const std::string& what) {
  if (!v.is_array()) throw SchemaError(what + " must be an array of node pairs");
  EdgeSet s;
  for (const Json& e : v) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() ||
        !e[1].is_number_integer())
      throw SchemaError(what + " entries must be [node_i, node_j] pairs");
    s.insert({e[0].get<int>(), e[1].get<int>()});
  }
  return s;
}

Json tuning_to_json(const TuningParams& tp) {
  Json j;
  j["groups"] = tp.groups;
  j["lambda1"] = tp.lambda1;
  j["lambda2"] = tp.lambda2;
  j["lambda3"] = tp.lambda3;
  return j;
}

TuningParams tuning_from_json(const Json& j, const std::string& what) {
  check_keys(j, what, {"groups", "lambda1", "lambda2", "lambda3"});
  TuningParams tp;
  tp.groups = get_int(j, what, "groups");
  tp.lambda1 = get_double(j, what, "lambda1");
  tp.lambda2 = get_double(j, what, "lambda2");
  tp.lambda3 = get_double(j, what, "lambda3");
  return tp;
}

std::vector<std::string> get_string_array(const Json& v,
                                          const std::string& what) {
  if (!v.is_array()) throw SchemaError(what + " must be an array of strings");
  std::vector<std::string> out;
  for (const Json& e : v) {
    if (!e.is_string()) throw SchemaError(what + " must contain only strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

}  // namespace

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestionError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IngestionError("cannot write " + path.string());
  out << content;
  if (!out) throw IngestionError("write failed for " + path.string());
}

Json read_json_file(const fs::path& path) {
  const std::string text = read_text_file(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

void write_json_file(const fs::path& path, const Json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

void write_matrix_csv(const fs::path& path,
                      const std::vector<std::string>& header, const Matrix& m) {
  if (static_cast<int>(header.size()) != m.cols())
    throw InvalidInputError("header size must match the column count");
  std::ostringstream out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out << ',';
    out << header[i];
  }
  out << '\n';
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      if (c) out << ',';
      out << fmt17(m(r, c));
    }
    out << '\n';
  }
  write_text_file(path, out.str());
}

namespace {

std::vector<std::string> split_csv_line(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    cells.push_back(line.substr(
        start, comma == std::string::npos ? std::string::npos : comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return cells;
}

double parse_cell(const std::string& cell, const fs::path& path, int line_no) {
  const char* begin = cell.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  while (end && *end == ' ') ++end;
  if (end == begin || (end && *end != '\0'))
    throw IngestionError(path.string() + ": line " + std::to_string(line_no) +
                         ": cannot parse numeric cell '" + cell + "'");
  return v;
}

}  // namespace

Matrix read_matrix_csv(const fs::path& path,
                       std::vector<std::string>* header_out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestionError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line))
    throw IngestionError(path.string() + ": missing header row");
  const auto header = split_csv_line(line);
  const int p = static_cast<int>(header.size());
  for (const auto& name : header)
    if (name.empty())
      throw IngestionError(path.string() + ": empty column name in header");

  std::vector<std::vector<double>> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    if (static_cast<int>(cells.size()) != p)
      throw IngestionError(path.string() + ": line " + std::to_string(line_no) +
                           ": expected " + std::to_string(p) + " cells, found " +
                           std::to_string(cells.size()));
    std::vector<double> row;
    row.reserve(p);
    for (const auto& c : cells) row.push_back(parse_cell(c, path, line_no));
    rows.push_back(std::move(row));
  }
  if (rows.empty())
    throw IngestionError(path.string() + ": no data rows");
  Matrix m(static_cast<int>(rows.size()), p);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (int c = 0; c < p; ++c) m(static_cast<int>(r), c) = rows[r][c];
  if (header_out) *header_out = header;
  return m;
}

void write_edges_csv(const fs::path& path, const Matrix& m, double threshold) {
  require_symmetric(m, "edge matrix");
  std::ostringstream out;
  out << "node_i,node_j,weight\n";
  const int p = static_cast<int>(m.rows());
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j)
      if (std::abs(m(i, j)) > threshold)
        out << (i + 1) << ',' << (j + 1) << ',' << fmt17(m(i, j)) << '\n';
  write_text_file(path, out.str());
}

void write_subject_files(const fs::path& dir, const std::vector<Matrix>& raw,
                         const std::vector<std::string>& roi_names) {
  fs::create_directories(dir);
  for (std::size_t k = 0; k < raw.size(); ++k)
    write_matrix_csv(dir / ("subject_" + std::to_string(k + 1) + ".csv"),
                     roi_names, raw[k]);
}

std::vector<Matrix> load_subject_files(const fs::path& dir,
                                       std::vector<std::string>* roi_out) {
  if (!fs::is_directory(dir))
    throw IngestionError(dir.string() + " is not a directory");
  const std::regex name_re("subject_([0-9]+)\\.csv");
  std::map<int, fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    std::smatch m;
    if (!std::regex_match(name, m, name_re)) continue;
    const int k = std::atoi(m[1].str().c_str());
    if (k < 1)
      throw IngestionError(entry.path().string() +
                           ": subject indices start at 1");
    if (!files.emplace(k, entry.path()).second)
      throw IngestionError(dir.string() + ": duplicate subject index " +
                           std::to_string(k));
    }
  if (files.empty())
    throw IngestionError(dir.string() + ": no subject_<k>.csv files found");
  int expected = 1;
  for (const auto& [k, path] : files) {
    if (k != expected)
      throw IngestionError(dir.string() + ": missing subject_" +
                           std::to_string(expected) + ".csv (found " +
                           path.filename().string() + ")");
    ++expected;
  }

  std::vector<Matrix> raw;
  std::vector<std::string> first_header;
  fs::path first_path;
  for (const auto& [k, path] : files) {
    std::vector<std::string> header;
    raw.push_back(read_matrix_csv(path, &header));
    if (raw.size() == 1) {
      first_header = header;
      first_path = path;
    } else if (header != first_header) {
      throw IngestionError(path.filename().string() +
                           " header differs from " +
                           first_path.filename().string());
    }
  }
  if (roi_out) *roi_out = first_header;
  return raw;
}

Json matrix_to_json(const Matrix& m) {
  Json j;
  j["rows"] = static_cast<int>(m.rows());
  j["cols"] = static_cast<int>(m.cols());
  Json data = Json::array();
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  j["data"] = std::move(data);
  return j;
}

Matrix matrix_from_json(const Json& j, const std::string& what) {
  check_keys(j, what, {"cols", "data", "rows"});
  const int rows = get_int(j, what, "rows");
  const int cols = get_int(j, what, "cols");
  if (rows < 1 || cols < 1)
    throw SchemaError(what + ": dimensions must be positive");
  const Json& data = j.at("data");
  if (!data.is_array() ||
      data.size() != static_cast<std::size_t>(rows) * cols)
    throw SchemaError(what + ".data must hold rows*cols numbers");
  Matrix m(rows, cols);
  std::size_t idx = 0;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      const Json& v = data[idx++];
      if (!v.is_number())
        throw SchemaError(what + ".data must hold only numbers");
      m(r, c) = v.get<double>();
    }
  return m;
}

FitArtifact make_fit_artifact(const ModelState& state, const TuningParams& tp,
                              double epsilon, std::uint64_t seed,
                              const std::vector<std::string>& roi_names) {
  FitArtifact a;
  a.version = kVersion;
  a.seed = seed;
  a.tuning = tp;
  a.epsilon = epsilon;
  a.converged = state.converged;
  a.iterations = state.iteration;
  a.max_change = state.max_entry_change;
  a.roi_names = roi_names;
  a.weights.assign(state.weights.data(),
                   state.weights.data() + state.weights.size());
  a.responsibilities = state.responsibilities;
  a.group_precisions = state.group_precisions;
  a.subject_precisions = state.subject_precisions;
  a.hard_assignments = hard_assignments(state);
  return a;
}

Json fit_artifact_to_json(const FitArtifact& a) {
  Json j;
  j["version"] = a.version;
  j["seed"] = a.seed;
  j["tuning"] = tuning_to_json(a.tuning);
  Json conv;
  conv["converged"] = a.converged;
  conv["epsilon"] = a.epsilon;
  conv["iterations"] = a.iterations;
  conv["max_entry_change"] = a.max_change;
  j["convergence"] = std::move(conv);
  j["roi_names"] = a.roi_names;
  j["weights"] = a.weights;
  j["responsibilities"] = matrix_to_json(a.responsibilities);
  Json groups = Json::array();
  for (const auto& m : a.group_precisions) groups.push_back(matrix_to_json(m));
  j["group_precisions"] = std::move(groups);
  Json subjects = Json::array();
  for (const auto& m : a.subject_precisions)
    subjects.push_back(matrix_to_json(m));
  j["subject_precisions"] = std::move(subjects);
  j["hard_assignments"] = a.hard_assignments;
  return j;
}

FitArtifact fit_artifact_from_json(const Json& j) {
  const std::string what = "fit artifact";
  check_keys(j, what,
             {"convergence", "group_precisions", "hard_assignments",
              "responsibilities", "roi_names", "seed", "subject_precisions",
              "tuning", "version", "weights"});
  FitArtifact a;
  a.version = get_string(j, what, "version");
  a.seed = get_u64(j, what, "seed");
  a.tuning = tuning_from_json(j.at("tuning"), what + ".tuning");
  const Json& conv = j.at("convergence");
  check_keys(conv, what + ".convergence",
             {"converged", "epsilon", "iterations", "max_entry_change"});
  a.converged = get_bool(conv, what + ".convergence", "converged");
  a.epsilon = get_double(conv, what + ".convergence", "epsilon");
  a.iterations = get_int(conv, what + ".convergence", "iterations");
  a.max_change = get_double(conv, what + ".convergence", "max_entry_change");
  a.roi_names = get_string_array(j.at("roi_names"), what + ".roi_names");
  a.weights = get_double_array(j.at("weights"), what + ".weights");
  a.responsibilities =
      matrix_from_json(j.at("responsibilities"), what + ".responsibilities");
  const Json& groups = j.at("group_precisions");
  if (!groups.is_array())
    throw SchemaError(what + ".group_precisions must be an array");
  for (std::size_t g = 0; g < groups.size(); ++g)
    a.group_precisions.push_back(matrix_from_json(
        groups[g], what + ".group_precisions[" + std::to_string(g) + "]"));
  const Json& subjects = j.at("subject_precisions");
  if (!subjects.is_array())
    throw SchemaError(what + ".subject_precisions must be an array");
  for (std::size_t k = 0; k < subjects.size(); ++k)
    a.subject_precisions.push_back(matrix_from_json(
        subjects[k], what + ".subject_precisions[" + std::to_string(k) + "]"));
  a.hard_assignments =
      get_int_array(j.at("hard_assignments"), what + ".hard_assignments");

  const int G = a.tuning.groups;
  const int K = static_cast<int>(a.subject_precisions.size());
  if (static_cast<int>(a.group_precisions.size()) != G)
    throw SchemaError(what + ": expected " + std::to_string(G) +
                      " group precisions");
  if (static_cast<int>(a.weights.size()) != G)
    throw SchemaError(what + ": expected " + std::to_string(G) + " weights");
  if (a.responsibilities.rows() != G || a.responsibilities.cols() != K)
    throw SchemaError(what + ": responsibilities must be groups x subjects");
  if (static_cast<int>(a.hard_assignments.size()) != K)
    throw SchemaError(what + ": one hard assignment per subject required");
  for (int l : a.hard_assignments)
    if (l < 1 || l > G)
      throw SchemaError(what + ": hard assignments must lie in 1..groups");
  return a;
}

Json simulation_config_to_json(const SimulationConfig& cfg) {
  Json j;
  j["groups"] = cfg.groups;
  j["subjects"] = cfg.subjects;
  j["variables"] = cfg.variables;
  j["observations"] = cfg.observations;
  j["overlap"] = cfg.overlap;
  j["magnitude"] = cfg.magnitude == Magnitude::high ? "high" : "low";
  j["cluster_sizes"] = cfg.cluster_sizes;
  j["perturbation_rate"] = cfg.perturbation_rate;
  j["noise_sd"] = cfg.noise_sd;
  j["seed"] = cfg.seed;
  return j;
}

SimulationConfig simulation_config_from_json(const Json& j) {
  const std::string what = "simulation config";
  check_keys(j, what,
             {"groups", "magnitude", "observations", "overlap", "subjects",
              "variables"},
             {"cluster_sizes", "noise_sd", "perturbation_rate", "seed"});
  SimulationConfig cfg;
  cfg.groups = get_int(j, what, "groups");
  cfg.subjects = get_int(j, what, "subjects");
  cfg.variables = get_int(j, what, "variables");
  cfg.observations = get_int(j, what, "observations");
  cfg.overlap = get_double(j, what, "overlap");
  const std::string mag = get_string(j, what, "magnitude");
  if (mag == "high")
    cfg.magnitude = Magnitude::high;
  else if (mag == "low")
    cfg.magnitude = Magnitude::low;
  else
    throw SchemaError(what + ".magnitude must be 'high' or 'low'");
  if (j.contains("cluster_sizes"))
    cfg.cluster_sizes =
        get_int_array(j.at("cluster_sizes"), what + ".cluster_sizes");
  if (j.contains("perturbation_rate"))
    cfg.perturbation_rate = get_double(j, what, "perturbation_rate");
  if (j.contains("noise_sd")) cfg.noise_sd = get_double(j, what, "noise_sd");
  if (j.contains("seed")) cfg.seed = get_u64(j, what, "seed");
  return cfg;
}

Json truth_to_json(const NetworkTruth& truth, const SimulationConfig& cfg) {
  Json j;
  j["version"] = kVersion;
  j["config"] = simulation_config_to_json(cfg);
  j["labels"] = truth.labels;
  Json gn = Json::array();
  for (const auto& s : truth.group_networks) gn.push_back(edge_set_to_json(s));
  j["group_networks"] = std::move(gn);
  Json sn = Json::array();
  for (const auto& s : truth.subject_networks)
    sn.push_back(edge_set_to_json(s));
  j["subject_networks"] = std::move(sn);
  Json gp = Json::array();
  for (const auto& m : truth.group_precisions) gp.push_back(matrix_to_json(m));
  j["group_precisions"] = std::move(gp);
  Json sp = Json::array();
  for (const auto& m : truth.subject_precisions)
    sp.push_back(matrix_to_json(m));
  j["subject_precisions"] = std::move(sp);
  return j;
}

NetworkTruth truth_from_json(const Json& j, SimulationConfig* cfg_out) {
  const std::string what = "truth";
  check_keys(j, what,
             {"config", "group_networks", "group_precisions", "labels",
              "subject_networks", "subject_precisions", "version"});
  const SimulationConfig cfg = simulation_config_from_json(j.at("config"));
  if (cfg_out) *cfg_out = cfg;
  NetworkTruth truth;
  truth.labels = get_int_array(j.at("labels"), what + ".labels");
  for (const Json& e : j.at("group_networks"))
    truth.group_networks.push_back(
        edge_set_from_json(e, what + ".group_networks"));
  for (const Json& e : j.at("subject_networks"))
    truth.subject_networks.push_back(
        edge_set_from_json(e, what + ".subject_networks"));
  for (std::size_t g = 0; g < j.at("group_precisions").size(); ++g)
    truth.group_precisions.push_back(
        matrix_from_json(j.at("group_precisions")[g],
                         what + ".group_precisions[" + std::to_string(g) + "]"));
  for (std::size_t k = 0; k < j.at("subject_precisions").size(); ++k)
    truth.subject_precisions.push_back(matrix_from_json(
        j.at("subject_precisions")[k],
        what + ".subject_precisions[" + std::to_string(k) + "]"));
  if (truth.labels.size() != truth.subject_precisions.size() ||
      truth.labels.size() != truth.subject_networks.size())
    throw SchemaError(what + ": labels and subject entries must align");
  if (truth.group_networks.size() != truth.group_precisions.size())
    throw SchemaError(what + ": group entries must align");
  return truth;
}

Json stability_report_to_json(const StabilityReport& report,
                              const StarsConfig& cfg, StarsFitter fitter,
                              std::uint64_t seed) {
  Json j;
  j["version"] = kVersion;
  j["seed"] = seed;
  j["beta"] = cfg.beta;
  j["num_subsamples"] = cfg.num_subsamples;
  j["fitter"] =
      fitter == StarsFitter::rccm ? "rccm" : "glasso_per_subject";
  j["subsample_sizes"] = report.subsample_sizes;
  j["subsample_fallback"] = report.subsample_fallback;
  j["any_feasible"] = report.any_feasible;
  j["selected_index"] = report.selected;
  j["selected"] = tuning_to_json(report.candidates[report.selected].params);
  Json cands = Json::array();
  for (const auto& c : report.candidates) {
    Json e = tuning_to_json(c.params);
    e["instability"] = c.instability;
    e["mean_sparsity"] = c.mean_sparsity;
    e["feasible"] = c.feasible;
    e["failed"] = c.failed;
    cands.push_back(std::move(e));
  }
  j["candidates"] = std::move(cands);
  return j;
}

Json gap_report_to_json(const GapReport& report, const GapConfig& cfg,
                        const TuningParams& base) {
  Json j;
  j["version"] = kVersion;
  j["seed"] = cfg.seed;
  j["g_max"] = cfg.g_max;
  j["num_reference"] = cfg.num_reference;
  j["reference_glasso_lambda"] = cfg.reference_glasso_lambda;
  Json tuning;
  tuning["lambda1"] = base.lambda1;
  tuning["lambda2"] = base.lambda2;
  tuning["lambda3"] = base.lambda3;
  j["tuning"] = std::move(tuning);
  j["cluster_counts"] = report.cluster_counts;
  j["observed"] = report.observed;
  j["reference"] = report.reference;
  j["gap"] = report.gap;
  j["sigma"] = report.sigma;
  j["selected"] = report.selected;
  j["rule_satisfied"] = report.rule_satisfied;
  return j;
}

Json evaluation_to_json(const EvaluationResult& r) {
  Json j;
  j["version"] = kVersion;
  j["rand_index"] = r.rand_index;
  j["adjusted_rand_index"] = r.adjusted_rand_index;
  j["tpr_subject"] = r.tpr_subject;
  j["fpr_subject"] = r.fpr_subject;
  j["ppv_subject"] = r.ppv_subject;
  if (r.group) {
    Json g;
    g["tpr"] = r.group->tpr;
    g["fpr"] = r.group->fpr;
    g["ppv"] = r.group->ppv;
    j["group"] = std::move(g);
  } else {
    j["group"] = nullptr;
  }
  return j;
}

std::vector<TuningParams> tuning_grid_from_json(const Json& j) {
  const std::string what = "tuning grid";
  check_keys(j, what, {"groups", "lambda1", "lambda2", "lambda3"});
  const int groups = get_int(j, what, "groups");
  const auto l1 = get_double_array(j.at("lambda1"), what + ".lambda1");
  const auto l2 = get_double_array(j.at("lambda2"), what + ".lambda2");
  const auto l3 = get_double_array(j.at("lambda3"), what + ".lambda3");
  if (l1.empty() || l2.empty() || l3.empty())
    throw SchemaError(what + ": every axis needs at least one value");
  std::vector<TuningParams> grid;
  for (double a : l1)
    for (double b : l2)
      for (double c : l3) {
        TuningParams tp;
        tp.groups = groups;
        tp.lambda1 = a;
        tp.lambda2 = b;
        tp.lambda3 = c;
        grid.push_back(tp);
      }
  return grid;
}

BenchmarkConfig benchmark_config_from_json(const Json& j) {
  const std::string what = "benchmark config";
  check_keys(j, what, {"methods", "replicates", "selection", "simulation"},
             {"baseline_grid", "baseline_lambda", "epsilon", "kmeans_restarts",
              "max_em_iterations", "rccm", "rccm_grid", "rccm_restarts",
              "stars"});
  BenchmarkConfig cfg;
  cfg.simulation = simulation_config_from_json(j.at("simulation"));
  cfg.replicates = get_int(j, what, "replicates");
  if (cfg.replicates < 1)
    throw SchemaError(what + ".replicates must be positive");
  const auto method_names = get_string_array(j.at("methods"), what + ".methods");
  if (method_names.empty())
    throw SchemaError(what + ".methods must be non-empty");
  for (const auto& name : method_names) {
    try {
      cfg.methods.push_back(method_from_name(name));
    } catch (const InvalidInputError& e) {
      throw SchemaError(what + ".methods: " + e.what());
    }
  }

  const std::string sel = get_string(j, what, "selection");
  if (sel == "fixed")
    cfg.options.selection = SelectionMode::fixed;
  else if (sel == "stars")
    cfg.options.selection = SelectionMode::stars;
  else
    throw SchemaError(what + ".selection must be 'fixed' or 'stars'");

  const bool wants_rccm =
      std::find(cfg.methods.begin(), cfg.methods.end(), Method::rccm) !=
      cfg.methods.end();
  const bool wants_baseline =
      std::find_if(cfg.methods.begin(), cfg.methods.end(), [](Method m) {
        return m != Method::rccm;
      }) != cfg.methods.end();

  if (cfg.options.selection == SelectionMode::fixed) {
    if (wants_rccm) {
      if (!j.contains("rccm"))
        throw SchemaError(what + ": fixed selection with rccm needs an 'rccm' "
                          "tuning object");
      const Json& r = j.at("rccm");
      check_keys(r, what + ".rccm", {"lambda1", "lambda2", "lambda3"});
      cfg.options.rccm_tuning.groups = cfg.simulation.groups;
      cfg.options.rccm_tuning.lambda1 = get_double(r, what + ".rccm", "lambda1");
      cfg.options.rccm_tuning.lambda2 = get_double(r, what + ".rccm", "lambda2");
      cfg.options.rccm_tuning.lambda3 = get_double(r, what + ".rccm", "lambda3");
    }
    if (j.contains("baseline_lambda"))
      cfg.options.baseline_lambda = get_double(j, what, "baseline_lambda");
  } else {
    if (wants_rccm) {
      if (!j.contains("rccm_grid"))
        throw SchemaError(what +
                          ": stars selection with rccm needs an 'rccm_grid'");
      Json grid_doc = j.at("rccm_grid");
      if (grid_doc.is_object() && !grid_doc.contains("groups"))
        grid_doc["groups"] = cfg.simulation.groups;
      cfg.options.rccm_grid = tuning_grid_from_json(grid_doc);
    }
    if (wants_baseline) {
      if (!j.contains("baseline_grid"))
        throw SchemaError(what + ": stars selection with a baseline needs a "
                          "'baseline_grid'");
      cfg.options.baseline_grid =
          get_double_array(j.at("baseline_grid"), what + ".baseline_grid");
      if (cfg.options.baseline_grid.empty())
        throw SchemaError(what + ".baseline_grid must be non-empty");
    }
    if (j.contains("stars")) {
      const Json& s = j.at("stars");
      check_keys(s, what + ".stars", {}, {"beta", "subsamples"});
      if (s.contains("subsamples"))
        cfg.options.stars.num_subsamples =
            get_int(s, what + ".stars", "subsamples");
      if (s.contains("beta"))
        cfg.options.stars.beta = get_double(s, what + ".stars", "beta");
    }
  }
  if (j.contains("rccm_restarts"))
    cfg.options.rccm_restarts = get_int(j, what, "rccm_restarts");
  if (j.contains("kmeans_restarts"))
    cfg.options.kmeans_restarts = get_int(j, what, "kmeans_restarts");
  if (j.contains("epsilon"))
    cfg.options.fit.epsilon = get_double(j, what, "epsilon");
  if (j.contains("max_em_iterations"))
    cfg.options.fit.max_em_iterations = get_int(j, what, "max_em_iterations");
  cfg.options.stars.fit = cfg.options.fit;
  return cfg;
}

namespace {

Json summary_entry(const MetricSummary& s) {
  Json j;
  j["mean"] = s.mean;
  j["sd"] = s.sd;
  return j;
}

}  // namespace

Json benchmark_result_to_json(const BenchmarkResult& result,
                              const BenchmarkConfig& cfg) {
  Json j;
  j["version"] = kVersion;
  j["simulation"] = simulation_config_to_json(cfg.simulation);
  j["replicates"] = cfg.replicates;
  j["selection"] =
      cfg.options.selection == SelectionMode::fixed ? "fixed" : "stars";

  Json rows = Json::array();
  for (const auto& row : result.rows) {
    Json r;
    r["method"] = method_name(row.method);
    r["attempted"] = row.attempted;
    r["used"] = row.used;
    r["failures"] = row.attempted - row.used;
    r["rand_index"] = summary_entry(row.rand_index);
    r["adjusted_rand_index"] = summary_entry(row.adjusted_rand_index);
    r["tpr_subject"] = summary_entry(row.tpr_subject);
    r["fpr_subject"] = summary_entry(row.fpr_subject);
    r["ppv_subject"] = summary_entry(row.ppv_subject);
    if (row.has_group_metrics) {
      r["tpr_group"] = summary_entry(row.tpr_group);
      r["fpr_group"] = summary_entry(row.fpr_group);
      r["ppv_group"] = summary_entry(row.ppv_group);
    } else {
      r["tpr_group"] = nullptr;
      r["fpr_group"] = nullptr;
      r["ppv_group"] = nullptr;
    }
    rows.push_back(std::move(r));
  }
  j["summary"] = std::move(rows);

  Json outcomes = Json::array();
  for (const auto& o : result.outcomes) {
    Json e;
    e["replicate"] = o.replicate;
    e["method"] = method_name(o.method);
    e["failed"] = o.failed;
    e["failure"] = o.failure;
    if (o.failed)
      e["metrics"] = nullptr;
    else
      e["metrics"] = evaluation_to_json(o.metrics);
    e["selected"] = tuning_to_json(o.selected_tuning);
    outcomes.push_back(std::move(e));
  }
  j["outcomes"] = std::move(outcomes);
  return j;
}

void write_benchmark_csv(const fs::path& path, const BenchmarkResult& result) {
  std::ostringstream out;
  out << "method,attempted,used,failures"
      << ",rand_index_mean,rand_index_sd"
      << ",adjusted_rand_index_mean,adjusted_rand_index_sd"
      << ",tpr_subject_mean,tpr_subject_sd"
      << ",fpr_subject_mean,fpr_subject_sd"
      << ",ppv_subject_mean,ppv_subject_sd"
      << ",tpr_group_mean,tpr_group_sd"
      << ",fpr_group_mean,fpr_group_sd"
      << ",ppv_group_mean,ppv_group_sd\n";
  for (const auto& row : result.rows) {
    out << method_name(row.method) << ',' << row.attempted << ',' << row.used
        << ',' << (row.attempted - row.used);
    const auto put = [&](const MetricSummary& s) {
      out << ',' << fmt17(s.mean) << ',' << fmt17(s.sd);
    };
    put(row.rand_index);
    put(row.adjusted_rand_index);
    put(row.tpr_subject);
    put(row.fpr_subject);
    put(row.ppv_subject);
    if (row.has_group_metrics) {
      put(row.tpr_group);
      put(row.fpr_group);
      put(row.ppv_group);
    } else {
      out << ",,,,,,";
    }
    out << '\n';
  }
  write_text_file(path, out.str());
}

}  // namespace rccm
