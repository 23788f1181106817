#include <cstdint>
#include <filesystem>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rccm/io.hpp"
#include "rccm/version.hpp"

namespace fs = std::filesystem;
using namespace rccm;

namespace {

// Stable exit classes; anything unexpected falls back to 1.
enum ExitCode : int {
  kOk = 0,
  kSchemaExit = 2,      // malformed JSON, schema violations, bad usage
  kIngestionExit = 3,   // unreadable/inconsistent data files
  kTuningExit = 4,      // tuning-parameter invariant violations
  kConvergenceExit = 5, // solver or EM failed to converge
  kInfeasibleExit = 6,  // no stability-feasible grid candidate
  kNumericExit = 7,     // numeric collapse or unrecoverable empty cluster
};

int run_guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << '\n';
    return kSchemaExit;
  } catch (const IngestionError& e) {
    std::cerr << "ingestion error: " << e.what() << '\n';
    return kIngestionExit;
  } catch (const DegenerateColumnError& e) {
    std::cerr << "ingestion error: " << e.what() << '\n';
    return kIngestionExit;
  } catch (const ConvergenceError& e) {
    std::cerr << "convergence failure: " << e.what() << '\n';
    return kConvergenceExit;
  } catch (const EmptyClusterError& e) {
    std::cerr << "empty cluster: " << e.what() << '\n';
    return kNumericExit;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kNumericExit;
  } catch (const InvalidInputError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kSchemaExit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

// Tuning violations get their own exit code and an actionable message.
void check_tuning_or_exit(const TuningParams& tp, const TimeSeriesPanel& panel) {
  try {
    validate_tuning(tp, panel);
  } catch (const InvalidInputError& e) {
    std::cerr << "tuning violation: " << e.what()
              << " (required: lambda2 > p - 1 and n_k + lambda2 - p - 1 > 0 "
                 "for every subject)\n";
    std::exit(kTuningExit);
  }
}

TimeSeriesPanel load_panel(const fs::path& dir, bool standardize) {
  std::vector<std::string> roi;
  const auto raw = load_subject_files(dir, &roi);
  try {
    return build_panel(raw, standardize, roi);
  } catch (const DegenerateColumnError&) {
    throw;
  } catch (const InvalidInputError& e) {
    throw IngestionError(dir.string() + ": " + e.what());
  }
}

void announce(const fs::path& p) { std::cout << "wrote " << p.string() << '\n'; }

struct SimulateArgs {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  bool seed_given = false;
};

int cmd_simulate(const SimulateArgs& a) {
  SimulationConfig cfg =
      simulation_config_from_json(read_json_file(a.config));
  if (a.seed_given) cfg.seed = a.seed;
  const NetworkTruth truth = generate_truth(cfg);
  std::vector<Matrix> raw;
  sample_panel(truth, cfg.observations, cfg.seed, 0, &raw);

  std::vector<std::string> roi;
  for (int j = 1; j <= cfg.variables; ++j)
    roi.push_back("V" + std::to_string(j));

  const fs::path out(a.out);
  fs::create_directories(out);
  write_subject_files(out, raw, roi);
  Json files = Json::array();
  for (std::size_t k = 1; k <= raw.size(); ++k)
    files.push_back("subject_" + std::to_string(k) + ".csv");
  write_json_file(out / "truth.json", truth_to_json(truth, cfg));
  files.push_back("truth.json");

  Json manifest;
  manifest["version"] = kVersion;
  manifest["command"] = "simulate";
  manifest["config"] = simulation_config_to_json(cfg);
  manifest["files"] = std::move(files);
  write_json_file(out / "manifest.json", manifest);

  std::cout << "simulated " << raw.size() << " subjects, " << cfg.observations
            << " observations, " << cfg.variables << " variables\n";
  announce(out / "truth.json");
  announce(out / "manifest.json");
  return kOk;
}

struct FitArgs {
  std::string data;
  std::string out;
  int groups = 1;
  double lambda1 = 0.0, lambda2 = 0.0, lambda3 = 0.0;
  double epsilon = 1e-3;
  int max_iterations = 200;
  int restarts = 0;
  std::uint64_t seed = 0;
  bool standardize = true;
};

int cmd_fit(const FitArgs& a) {
  const TimeSeriesPanel panel = load_panel(a.data, a.standardize);
  TuningParams tp;
  tp.groups = a.groups;
  tp.lambda1 = a.lambda1;
  tp.lambda2 = a.lambda2;
  tp.lambda3 = a.lambda3;
  check_tuning_or_exit(tp, panel);

  FitOptions opts;
  opts.epsilon = a.epsilon;
  opts.max_em_iterations = a.max_iterations;
  opts.seed = a.seed;
  const ModelState state =
      a.restarts > 0 ? rccm_fit_multistart(panel, tp, opts, a.restarts)
                     : rccm_fit_retry(panel, tp, opts);

  const FitArtifact artifact =
      make_fit_artifact(state, tp, a.epsilon, a.seed, panel.roi_names);
  const fs::path out(a.out);
  fs::create_directories(out);
  write_json_file(out / "fit.json", fit_artifact_to_json(artifact));
  announce(out / "fit.json");
  for (std::size_t g = 0; g < artifact.group_precisions.size(); ++g) {
    const fs::path p = out / ("edges_group_" + std::to_string(g + 1) + ".csv");
    write_edges_csv(p, artifact.group_precisions[g]);
    announce(p);
  }
  for (std::size_t k = 0; k < artifact.subject_precisions.size(); ++k) {
    const fs::path p =
        out / ("edges_subject_" + std::to_string(k + 1) + ".csv");
    write_edges_csv(p, artifact.subject_precisions[k]);
    announce(p);
  }
  if (!state.converged) {
    std::cerr << "did not converge within " << a.max_iterations
              << " iterations (last max entry change "
              << state.max_entry_change << "); artifact written anyway\n";
    return kConvergenceExit;
  }
  std::cout << "converged after " << state.iteration << " iterations\n";
  return kOk;
}

struct StarsArgs {
  std::string data;
  std::string grid;
  std::string out;
  int subsamples = 20;
  double beta = 0.05;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string fitter = "rccm";
  bool standardize = true;
};

int cmd_stars(const StarsArgs& a) {
  const TimeSeriesPanel panel = load_panel(a.data, a.standardize);
  const auto grid = tuning_grid_from_json(read_json_file(a.grid));

  StarsFitter fitter;
  if (a.fitter == "rccm")
    fitter = StarsFitter::rccm;
  else if (a.fitter == "glasso")
    fitter = StarsFitter::glasso_per_subject;
  else
    throw SchemaError("--fitter must be 'rccm' or 'glasso'");
  if (fitter == StarsFitter::rccm)
    for (const auto& tp : grid) check_tuning_or_exit(tp, panel);

  StarsConfig cfg;
  cfg.num_subsamples = a.subsamples;
  cfg.beta = a.beta;
  cfg.seed = a.seed;
  cfg.threads = a.threads;
  const StabilityReport report = stars_select(panel, grid, cfg, fitter);

  write_json_file(a.out, stability_report_to_json(report, cfg, fitter, a.seed));
  announce(a.out);
  const auto& chosen = report.candidates[report.selected];
  std::cout << "selected lambda1=" << chosen.params.lambda1
            << " lambda2=" << chosen.params.lambda2
            << " lambda3=" << chosen.params.lambda3
            << " (instability " << chosen.instability << ")\n";
  if (!report.any_feasible) {
    std::cerr << "no candidate met the instability bound beta=" << a.beta
              << "; report written anyway\n";
    return kInfeasibleExit;
  }
  return kOk;
}

struct GapArgs {
  std::string data;
  std::string out;
  int gmax = 4;
  int B = 10;
  double lambda1 = -1.0, lambda2 = -1.0, lambda3 = -1.0;  // <0 = derive
  double ref_lambda = 1e-16;
  std::uint64_t seed = 0;
  int threads = 1;
  bool standardize = true;
};

int cmd_gap(const GapArgs& a) {
  const TimeSeriesPanel panel = load_panel(a.data, a.standardize);

  // Defaults keep the EM well-posed on any panel: lambda2 just above p-1,
  // a mild subject penalty on the effective-penalty scale, a small group one.
  int min_n = panel.subjects.front().n();
  for (const auto& s : panel.subjects) min_n = std::min(min_n, s.n());
  TuningParams base;
  base.lambda2 = a.lambda2 >= 0 ? a.lambda2 : static_cast<double>(panel.p + 1);
  base.lambda1 = a.lambda1 >= 0
                     ? a.lambda1
                     : 0.1 * (min_n + base.lambda2 - panel.p - 1);
  base.lambda3 = a.lambda3 >= 0 ? a.lambda3 : 1.0;
  for (int G = 2; G <= a.gmax; ++G) {
    TuningParams tp = base;
    tp.groups = G;
    check_tuning_or_exit(tp, panel);
  }

  GapConfig cfg;
  cfg.g_max = a.gmax;
  cfg.num_reference = a.B;
  cfg.reference_glasso_lambda = a.ref_lambda;
  cfg.seed = a.seed;
  cfg.threads = a.threads;
  const GapReport report = gap_select(panel, base, cfg);

  write_json_file(a.out, gap_report_to_json(report, cfg, base));
  announce(a.out);
  std::cout << "selected G=" << report.selected
            << (report.rule_satisfied ? "" : " (gap rule never satisfied)")
            << '\n';
  return kOk;
}

struct BenchmarkArgs {
  std::string config;
  std::string out;
  int replicates = 0;          // 0 = take from config
  std::string methods;         // empty = take from config
  int threads = 1;
};

int cmd_benchmark(const BenchmarkArgs& a) {
  BenchmarkConfig cfg = benchmark_config_from_json(read_json_file(a.config));
  if (a.replicates > 0) cfg.replicates = a.replicates;
  if (!a.methods.empty()) {
    cfg.methods.clear();
    std::string rest = a.methods;
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const std::string name = rest.substr(0, comma);
      try {
        cfg.methods.push_back(method_from_name(name));
      } catch (const InvalidInputError& e) {
        throw SchemaError(std::string("--methods: ") + e.what());
      }
      if (comma == std::string::npos) break;
      rest = rest.substr(comma + 1);
    }
    if (cfg.methods.empty()) throw SchemaError("--methods must be non-empty");
  }
  cfg.options.stars.threads = a.threads;

  const BenchmarkResult result =
      run_benchmark(cfg.simulation, cfg.replicates, cfg.methods, cfg.options);

  const fs::path out(a.out);
  fs::create_directories(out);
  write_json_file(out / "benchmark.json", benchmark_result_to_json(result, cfg));
  write_benchmark_csv(out / "benchmark.csv", result);
  announce(out / "benchmark.json");
  announce(out / "benchmark.csv");
  for (const auto& row : result.rows)
    std::cout << method_name(row.method) << ": used " << row.used << "/"
              << row.attempted << ", RI " << row.rand_index.mean << ", ARI "
              << row.adjusted_rand_index.mean << '\n';
  return kOk;
}

struct EvaluateArgs {
  std::string fit;
  std::string truth;
  std::string out;
};

int cmd_evaluate(const EvaluateArgs& a) {
  const FitArtifact artifact = fit_artifact_from_json(read_json_file(a.fit));
  const NetworkTruth truth = truth_from_json(read_json_file(a.truth));

  std::vector<EdgeSet> subject_nets;
  for (const auto& m : artifact.subject_precisions)
    subject_nets.push_back(edge_set(m));
  std::vector<EdgeSet> group_nets;
  for (const auto& m : artifact.group_precisions)
    group_nets.push_back(edge_set(m));

  const EvaluationResult r = evaluate_estimates(
      truth, artifact.hard_assignments, subject_nets, &group_nets);
  write_json_file(a.out, evaluation_to_json(r));
  announce(a.out);
  std::cout << "RI " << r.rand_index << ", ARI " << r.adjusted_rand_index
            << ", subject TPR " << r.tpr_subject << ", FPR " << r.fpr_subject
            << ", PPV " << r.ppv_subject << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random covariance clustering: joint clustering and sparse "
               "precision estimation for multi-subject time series"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic panel");
  simulate->add_option("--config", sim.config, "SimulationConfig JSON")
      ->required();
  simulate->add_option("--out", sim.out, "output directory")->required();
  auto* sim_seed = simulate->add_option("--seed", sim.seed, "seed override");

  FitArgs fit;
  auto* fitc = app.add_subcommand("fit", "Fit the clustering model");
  fitc->add_option("--data", fit.data, "panel directory")->required();
  fitc->add_option("--groups", fit.groups, "number of clusters")->required();
  fitc->add_option("--lambda1", fit.lambda1, "subject sparsity penalty")
      ->required();
  fitc->add_option("--lambda2", fit.lambda2, "cluster similarity weight")
      ->required();
  fitc->add_option("--lambda3", fit.lambda3, "cluster sparsity penalty")
      ->required();
  fitc->add_option("--epsilon", fit.epsilon, "convergence threshold");
  fitc->add_option("--max-iterations", fit.max_iterations, "EM iteration cap");
  fitc->add_option("--restarts", fit.restarts,
                   "extra random starts, best objective kept");
  fitc->add_option("--seed", fit.seed, "seed for restart initialization");
  fitc->add_flag("!--no-standardize", fit.standardize,
                 "skip unit-variance scaling");
  fitc->add_option("--out", fit.out, "output directory")->required();
  int fit_threads = 1;
  fitc->add_option("--threads", fit_threads, "worker cap (fit is sequential)");

  StarsArgs stars;
  auto* starsc = app.add_subcommand("stars", "Stability-based tuning selection");
  starsc->add_option("--data", stars.data, "panel directory")->required();
  starsc->add_option("--grid", stars.grid, "tuning grid JSON")->required();
  starsc->add_option("--subsamples", stars.subsamples, "subsample count");
  starsc->add_option("--beta", stars.beta, "instability bound");
  starsc->add_option("--seed", stars.seed, "subsampling seed");
  starsc->add_option("--fitter", stars.fitter, "rccm or glasso");
  starsc->add_option("--threads", stars.threads, "worker cap");
  starsc->add_flag("!--no-standardize", stars.standardize,
                   "skip unit-variance scaling");
  starsc->add_option("--out", stars.out, "report path")->required();

  GapArgs gap;
  auto* gapc = app.add_subcommand("gap", "Gap-statistic cluster-count choice");
  gapc->add_option("--data", gap.data, "panel directory")->required();
  gapc->add_option("--gmax", gap.gmax, "largest cluster count");
  gapc->add_option("--B", gap.B, "reference panels");
  gapc->add_option("--lambda1", gap.lambda1, "subject sparsity penalty");
  gapc->add_option("--lambda2", gap.lambda2, "cluster similarity weight");
  gapc->add_option("--lambda3", gap.lambda3, "cluster sparsity penalty");
  gapc->add_option("--ref-lambda", gap.ref_lambda,
                   "dispersion-estimate penalty");
  gapc->add_option("--seed", gap.seed, "reference seed");
  gapc->add_option("--threads", gap.threads, "worker cap");
  gapc->add_flag("!--no-standardize", gap.standardize,
                 "skip unit-variance scaling");
  gapc->add_option("--out", gap.out, "report path")->required();

  BenchmarkArgs bench;
  auto* benchc = app.add_subcommand("benchmark", "Simulation study");
  benchc->add_option("--config", bench.config, "benchmark config JSON")
      ->required();
  benchc->add_option("--replicates", bench.replicates, "replicate override");
  benchc->add_option("--methods", bench.methods,
                     "comma-separated method override");
  benchc->add_option("--threads", bench.threads, "worker cap");
  benchc->add_option("--out", bench.out, "output directory")->required();

  EvaluateArgs eval;
  auto* evalc = app.add_subcommand("evaluate", "Score a fit against a truth");
  evalc->add_option("--fit", eval.fit, "fit artifact JSON")->required();
  evalc->add_option("--truth", eval.truth, "truth JSON")->required();
  evalc->add_option("--out", eval.out, "result path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kSchemaExit;
  }

  sim.seed_given = sim_seed->count() > 0;
  if (simulate->parsed()) return run_guarded([&] { return cmd_simulate(sim); });
  if (fitc->parsed()) return run_guarded([&] { return cmd_fit(fit); });
  if (starsc->parsed()) return run_guarded([&] { return cmd_stars(stars); });
  if (gapc->parsed()) return run_guarded([&] { return cmd_gap(gap); });
  if (benchc->parsed()) return run_guarded([&] { return cmd_benchmark(bench); });
  if (evalc->parsed()) return run_guarded([&] { return cmd_evaluate(eval); });
  return kSchemaExit;
}
