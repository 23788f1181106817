#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rccm/selection.hpp"

namespace rccm {

enum class Magnitude { high, low };

struct SimulationConfig {
  int groups = 2;
  int subjects = 4;
  int variables = 10;
  int observations = 50;
  double overlap = 0.0;  // fraction of edges shared across all cluster networks
  Magnitude magnitude = Magnitude::high;
  std::vector<int> cluster_sizes;     // near-even split when empty
  double perturbation_rate = 0.20;    // fraction of edges toggled per subject
  double noise_sd = 0.05;
  std::uint64_t seed = 0;
};

struct NetworkTruth {
  std::vector<EdgeSet> group_networks;
  std::vector<EdgeSet> subject_networks;
  std::vector<Matrix> group_precisions;
  std::vector<Matrix> subject_precisions;
  std::vector<int> labels;  // 1-based cluster memberships
};

// Hub networks: floor(sqrt(p)) hubs with one spoke per remaining node, an
// overlap-determined subset of spokes pinned identically (same endpoints and
// values) in every cluster network, the rest rotated to distinct hubs per
// cluster. Edge values are uniform on [-1,-0.5] u [0.5,1] (a third of that
// for low magnitude) over a unit diagonal. Non-positive-definite matrices are
// repaired by dividing rows by their nonzero counts and re-symmetrizing (at
// most 3 rounds, eigenvalue shift as a last resort); cluster matrices share
// one divisor per row so pinned values stay equal. Subjects inherit their
// cluster matrix with floor(rate*E) toggled pairs, fresh uniform values on
// added edges, and Gaussian noise on inherited nonzeros. `variant` redraws
// values, subjects, and noise while keeping the network topology fixed.
NetworkTruth generate_truth(const SimulationConfig& cfg, int variant = 0);

// n rows per subject from the zero-mean Gaussian whose precision is the
// subject's true matrix; the returned panel is centered and scaled. Raw
// (unprocessed) draws are copied to raw_out when given.
TimeSeriesPanel sample_panel(const NetworkTruth& truth, int n, std::uint64_t seed,
                             int variant = 0,
                             std::vector<Matrix>* raw_out = nullptr);

double rand_index(const std::vector<int>& a, const std::vector<int>& b);
double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b);

struct EdgeMetrics {
  double tpr = 0.0;
  double fpr = 0.0;
  double ppv = 0.0;
};

// TPR = |est^true|/|true| (1 when no true edges), FPR over the non-edges,
// PPV = |est^true|/|est| (1 when both sets empty, 0 when only est is empty).
EdgeMetrics edge_metrics(const EdgeSet& truth, const EdgeSet& est, int p);

struct EvaluationResult {
  double rand_index = 0.0;
  double adjusted_rand_index = 0.0;
  double tpr_subject = 0.0;
  double fpr_subject = 0.0;
  double ppv_subject = 0.0;
  std::optional<EdgeMetrics> group;  // absent when a method has no group fits
};

// Clustering metrics plus subject-averaged edge metrics; group networks, when
// given, are matched to true clusters by majority membership overlap (ties
// toward the smaller true index) and averaged over non-empty clusters.
EvaluationResult evaluate_estimates(
    const NetworkTruth& truth, const std::vector<int>& est_labels,
    const std::vector<EdgeSet>& est_subject_networks,
    const std::vector<EdgeSet>* est_group_networks = nullptr);

struct BaselineFit {
  std::vector<int> labels;
  std::vector<Matrix> subject_precisions;
};

// Per-subject graphical lasso followed by k-means on the vectorized
// estimates. No cluster-level estimates.
BaselineFit glasso_kmeans_baseline(const TimeSeriesPanel& panel, double lambda,
                                   int G, std::uint64_t seed, int restarts = 10,
                                   const SolverOptions& solver = {});

struct PooledFit {
  std::vector<int> labels;
  std::vector<Matrix> group_precisions;
  std::vector<Matrix> subject_precisions;  // each subject gets its cluster fit
};

// Ward clustering of per-subject graphical lasso estimates, then one
// graphical lasso per cluster on the observation-weighted pooled covariance,
// copied to members as their subject estimate.
PooledFit ward_pooled_baseline(const TimeSeriesPanel& panel, double lambda,
                               int G, const SolverOptions& solver = {});

enum class Method { rccm, glasso_kmeans, ward_pooled };
enum class SelectionMode { fixed, stars };

struct BenchmarkOptions {
  SelectionMode selection = SelectionMode::fixed;
  TuningParams rccm_tuning;              // fixed mode (groups forced to cfg's)
  double baseline_lambda = 0.1;          // fixed mode
  std::vector<TuningParams> rccm_grid;   // stars mode
  std::vector<double> baseline_grid;     // stars mode
  StarsConfig stars;
  FitOptions fit;
  int rccm_restarts = 10;  // extra random starts, best penalized objective wins
  int kmeans_restarts = 10;
};

struct MetricSummary {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation; 0 with fewer than 2 values
};

struct ReplicateOutcome {
  int replicate = 0;  // 1-based
  Method method = Method::rccm;
  bool failed = false;
  std::string failure;
  EvaluationResult metrics;
  TuningParams selected_tuning;  // lambda1 carries the baseline penalty
};

struct MethodSummary {
  Method method = Method::rccm;
  int attempted = 0;
  int used = 0;
  MetricSummary rand_index, adjusted_rand_index;
  MetricSummary tpr_subject, fpr_subject, ppv_subject;
  bool has_group_metrics = false;
  MetricSummary tpr_group, fpr_group, ppv_group;
};

struct BenchmarkResult {
  std::vector<MethodSummary> rows;
  std::vector<ReplicateOutcome> outcomes;
};

// Repeated generate/sample/select/fit/evaluate cycles. Network topology is
// held fixed across replicates; values, subjects, observations, and tuning
// selection are redrawn per replicate. Failed replicates are recorded and
// excluded from the per-method means and standard deviations.
BenchmarkResult run_benchmark(const SimulationConfig& cfg, int replicates,
                              const std::vector<Method>& methods,
                              const BenchmarkOptions& opts);

const char* method_name(Method m);
Method method_from_name(const std::string& name);

}  // namespace rccm
