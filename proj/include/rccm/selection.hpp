#pragma once

#include <cstdint>
#include <set>
#include <utility>
#include <vector>

#include "rccm/model.hpp"

namespace rccm {

using Edge = std::pair<int, int>;  // 1-based nodes, first < second
using EdgeSet = std::set<Edge>;

// Node pairs with |entry| above the threshold.
EdgeSet edge_set(const Matrix& m, double threshold = 1e-8);

// Per-subject row subsample of floor(10 sqrt(n_k)) rows without replacement,
// falling back to floor(0.75 n_k) when that exceeds n_k (flag reported via
// used_fallback). Rows keep their draw order; the subsample is re-centered
// (and re-scaled if the source panel was standardized).
TimeSeriesPanel subsample_panel(const TimeSeriesPanel& panel, std::uint64_t seed,
                                int index, bool* used_fallback = nullptr);

// Average over subjects of the mean pairwise selection instability
// 2 theta (1 - theta), where theta is the fraction of subsamples selecting a
// node pair; edge_sets[k][i] holds subject k's edges in subsample i.
double instability(const std::vector<std::vector<EdgeSet>>& edge_sets, int p);

enum class StarsFitter { rccm, glasso_per_subject };

struct StarsConfig {
  int num_subsamples = 20;
  double beta = 0.05;
  std::uint64_t seed = 0;
  int threads = 1;  // workers for the per-candidate subsample fits
  FitOptions fit;   // EM controls for the rccm fitter; solver options for both
};

struct StarsCandidate {
  TuningParams params;
  double instability = 0.0;
  double mean_sparsity = 0.0;  // fraction of absent subject edges, full fit
  bool feasible = false;
  bool failed = false;
};

struct StabilityReport {
  std::vector<StarsCandidate> candidates;  // grid order
  int selected = -1;                       // index into candidates
  bool any_feasible = false;
  std::vector<int> subsample_sizes;        // rows drawn per subject
  bool subsample_fallback = false;
};

// Sorts candidates lexicographically by (lambda1, lambda2, lambda3) and
// validates a shared cluster count and no duplicates.
std::vector<TuningParams> make_grid(std::vector<TuningParams> candidates);

// Stability selection: fits the chosen estimator on each subsampled panel for
// every grid candidate, computes instability, and among candidates with
// instability <= beta picks the one whose full-data fit is least sparse
// (ties toward earlier grid position). With no feasible candidate, picks the
// lowest instability and leaves any_feasible unset. Candidates whose fits
// fail even after seeded random-init retries are marked failed and never
// selected unless every candidate failed.
StabilityReport stars_select(const TimeSeriesPanel& panel,
                             const std::vector<TuningParams>& grid,
                             const StarsConfig& cfg,
                             StarsFitter fitter = StarsFitter::rccm);

// log of the average squared entry deviation of estimates about their cluster
// means, normalized by (G p^2) and floored at 1e-12 before the log. Labels
// are 1..G and every cluster must be populated.
double within_cluster_dispersion(const std::vector<Matrix>& estimates,
                                 const std::vector<int>& labels, int G);

// Identity shift until the smallest eigenvalue reaches 1e-3; positive
// definite inputs above that floor pass through untouched.
Matrix make_positive_definite(const Matrix& m);

// Null-model panel: per subject, a symmetric precision drawn entrywise
// between the min and max of the supplied estimates, repaired positive
// definite, inverted to the sampling covariance; observation counts and
// processing mirror the source panel.
TimeSeriesPanel generate_reference_panel(const TimeSeriesPanel& panel,
                                         const std::vector<Matrix>& estimates,
                                         std::uint64_t seed, int index);

struct GapConfig {
  int g_max = 4;
  int num_reference = 10;
  double reference_glasso_lambda = 1e-16;
  std::uint64_t seed = 0;
  int threads = 1;  // workers for the reference-panel fits
  FitOptions fit;
};

struct GapReport {
  std::vector<int> cluster_counts;             // 2..g_max
  std::vector<double> observed;                // dispersion per cluster count
  std::vector<std::vector<double>> reference;  // [cluster count][replicate]
  std::vector<double> gap;
  std::vector<double> sigma;
  int selected = 0;
  bool rule_satisfied = false;
};

// Gap-statistic choice of the cluster count. Dispersions are computed from
// per-subject graphical lasso estimates at reference_glasso_lambda combined
// with the hard cluster labels of a fit at each candidate count (the base
// penalties are reused at every count). Gap(G) is the mean reference
// dispersion minus the observed one; sigma uses the population standard
// deviation over replicates times sqrt(1 + 1/B). Selects the smallest G with
// Gap(G) >= Gap(G+1) - sigma(G+1), else g_max with rule_satisfied unset.
GapReport gap_select(const TimeSeriesPanel& panel, const TuningParams& base,
                     const GapConfig& cfg);

}  // namespace rccm
