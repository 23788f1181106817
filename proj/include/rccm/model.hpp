#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string_view>
#include <vector>

#include "rccm/panel.hpp"
#include "rccm/solvers.hpp"

namespace rccm {

struct TuningParams {
  double lambda1 = 0.0;  // subject-level sparsity
  double lambda2 = 0.0;  // cluster similarity (mixture degrees of freedom)
  double lambda3 = 0.0;  // cluster-level sparsity
  int groups = 1;
};

// lambda1, lambda3 >= 0; lambda2 > p - 1; every n_k + lambda2 - p - 1 > 0.
void validate_tuning(const TuningParams& tp, const TimeSeriesPanel& panel);

struct ModelState {
  std::vector<Matrix> subject_precisions;  // one per subject
  std::vector<Matrix> group_precisions;    // one per cluster
  Vector weights;                          // mixture weights, sum to 1
  Matrix responsibilities;                 // groups x subjects, columns sum to 1
  int iteration = 0;
  double max_entry_change = std::numeric_limits<double>::infinity();
  bool converged = false;
};

enum class InitMethod { ward, random };

struct FitOptions {
  double epsilon = 1e-3;  // entrywise convergence threshold
  int max_em_iterations = 200;
  double init_glasso_lambda = 1e-3;
  InitMethod init = InitMethod::ward;
  std::uint64_t seed = 0;  // consumed only by random initialization
  SolverOptions solver;
};

// Mixture weights as column means of the responsibilities.
Vector update_pi(const Matrix& responsibilities);

// One covariance graphical lasso per cluster on the responsibility-weighted
// average of subject precisions, penalty lambda3 / (lambda2 * mass_g). Warm
// starts come from `warm` when given. Throws EmptyClusterError when a
// cluster's responsibility mass falls below 1e-8.
std::vector<Matrix> update_group_precisions(
    const Matrix& responsibilities,
    const std::vector<Matrix>& subject_precisions, const TuningParams& tp,
    const SolverOptions& solver, const std::vector<Matrix>* warm = nullptr);

// Column-wise softmax of log pi_g - (lambda2/2) (tr(Omega0g^{-1} Omega_k)
// + log|Omega0g|); terms constant across clusters cancel.
Matrix update_responsibilities(const std::vector<Matrix>& subject_precisions,
                               const std::vector<Matrix>& group_precisions,
                               const Vector& weights, double lambda2);

// One graphical lasso per subject on
//   (n_k S_k + lambda2 sum_g w_gk Omega0g^{-1}) / (n_k + lambda2 - p - 1)
// with penalty lambda1 / (n_k + lambda2 - p - 1).
std::vector<Matrix> update_subject_precisions(
    const TimeSeriesPanel& panel, const Matrix& responsibilities,
    const std::vector<Matrix>& group_precisions, const TuningParams& tp,
    const SolverOptions& solver, const std::vector<Matrix>* warm = nullptr);

// Per-subject graphical lasso estimates at init_glasso_lambda, hard cluster
// labels (Ward on Frobenius distances, or seeded random assignment covering
// every cluster), one-hot responsibilities, then the first weight/cluster
// updates.
ModelState initialize_model(const TimeSeriesPanel& panel, const TuningParams& tp,
                            const FitOptions& opts);

// Called after each update block with the running iteration (0 = init) and a
// phase tag: "init", "weights", "groups", "responsibilities", "subjects".
using FitObserver =
    std::function<void(int iteration, std::string_view phase, const ModelState&)>;

// Alternates weight, cluster-precision, responsibility, and subject-precision
// updates until the largest entry change across all precision matrices drops
// below epsilon or the iteration budget runs out (reported via `converged`,
// not an error). `warm_state` skips initialization and resumes from a
// compatible state.
ModelState rccm_fit(const TimeSeriesPanel& panel, const TuningParams& tp,
                    const FitOptions& opts = {}, const FitObserver& observer = {},
                    const ModelState* warm_state = nullptr);

// rccm_fit, falling back to seeded random initializations when a cluster
// collapses (up to `retries` extra attempts before the error propagates).
ModelState rccm_fit_retry(const TimeSeriesPanel& panel, const TuningParams& tp,
                          const FitOptions& opts, int retries = 3);

// The configured start plus `extra_starts` seeded random restarts; returns the
// state with the lowest penalized objective. Restart seeds derive from
// opts.seed. Starts that lose a cluster are skipped; the error propagates only
// when every start fails.
ModelState rccm_fit_multistart(const TimeSeriesPanel& panel,
                               const TuningParams& tp, const FitOptions& opts,
                               int extra_starts);

// argmax_g responsibilities, ties toward the smaller cluster index; 1-based.
std::vector<int> hard_assignments(const ModelState& state);

// Penalized -2 log-likelihood of the fitted state: Gaussian fit terms, the
// mixture log-density of each subject precision, and both off-diagonal L1
// penalties. Returns +infinity when every mixture term underflows.
double penalized_objective(const TimeSeriesPanel& panel, const ModelState& state,
                           const TuningParams& tp);

}  // namespace rccm
