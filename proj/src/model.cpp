#include "rccm/model.hpp"

#include <algorithm>
#include <cmath>

#include "rccm/clustering.hpp"
#include "rccm/rng.hpp"
#include "rccm/wishart.hpp"

namespace rccm {

namespace {

constexpr double kMassFloor = 1e-8;

void check_responsibilities(const Matrix& resp) {
  if (resp.rows() < 1 || resp.cols() < 1)
    throw InvalidInputError("responsibility matrix must be non-empty");
  if (resp.minCoeff() < -1e-12 || resp.maxCoeff() > 1.0 + 1e-12)
    throw InvalidInputError("responsibilities must lie in [0, 1]");
  for (int k = 0; k < resp.cols(); ++k)
    if (std::abs(resp.col(k).sum() - 1.0) > 1e-8)
      throw InvalidInputError("responsibility columns must sum to one");
}

}  // namespace

void validate_tuning(const TuningParams& tp, const TimeSeriesPanel& panel) {
  if (!(std::isfinite(tp.lambda1) && tp.lambda1 >= 0.0))
    throw InvalidInputError("lambda1 must be finite and non-negative");
  if (!(std::isfinite(tp.lambda3) && tp.lambda3 >= 0.0))
    throw InvalidInputError("lambda3 must be finite and non-negative");
  if (tp.groups < 1) throw InvalidInputError("groups must be at least 1");
  const int p = panel.p;
  if (!(std::isfinite(tp.lambda2) && tp.lambda2 > p - 1))
    throw InvalidInputError("lambda2 must exceed p - 1");
  for (int k = 0; k < panel.num_subjects(); ++k)
    if (!(panel.subjects[k].n() + tp.lambda2 - p - 1 > 0.0))
      throw InvalidInputError("n_k + lambda2 - p - 1 must be positive");
}

Vector update_pi(const Matrix& resp) {
  check_responsibilities(resp);
  const int G = static_cast<int>(resp.rows());
  const int K = static_cast<int>(resp.cols());
  Vector pi(G);
  for (int g = 0; g < G; ++g) {
    double s = 0.0;
    for (int k = 0; k < K; ++k) s += resp(g, k);
    pi(g) = s / K;
  }
  return pi;
}

std::vector<Matrix> update_group_precisions(
    const Matrix& resp, const std::vector<Matrix>& subject_precisions,
    const TuningParams& tp, const SolverOptions& solver,
    const std::vector<Matrix>* warm) {
  check_responsibilities(resp);
  const int G = static_cast<int>(resp.rows());
  const int K = static_cast<int>(resp.cols());
  if (static_cast<int>(subject_precisions.size()) != K)
    throw InvalidInputError("subject count mismatch");
  if (warm && static_cast<int>(warm->size()) != G)
    throw InvalidInputError("warm start cluster count mismatch");

  const int p = static_cast<int>(subject_precisions.front().rows());
  std::vector<Matrix> out;
  out.reserve(G);
  for (int g = 0; g < G; ++g) {
    const double mass = resp.row(g).sum();
    if (mass < kMassFloor) throw EmptyClusterError(g + 1, 0);
    Matrix avg = Matrix::Zero(p, p);
    for (int k = 0; k < K; ++k)
      avg += (resp(g, k) / mass) * subject_precisions[k];
    symmetrize(avg);
    const double rho = tp.lambda3 / (tp.lambda2 * mass);
    SolverOptions local = solver;
    if (warm) local.warm_start = (*warm)[g];
    out.push_back(covglasso_fit(avg, rho, local));
  }
  return out;
}

Matrix update_responsibilities(const std::vector<Matrix>& subject_precisions,
                               const std::vector<Matrix>& group_precisions,
                               const Vector& weights, double lambda2) {
  const int K = static_cast<int>(subject_precisions.size());
  const int G = static_cast<int>(group_precisions.size());
  if (K < 1 || G < 1) throw InvalidInputError("need subjects and clusters");
  if (weights.size() != G) throw InvalidInputError("weight length mismatch");
  if (weights.minCoeff() < 0.0)
    throw InvalidInputError("weights must be non-negative");

  const int p = static_cast<int>(group_precisions.front().rows());
  std::vector<Matrix> inv0(G);
  std::vector<double> logdet0(G);
  for (int g = 0; g < G; ++g) {
    Eigen::LLT<Matrix> llt(group_precisions[g]);
    if (llt.info() != Eigen::Success)
      throw InvalidInputError("cluster precision is not positive definite");
    inv0[g] = llt.solve(Matrix::Identity(p, p));
    logdet0[g] =
        2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  }

  Matrix resp(G, K);
  Vector logu(G);
  for (int k = 0; k < K; ++k) {
    for (int g = 0; g < G; ++g) {
      if (weights(g) > 0.0) {
        const double tr = inv0[g].cwiseProduct(subject_precisions[k]).sum();
        logu(g) = std::log(weights(g)) - 0.5 * lambda2 * (tr + logdet0[g]);
      } else {
        logu(g) = -std::numeric_limits<double>::infinity();
      }
    }
    const double m = logu.maxCoeff();
    if (!std::isfinite(m))
      throw NumericError("all mixture components vanished for a subject");
    double denom = 0.0;
    for (int g = 0; g < G; ++g) denom += std::exp(logu(g) - m);
    for (int g = 0; g < G; ++g) resp(g, k) = std::exp(logu(g) - m) / denom;
  }
  return resp;
}

std::vector<Matrix> update_subject_precisions(
    const TimeSeriesPanel& panel, const Matrix& resp,
    const std::vector<Matrix>& group_precisions, const TuningParams& tp,
    const SolverOptions& solver, const std::vector<Matrix>* warm) {
  check_responsibilities(resp);
  const int K = panel.num_subjects();
  const int G = static_cast<int>(group_precisions.size());
  if (static_cast<int>(resp.cols()) != K || static_cast<int>(resp.rows()) != G)
    throw InvalidInputError("responsibility shape mismatch");
  if (warm && static_cast<int>(warm->size()) != K)
    throw InvalidInputError("warm start subject count mismatch");

  const int p = panel.p;
  std::vector<Matrix> inv0(G);
  for (int g = 0; g < G; ++g)
    inv0[g] = spd_inverse(group_precisions[g], "cluster precision");

  std::vector<Matrix> out;
  out.reserve(K);
  for (int k = 0; k < K; ++k) {
    const double n_k = panel.subjects[k].n();
    const double denom = n_k + tp.lambda2 - p - 1;
    Matrix blend = n_k * panel.subjects[k].sample_cov;
    for (int g = 0; g < G; ++g) blend += tp.lambda2 * resp(g, k) * inv0[g];
    blend /= denom;
    symmetrize(blend);
    SolverOptions local = solver;
    if (warm) local.warm_start = (*warm)[k];
    out.push_back(glasso_fit(blend, tp.lambda1 / denom, local));
  }
  return out;
}

ModelState initialize_model(const TimeSeriesPanel& panel, const TuningParams& tp,
                            const FitOptions& opts) {
  validate_tuning(tp, panel);
  const int K = panel.num_subjects();
  const int G = tp.groups;
  if (G > K) throw InvalidInputError("more clusters than subjects");

  ModelState state;
  state.subject_precisions.reserve(K);
  for (int k = 0; k < K; ++k)
    state.subject_precisions.push_back(
        glasso_fit(panel.subjects[k].sample_cov, opts.init_glasso_lambda,
                   opts.solver));

  std::vector<int> labels;
  if (opts.init == InitMethod::ward) {
    labels = ward_cluster(frobenius_distance_matrix(state.subject_precisions), G);
  } else {
    // Seeded assignment that always covers every cluster.
    Rng rng = substream(opts.seed, "init");
    const auto order = rng.sample_without_replacement(K, K);
    labels.assign(K, 0);
    for (int i = 0; i < K; ++i)
      labels[order[i]] = (i < G) ? i + 1 : 1 + rng.below(G);
  }

  state.responsibilities = Matrix::Zero(G, K);
  for (int k = 0; k < K; ++k) state.responsibilities(labels[k] - 1, k) = 1.0;
  state.weights = update_pi(state.responsibilities);
  state.group_precisions = update_group_precisions(
      state.responsibilities, state.subject_precisions, tp, opts.solver);
  return state;
}

ModelState rccm_fit(const TimeSeriesPanel& panel, const TuningParams& tp,
                    const FitOptions& opts, const FitObserver& observer,
                    const ModelState* warm_state) {
  validate_tuning(tp, panel);
  ModelState state;
  if (warm_state) {
    const int K = panel.num_subjects();
    if (static_cast<int>(warm_state->subject_precisions.size()) != K ||
        static_cast<int>(warm_state->group_precisions.size()) != tp.groups)
      throw InvalidInputError("warm state shape mismatch");
    state = *warm_state;
    state.iteration = 0;
    state.converged = false;
    state.max_entry_change = std::numeric_limits<double>::infinity();
  } else {
    state = initialize_model(panel, tp, opts);
  }
  if (observer) observer(0, "init", state);

  for (int r = 1; r <= opts.max_em_iterations; ++r) {
    const std::vector<Matrix> prev_subject = state.subject_precisions;
    const std::vector<Matrix> prev_group = state.group_precisions;

    state.weights = update_pi(state.responsibilities);
    if (observer) observer(r, "weights", state);

    try {
      state.group_precisions =
          update_group_precisions(state.responsibilities,
                                  state.subject_precisions, tp, opts.solver,
                                  &prev_group);
    } catch (const EmptyClusterError& e) {
      throw EmptyClusterError(e.cluster(), r);
    }
    if (observer) observer(r, "groups", state);

    state.responsibilities =
        update_responsibilities(state.subject_precisions,
                                state.group_precisions, state.weights,
                                tp.lambda2);
    if (observer) observer(r, "responsibilities", state);

    state.subject_precisions =
        update_subject_precisions(panel, state.responsibilities,
                                  state.group_precisions, tp, opts.solver,
                                  &prev_subject);
    if (observer) observer(r, "subjects", state);

    state.responsibilities =
        update_responsibilities(state.subject_precisions,
                                state.group_precisions, state.weights,
                                tp.lambda2);
    if (observer) observer(r, "responsibilities", state);

    double delta = 0.0;
    for (std::size_t k = 0; k < prev_subject.size(); ++k)
      delta = std::max(delta,
                       max_abs_diff(state.subject_precisions[k], prev_subject[k]));
    for (std::size_t g = 0; g < prev_group.size(); ++g)
      delta = std::max(delta,
                       max_abs_diff(state.group_precisions[g], prev_group[g]));

    state.iteration = r;
    state.max_entry_change = delta;
    if (delta < opts.epsilon) {
      state.converged = true;
      break;
    }
  }
  return state;
}

ModelState rccm_fit_retry(const TimeSeriesPanel& panel, const TuningParams& tp,
                          const FitOptions& opts, int retries) {
  try {
    return rccm_fit(panel, tp, opts);
  } catch (const EmptyClusterError&) {
    if (retries < 1) throw;
  }
  for (int attempt = 1;; ++attempt) {
    FitOptions local = opts;
    local.init = InitMethod::random;
    local.seed = mix64(opts.seed) + static_cast<std::uint64_t>(attempt);
    try {
      return rccm_fit(panel, tp, local);
    } catch (const EmptyClusterError&) {
      if (attempt >= retries) throw;
    }
  }
}

ModelState rccm_fit_multistart(const TimeSeriesPanel& panel,
                               const TuningParams& tp, const FitOptions& opts,
                               int extra_starts) {
  if (extra_starts < 0)
    throw InvalidInputError("extra_starts must be non-negative");
  ModelState best;
  double best_obj = std::numeric_limits<double>::infinity();
  bool have = false;
  for (int s = 0; s <= extra_starts; ++s) {
    FitOptions local = opts;
    if (s > 0) {
      local.init = InitMethod::random;
      local.seed =
          substream(opts.seed, "multistart", static_cast<std::uint64_t>(s))
              .next();
    }
    try {
      ModelState state = rccm_fit(panel, tp, local);
      const double obj = penalized_objective(panel, state, tp);
      if (!have || obj < best_obj) {
        best = std::move(state);
        best_obj = obj;
        have = true;
      }
    } catch (const EmptyClusterError&) {
      if (!have && s == extra_starts) throw;
    }
  }
  return best;
}

std::vector<int> hard_assignments(const ModelState& state) {
  const int G = static_cast<int>(state.responsibilities.rows());
  const int K = static_cast<int>(state.responsibilities.cols());
  std::vector<int> labels(K);
  for (int k = 0; k < K; ++k) {
    int arg = 0;
    double best = state.responsibilities(0, k);
    for (int g = 1; g < G; ++g)
      if (state.responsibilities(g, k) > best) {
        best = state.responsibilities(g, k);
        arg = g;
      }
    labels[k] = arg + 1;
  }
  return labels;
}

double penalized_objective(const TimeSeriesPanel& panel, const ModelState& state,
                           const TuningParams& tp) {
  const int K = panel.num_subjects();
  const int G = static_cast<int>(state.group_precisions.size());
  if (static_cast<int>(state.subject_precisions.size()) != K)
    throw InvalidInputError("subject count mismatch");

  double obj = 0.0;
  for (int g = 0; g < G; ++g)
    obj += tp.lambda3 * offdiag_abs_sum(state.group_precisions[g]);

  for (int k = 0; k < K; ++k) {
    const Matrix& om = state.subject_precisions[k];
    const double n_k = panel.subjects[k].n();
    obj += n_k * (panel.subjects[k].sample_cov.cwiseProduct(om).sum() -
                  log_det_spd(om, "subject precision"));
    obj += tp.lambda1 * offdiag_abs_sum(om);

    // log of the mixture density via log-sum-exp over active components
    double m = -std::numeric_limits<double>::infinity();
    Vector terms(G);
    for (int g = 0; g < G; ++g) {
      if (state.weights(g) > 0.0) {
        terms(g) = std::log(state.weights(g)) +
                   wishart_log_density(om, tp.lambda2, state.group_precisions[g]);
        m = std::max(m, terms(g));
      } else {
        terms(g) = -std::numeric_limits<double>::infinity();
      }
    }
    if (!std::isfinite(m)) return std::numeric_limits<double>::infinity();
    double acc = 0.0;
    for (int g = 0; g < G; ++g)
      if (std::isfinite(terms(g))) acc += std::exp(terms(g) - m);
    obj += -2.0 * (m + std::log(acc));
  }
  return obj;
}

}  // namespace rccm
