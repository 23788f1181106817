#include "rccm/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>

#include "rccm/clustering.hpp"
#include "rccm/parallel.hpp"
#include "rccm/rng.hpp"

namespace rccm {

EdgeSet edge_set(const Matrix& m, double threshold) {
  require_square(m, "matrix");
  if (!(threshold >= 0.0))
    throw InvalidInputError("threshold must be non-negative");
  EdgeSet s;
  const int p = static_cast<int>(m.rows());
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j)
      if (std::abs(m(i, j)) > threshold) s.insert({i + 1, j + 1});
  return s;
}

TimeSeriesPanel subsample_panel(const TimeSeriesPanel& panel, std::uint64_t seed,
                                int index, bool* used_fallback) {
  if (index < 0) throw InvalidInputError("subsample index must be non-negative");
  bool fallback = false;
  std::vector<Matrix> raws;
  raws.reserve(panel.subjects.size());
  for (int k = 0; k < panel.num_subjects(); ++k) {
    const int n = panel.subjects[k].n();
    int b = static_cast<int>(std::floor(10.0 * std::sqrt(static_cast<double>(n))));
    if (b > n) {
      b = static_cast<int>(std::floor(0.75 * n));
      fallback = true;
    }
    if (b < 2)
      throw InvalidInputError("subject " + std::to_string(k + 1) +
                              " is too short to subsample");
    Rng rng = substream(seed, "subsample",
                        (static_cast<std::uint64_t>(index) << 32) |
                            static_cast<std::uint64_t>(k));
    const auto rows = rng.sample_without_replacement(n, b);
    Matrix sub(b, panel.p);
    for (int i = 0; i < b; ++i) sub.row(i) = panel.subjects[k].data.row(rows[i]);
    raws.push_back(std::move(sub));
  }
  if (used_fallback) *used_fallback = fallback;
  return build_panel(raws, panel.standardized, panel.roi_names);
}

double instability(const std::vector<std::vector<EdgeSet>>& edge_sets, int p) {
  if (edge_sets.empty()) throw InvalidInputError("need at least one subject");
  if (p < 2) throw InvalidInputError("need at least two nodes");
  const double pairs = p * (p - 1) / 2.0;
  double total = 0.0;
  for (const auto& subsets : edge_sets) {
    const int N = static_cast<int>(subsets.size());
    if (N < 2) throw InvalidInputError("need at least two subsamples");
    std::map<Edge, int> counts;
    for (const auto& s : subsets)
      for (const auto& e : s) counts[e]++;
    double xi = 0.0;
    for (const auto& [edge, c] : counts) {
      const double theta = static_cast<double>(c) / N;
      xi += 2.0 * theta * (1.0 - theta);
    }
    total += xi / pairs;
  }
  return total / static_cast<double>(edge_sets.size());
}

std::vector<TuningParams> make_grid(std::vector<TuningParams> candidates) {
  if (candidates.empty()) throw InvalidInputError("grid must be non-empty");
  for (const auto& c : candidates)
    if (c.groups != candidates.front().groups)
      throw InvalidInputError("grid candidates must share one cluster count");
  std::sort(candidates.begin(), candidates.end(),
            [](const TuningParams& a, const TuningParams& b) {
              if (a.lambda1 != b.lambda1) return a.lambda1 < b.lambda1;
              if (a.lambda2 != b.lambda2) return a.lambda2 < b.lambda2;
              return a.lambda3 < b.lambda3;
            });
  for (std::size_t i = 1; i < candidates.size(); ++i)
    if (candidates[i].lambda1 == candidates[i - 1].lambda1 &&
        candidates[i].lambda2 == candidates[i - 1].lambda2 &&
        candidates[i].lambda3 == candidates[i - 1].lambda3)
      throw InvalidInputError("duplicate grid candidate");
  return candidates;
}

namespace {

// One estimator run for a stability candidate: try the inherited warm state,
// then a cold start, then seeded random initializations.
bool fit_rccm_candidate(const TimeSeriesPanel& panel, const TuningParams& tp,
                        const FitOptions& fit, std::uint64_t retry_seed,
                        const ModelState* warm, ModelState* out) {
  if (warm) {
    try {
      *out = rccm_fit(panel, tp, fit, {}, warm);
      return true;
    } catch (const EmptyClusterError&) {
    } catch (const ConvergenceError&) {
    } catch (const NumericError&) {
    }
  }
  FitOptions local = fit;
  local.seed = retry_seed;
  try {
    *out = rccm_fit_retry(panel, tp, local, 2);
    return true;
  } catch (const EmptyClusterError&) {
  } catch (const ConvergenceError&) {
  } catch (const NumericError&) {
  }
  return false;
}

}  // namespace

StabilityReport stars_select(const TimeSeriesPanel& panel,
                             const std::vector<TuningParams>& grid,
                             const StarsConfig& cfg, StarsFitter fitter) {
  const auto candidates = make_grid(grid);
  if (cfg.num_subsamples < 2)
    throw InvalidInputError("need at least two subsamples");
  if (!(cfg.beta > 0.0 && cfg.beta <= 0.5))
    throw InvalidInputError("beta must lie in (0, 0.5]");
  const int K = panel.num_subjects();
  const int p = panel.p;
  if (p < 2) throw InvalidInputError("need at least two variables");
  const int N = cfg.num_subsamples;
  const double pairs = p * (p - 1) / 2.0;

  StabilityReport report;
  std::vector<TimeSeriesPanel> subs;
  subs.reserve(N);
  for (int i = 0; i < N; ++i) {
    bool fb = false;
    subs.push_back(subsample_panel(panel, cfg.seed, i, &fb));
    report.subsample_fallback = report.subsample_fallback || fb;
  }
  for (int k = 0; k < K; ++k)
    report.subsample_sizes.push_back(subs.front().subjects[k].n());

  // Warm starts are carried along the grid, per subsample and for the full
  // panel, so neighbouring candidates start near each other's solutions.
  std::vector<std::unique_ptr<ModelState>> warm_sub(N);
  std::unique_ptr<ModelState> warm_full;
  std::vector<std::vector<Matrix>> warm_g_sub(N);
  std::vector<Matrix> warm_g_full;

  for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
    const TuningParams& tp = candidates[ci];
    StarsCandidate cand;
    cand.params = tp;
    bool failed = false;
    std::vector<std::vector<EdgeSet>> sets(K);
    double full_sparsity = 1.0;

    if (fitter == StarsFitter::rccm) {
      std::vector<ModelState> states(N);
      std::vector<char> ok(N, 0);
      parallel_for(N, cfg.threads, [&](int i) {
        ok[i] = fit_rccm_candidate(subs[i], tp, cfg.fit,
                                   mix64(cfg.seed) ^ (1000u + i),
                                   warm_sub[i].get(), &states[i])
                    ? 1
                    : 0;
      });
      for (int i = 0; i < N; ++i) {
        if (!ok[i]) {
          failed = true;
          break;
        }
        warm_sub[i] = std::make_unique<ModelState>(states[i]);
        for (int k = 0; k < K; ++k)
          sets[k].push_back(edge_set(states[i].subject_precisions[k]));
      }
      if (!failed) {
        ModelState state;
        if (!fit_rccm_candidate(panel, tp, cfg.fit, mix64(cfg.seed) ^ 4242u,
                                warm_full.get(), &state)) {
          failed = true;
        } else {
          warm_full = std::make_unique<ModelState>(state);
          double sp = 0.0;
          for (int k = 0; k < K; ++k)
            sp += 1.0 - edge_set(state.subject_precisions[k]).size() / pairs;
          full_sparsity = sp / K;
        }
      }
    } else {
      auto glasso_all = [&](const TimeSeriesPanel& data,
                            std::vector<Matrix>& warm_set,
                            std::vector<EdgeSet>* out_sets) {
        std::vector<Matrix> ests;
        ests.reserve(K);
        for (int k = 0; k < K; ++k) {
          SolverOptions so = cfg.fit.solver;
          if (static_cast<int>(warm_set.size()) == K) so.warm_start = warm_set[k];
          ests.push_back(glasso_fit(data.subjects[k].sample_cov, tp.lambda1, so));
        }
        warm_set = ests;
        if (out_sets)
          for (int k = 0; k < K; ++k) (*out_sets).push_back(edge_set(ests[k]));
        return ests;
      };
      try {
        std::vector<std::vector<EdgeSet>> per_sub(N);
        parallel_for(N, cfg.threads, [&](int i) {
          glasso_all(subs[i], warm_g_sub[i], &per_sub[i]);
        });
        for (int i = 0; i < N; ++i)
          for (int k = 0; k < K; ++k) sets[k].push_back(per_sub[i][k]);
        const auto full = glasso_all(panel, warm_g_full, nullptr);
        double sp = 0.0;
        for (int k = 0; k < K; ++k)
          sp += 1.0 - edge_set(full[k]).size() / pairs;
        full_sparsity = sp / K;
      } catch (const ConvergenceError&) {
        failed = true;
      } catch (const NumericError&) {
        failed = true;
      }
    }

    if (failed) {
      cand.failed = true;
      cand.instability = 1.0;  // sentinel above the 0.5 ceiling
      cand.mean_sparsity = 1.0;
      cand.feasible = false;
    } else {
      cand.instability = instability(sets, p);
      cand.mean_sparsity = full_sparsity;
      cand.feasible = cand.instability <= cfg.beta;
    }
    report.candidates.push_back(cand);
  }

  int best = -1;
  for (std::size_t i = 0; i < report.candidates.size(); ++i) {
    const auto& c = report.candidates[i];
    if (!c.feasible) continue;
    if (best < 0 || c.mean_sparsity < report.candidates[best].mean_sparsity)
      best = static_cast<int>(i);
  }
  if (best >= 0) {
    report.selected = best;
    report.any_feasible = true;
  } else {
    int arg = 0;
    for (std::size_t i = 1; i < report.candidates.size(); ++i)
      if (report.candidates[i].instability <
          report.candidates[arg].instability)
        arg = static_cast<int>(i);
    report.selected = arg;
    report.any_feasible = false;
  }
  return report;
}

double within_cluster_dispersion(const std::vector<Matrix>& estimates,
                                 const std::vector<int>& labels, int G) {
  if (estimates.empty()) throw InvalidInputError("need at least one estimate");
  if (labels.size() != estimates.size())
    throw InvalidInputError("label count mismatch");
  if (G < 1) throw InvalidInputError("cluster count must be positive");
  const int K = static_cast<int>(estimates.size());
  const int p = static_cast<int>(estimates.front().rows());
  std::vector<int> counts(G, 0);
  for (int k = 0; k < K; ++k) {
    if (labels[k] < 1 || labels[k] > G)
      throw InvalidInputError("labels must lie in 1..G");
    counts[labels[k] - 1]++;
  }
  for (int g = 0; g < G; ++g)
    if (counts[g] == 0)
      throw InvalidInputError("cluster " + std::to_string(g + 1) + " is empty");

  double ss = 0.0;
  for (int g = 0; g < G; ++g) {
    Matrix mean = Matrix::Zero(p, p);
    for (int k = 0; k < K; ++k)
      if (labels[k] == g + 1) mean += estimates[k];
    mean /= counts[g];
    for (int k = 0; k < K; ++k)
      if (labels[k] == g + 1) ss += (estimates[k] - mean).squaredNorm();
  }
  const double arg = std::max(ss / (static_cast<double>(G) * p * p), 1e-12);
  return std::log(arg);
}

Matrix make_positive_definite(const Matrix& m) {
  require_symmetric(m, "matrix");
  const double lmin = min_eigenvalue_sym(m);
  if (lmin >= 1e-3) return m;
  Matrix out = m;
  out.diagonal().array() += 1e-3 - lmin;
  return out;
}

TimeSeriesPanel generate_reference_panel(const TimeSeriesPanel& panel,
                                         const std::vector<Matrix>& estimates,
                                         std::uint64_t seed, int index) {
  const int K = panel.num_subjects();
  const int p = panel.p;
  if (static_cast<int>(estimates.size()) != K)
    throw InvalidInputError("estimate count must match subject count");
  for (const auto& e : estimates)
    if (e.rows() != p || e.cols() != p)
      throw InvalidInputError("estimate dimensions must match the panel");

  Matrix lo = estimates.front();
  Matrix hi = estimates.front();
  for (const auto& e : estimates) {
    lo = lo.cwiseMin(e);
    hi = hi.cwiseMax(e);
  }

  std::vector<Matrix> raws;
  raws.reserve(K);
  for (int k = 0; k < K; ++k) {
    Rng rng = substream(seed, "reference",
                        (static_cast<std::uint64_t>(index) << 32) |
                            static_cast<std::uint64_t>(k));
    Matrix draw(p, p);
    for (int i = 0; i < p; ++i)
      for (int j = i; j < p; ++j) {
        const double v = rng.uniform(lo(i, j), hi(i, j));
        draw(i, j) = v;
        draw(j, i) = v;
      }
    const Matrix prec = make_positive_definite(draw);
    Eigen::LLT<Matrix> llt(prec);
    if (llt.info() != Eigen::Success)
      throw NumericError("reference precision failed to factor");
    const int n = panel.subjects[k].n();
    Matrix x(n, p);
    Vector z(p);
    for (int t = 0; t < n; ++t) {
      for (int j = 0; j < p; ++j) z(j) = rng.normal();
      x.row(t) = llt.matrixU().solve(z).transpose();
    }
    raws.push_back(std::move(x));
  }
  return build_panel(raws, panel.standardized, panel.roi_names);
}

namespace {

// Hard labels that populate every cluster, retrying with seeded random
// initializations when a fit collapses, stalls, or leaves a cluster
// unassigned. Reference panels carry no cluster structure, so above the true
// count the model may refuse to populate every cluster no matter the start;
// after the retries we fall back to Ward labels on the dispersion estimates,
// which always yield a full deterministic G-partition.
std::vector<int> fit_labels(const TimeSeriesPanel& panel, const TuningParams& tp,
                            const FitOptions& base, std::uint64_t seed_tag,
                            const std::vector<Matrix>& fallback_estimates) {
  const int retries = 3;
  for (int attempt = 0; attempt <= retries; ++attempt) {
    FitOptions local = base;
    if (attempt > 0) {
      local.init = InitMethod::random;
      local.seed = mix64(seed_tag) + static_cast<std::uint64_t>(attempt);
    }
    try {
      const ModelState state = rccm_fit(panel, tp, local);
      const auto labels = hard_assignments(state);
      std::vector<bool> seen(tp.groups, false);
      for (int l : labels) seen[l - 1] = true;
      if (std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }))
        return labels;
    } catch (const EmptyClusterError&) {
    } catch (const ConvergenceError&) {
    } catch (const NumericError&) {
    }
  }
  return ward_cluster(frobenius_distance_matrix(fallback_estimates), tp.groups);
}

}  // namespace

GapReport gap_select(const TimeSeriesPanel& panel, const TuningParams& base,
                     const GapConfig& cfg) {
  if (cfg.g_max < 2) throw InvalidInputError("g_max must be at least 2");
  if (cfg.g_max > panel.num_subjects())
    throw InvalidInputError("g_max cannot exceed the subject count");
  if (cfg.num_reference < 1)
    throw InvalidInputError("need at least one reference panel");
  if (!(cfg.reference_glasso_lambda > 0.0))
    throw InvalidInputError("reference penalty must be positive");

  const int K = panel.num_subjects();
  const int B = cfg.num_reference;

  std::vector<Matrix> obs_est;
  obs_est.reserve(K);
  for (int k = 0; k < K; ++k)
    obs_est.push_back(glasso_fit(panel.subjects[k].sample_cov,
                                 cfg.reference_glasso_lambda, cfg.fit.solver));

  std::vector<TimeSeriesPanel> ref_panels(B);
  std::vector<std::vector<Matrix>> ref_est(B);
  parallel_for(B, cfg.threads, [&](int b) {
    ref_panels[b] = generate_reference_panel(panel, obs_est, cfg.seed, b + 1);
    ref_est[b].reserve(K);
    for (int k = 0; k < K; ++k)
      ref_est[b].push_back(glasso_fit(ref_panels[b].subjects[k].sample_cov,
                                      cfg.reference_glasso_lambda,
                                      cfg.fit.solver));
  });

  GapReport report;
  for (int G = 2; G <= cfg.g_max; ++G) {
    TuningParams tp = base;
    tp.groups = G;

    const auto obs_labels =
        fit_labels(panel, tp, cfg.fit,
                   mix64(cfg.seed) ^ (static_cast<std::uint64_t>(G) << 8),
                   obs_est);
    const double v_obs = within_cluster_dispersion(obs_est, obs_labels, G);

    std::vector<double> v_ref(B);
    parallel_for(B, cfg.threads, [&](int b) {
      const auto labels = fit_labels(
          ref_panels[b], tp, cfg.fit,
          mix64(cfg.seed) ^ ((static_cast<std::uint64_t>(G) << 8) + b + 1),
          ref_est[b]);
      v_ref[b] = within_cluster_dispersion(ref_est[b], labels, G);
    });

    double mean_ref = 0.0;
    for (double v : v_ref) mean_ref += v;
    mean_ref /= B;
    double var = 0.0;
    for (double v : v_ref) var += (v - mean_ref) * (v - mean_ref);
    var /= B;

    report.cluster_counts.push_back(G);
    report.observed.push_back(v_obs);
    report.reference.push_back(v_ref);
    report.gap.push_back(mean_ref - v_obs);
    report.sigma.push_back(std::sqrt(var) * std::sqrt(1.0 + 1.0 / B));
  }

  report.selected = cfg.g_max;
  report.rule_satisfied = false;
  for (std::size_t i = 0; i + 1 < report.gap.size(); ++i) {
    if (report.gap[i] >= report.gap[i + 1] - report.sigma[i + 1]) {
      report.selected = report.cluster_counts[i];
      report.rule_satisfied = true;
      break;
    }
  }
  return report;
}

}  // namespace rccm
