#include "rccm/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>

#include "rccm/clustering.hpp"
#include "rccm/rng.hpp"

namespace rccm {

namespace {

double draw_magnitude(Rng& rng, Magnitude mag) {
  double v = rng.uniform(0.5, 1.0);
  if (rng.uniform01() < 0.5) v = -v;
  return mag == Magnitude::low ? v / 3.0 : v;
}

int row_nonzero_count(const Matrix& m, int i) {
  int c = 0;
  for (int j = 0; j < m.cols(); ++j)
    if (m(i, j) != 0.0) ++c;
  return c;
}

void divide_rows_and_symmetrize(Matrix& m, const std::vector<int>& counts) {
  const Vector diag = m.diagonal();
  for (int i = 0; i < m.rows(); ++i) m.row(i) /= static_cast<double>(counts[i]);
  m = ((m + m.transpose()) * 0.5).eval();
  // Shrinks the couplings toward diagonal dominance; variances stay put.
  m.diagonal() = diag;
}

// Division rounds can stop at a barely-positive-definite matrix whose inverse
// has enormous variances, which after centering/scaling buries the network
// signal in estimation noise. The shift step keeps every matrix invertible at
// a sane scale without touching off-diagonal values or edge sets.
constexpr double kMinTruthEigenvalue = 0.25;

// Row division by nonzero counts, re-symmetrized, for a batch of matrices
// sharing one divisor per row; an eigenvalue shift then enforces the
// conditioning floor on any matrix the division rounds left close to singular.
void repair_batch(std::vector<Matrix>& mats) {
  const int p = static_cast<int>(mats.front().rows());
  auto all_pd = [&] {
    return std::all_of(mats.begin(), mats.end(),
                       [](const Matrix& m) { return cholesky_ok(m); });
  };
  std::vector<int> counts(p);
  for (int i = 0; i < p; ++i) {
    int c = 0;
    for (const auto& m : mats) c = std::max(c, row_nonzero_count(m, i));
    counts[i] = std::max(c, 1);
  }
  for (int round = 0; round < 3 && !all_pd(); ++round)
    for (auto& m : mats) divide_rows_and_symmetrize(m, counts);
  // One shift for the whole batch: shifting and renormalizing every matrix by
  // the same amount keeps the diagonal at one, avoids inflated variances, and
  // leaves values pinned across cluster matrices equal.
  double shift = 0.0;
  for (const auto& m : mats)
    shift = std::max(shift, kMinTruthEigenvalue - min_eigenvalue_sym(m));
  if (shift > 0.0)
    for (auto& m : mats) {
      m.diagonal().array() += shift;
      m /= 1.0 + shift;
    }
}

void repair_single(Matrix& m) {
  std::vector<Matrix> one;
  one.push_back(std::move(m));
  repair_batch(one);
  m = std::move(one.front());
}

int isqrt_floor(int p) {
  int h = static_cast<int>(std::floor(std::sqrt(static_cast<double>(p))));
  while ((h + 1) * (h + 1) <= p) ++h;
  while (h * h > p) --h;
  return h;
}

Edge ordered_edge(int i, int j) {  // 0-based in, 1-based out
  return i < j ? Edge{i + 1, j + 1} : Edge{j + 1, i + 1};
}

}  // namespace

NetworkTruth generate_truth(const SimulationConfig& cfg, int variant) {
  const int p = cfg.variables;
  const int G = cfg.groups;
  const int K = cfg.subjects;
  if (p < 4) throw InvalidInputError("need at least four variables");
  if (G < 1) throw InvalidInputError("need at least one cluster");
  if (K < G) throw InvalidInputError("need at least one subject per cluster");
  if (!(cfg.overlap >= 0.0 && cfg.overlap <= 1.0))
    throw InvalidInputError("overlap must lie in [0, 1]");
  if (!(cfg.perturbation_rate >= 0.0 && cfg.perturbation_rate <= 1.0))
    throw InvalidInputError("perturbation rate must lie in [0, 1]");
  if (!(cfg.noise_sd >= 0.0))
    throw InvalidInputError("noise level must be non-negative");
  if (variant < 0) throw InvalidInputError("variant must be non-negative");

  const int H = isqrt_floor(p);
  const int E = p - H;
  if (G > H)
    throw InvalidInputError(
        "cluster count cannot exceed floor(sqrt(p)) hubs; exact cross-cluster "
        "edge sharing needs one distinct hub rotation per cluster");

  std::vector<int> sizes = cfg.cluster_sizes;
  if (sizes.empty()) {
    sizes.assign(G, K / G);
    for (int g = 0; g < K % G; ++g) sizes[g]++;
  }
  if (static_cast<int>(sizes.size()) != G)
    throw InvalidInputError("cluster size list length must equal the cluster count");
  int total = 0;
  for (int s : sizes) {
    if (s < 1) throw InvalidInputError("cluster sizes must be positive");
    total += s;
  }
  if (total != K)
    throw InvalidInputError("cluster sizes must sum to the subject count");

  // Hub layout: contiguous blocks, hub first. One spoke per non-hub node.
  std::vector<int> hub(H), block_of_spoke(E), member_of_spoke(E);
  {
    int node = 0, t = 0;
    for (int b = 0; b < H; ++b) {
      const int size = p / H + (b < p % H ? 1 : 0);
      hub[b] = node;
      for (int m = 1; m < size; ++m) {
        block_of_spoke[t] = b;
        member_of_spoke[t] = node + m;
        ++t;
      }
      node += size;
    }
  }

  const int s_shared = static_cast<int>(std::floor(cfg.overlap * E));
  Rng net_rng = substream(cfg.seed, "networks");
  std::vector<bool> shared(E, false);
  {
    auto picks = net_rng.sample_without_replacement(E, s_shared);
    for (int t : picks) shared[t] = true;
  }
  std::vector<int> offset(E, 0);
  for (int t = 0; t < E; ++t)
    if (!shared[t]) offset[t] = net_rng.below(H);

  // Per-cluster endpoints of every spoke. Each non-hub node appears in
  // exactly one spoke, so edges within and across clusters can only coincide
  // on purpose (the shared positions).
  std::vector<std::vector<std::pair<int, int>>> endpoints(G);
  NetworkTruth truth;
  truth.group_networks.resize(G);
  for (int g = 0; g < G; ++g) {
    endpoints[g].reserve(E);
    for (int t = 0; t < E; ++t) {
      const int b = block_of_spoke[t];
      const int h = shared[t] ? hub[b] : hub[(b + offset[t] + g) % H];
      endpoints[g].push_back({h, member_of_spoke[t]});
      truth.group_networks[g].insert(ordered_edge(h, member_of_spoke[t]));
    }
  }

  Rng val_rng = substream(cfg.seed, "values", static_cast<std::uint64_t>(variant));
  std::vector<double> shared_value(E, 0.0);
  for (int t = 0; t < E; ++t)
    if (shared[t]) shared_value[t] = draw_magnitude(val_rng, cfg.magnitude);

  truth.group_precisions.assign(G, Matrix::Identity(p, p));
  for (int g = 0; g < G; ++g)
    for (int t = 0; t < E; ++t) {
      const double v =
          shared[t] ? shared_value[t] : draw_magnitude(val_rng, cfg.magnitude);
      const auto [i, j] = endpoints[g][t];
      truth.group_precisions[g](i, j) = v;
      truth.group_precisions[g](j, i) = v;
    }
  repair_batch(truth.group_precisions);

  truth.labels.reserve(K);
  for (int g = 0; g < G; ++g)
    truth.labels.insert(truth.labels.end(), sizes[g], g + 1);

  const int n_pairs = p * (p - 1) / 2;
  const int n_toggles = static_cast<int>(std::floor(cfg.perturbation_rate * E));
  std::vector<Edge> pair_table;
  pair_table.reserve(n_pairs);
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j) pair_table.push_back({i, j});

  Rng subj_rng =
      substream(cfg.seed, "subjects", static_cast<std::uint64_t>(variant));
  truth.subject_networks.resize(K);
  truth.subject_precisions.reserve(K);
  for (int k = 0; k < K; ++k) {
    const int g = truth.labels[k] - 1;
    EdgeSet net = truth.group_networks[g];
    Matrix m = truth.group_precisions[g];

    auto toggle_idx = subj_rng.sample_without_replacement(n_pairs, n_toggles);
    std::sort(toggle_idx.begin(), toggle_idx.end());
    std::set<Edge> added;
    for (int idx : toggle_idx) {
      const auto [i, j] = pair_table[idx];
      const Edge e = ordered_edge(i, j);
      if (net.count(e)) {
        net.erase(e);
        m(i, j) = 0.0;
        m(j, i) = 0.0;
      } else {
        net.insert(e);
        const double v = draw_magnitude(subj_rng, cfg.magnitude);
        m(i, j) = v;
        m(j, i) = v;
        added.insert(e);
      }
    }
    for (int i = 0; i < p; ++i)
      for (int j = i; j < p; ++j) {
        if (m(i, j) == 0.0) continue;
        if (i != j && added.count({i + 1, j + 1})) continue;
        const double noisy = m(i, j) + cfg.noise_sd * subj_rng.normal();
        m(i, j) = noisy;
        m(j, i) = noisy;
      }
    repair_single(m);
    truth.subject_networks[k] = std::move(net);
    truth.subject_precisions.push_back(std::move(m));
  }
  return truth;
}

TimeSeriesPanel sample_panel(const NetworkTruth& truth, int n, std::uint64_t seed,
                             int variant, std::vector<Matrix>* raw_out) {
  if (truth.subject_precisions.empty())
    throw InvalidInputError("truth holds no subjects");
  if (n < 2) throw InvalidInputError("need at least two observations");
  const int p = static_cast<int>(truth.subject_precisions.front().rows());

  std::vector<Matrix> raws;
  raws.reserve(truth.subject_precisions.size());
  for (std::size_t k = 0; k < truth.subject_precisions.size(); ++k) {
    Eigen::LLT<Matrix> llt(truth.subject_precisions[k]);
    if (llt.info() != Eigen::Success)
      throw InvalidInputError("subject precision is not positive definite");
    Rng rng = substream(seed, "panel",
                        (static_cast<std::uint64_t>(variant) << 32) |
                            static_cast<std::uint64_t>(k));
    Matrix x(n, p);
    Vector z(p);
    for (int t = 0; t < n; ++t) {
      for (int j = 0; j < p; ++j) z(j) = rng.normal();
      x.row(t) = llt.matrixU().solve(z).transpose();
    }
    raws.push_back(std::move(x));
  }
  if (raw_out) *raw_out = raws;
  return build_panel(raws, true);
}

namespace {

void check_labels(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) throw InvalidInputError("label lengths differ");
  if (a.size() < 2) throw InvalidInputError("need at least two items");
}

double choose2(double n) { return n * (n - 1) / 2.0; }

}  // namespace

double rand_index(const std::vector<int>& a, const std::vector<int>& b) {
  check_labels(a, b);
  const int n = static_cast<int>(a.size());
  int agree = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if ((a[i] == a[j]) == (b[i] == b[j])) ++agree;
  return agree / choose2(n);
}

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
  check_labels(a, b);
  const int n = static_cast<int>(a.size());
  std::map<std::pair<int, int>, int> cell;
  std::map<int, int> row, col;
  for (int i = 0; i < n; ++i) {
    cell[{a[i], b[i]}]++;
    row[a[i]]++;
    col[b[i]]++;
  }
  double idx = 0.0, ra = 0.0, rb = 0.0;
  for (const auto& [key, c] : cell) idx += choose2(c);
  for (const auto& [key, c] : row) ra += choose2(c);
  for (const auto& [key, c] : col) rb += choose2(c);
  const double expected = ra * rb / choose2(n);
  const double maximum = 0.5 * (ra + rb);
  const double denom = maximum - expected;
  if (std::abs(denom) < 1e-15) return 1.0;  // both partitions degenerate alike
  return (idx - expected) / denom;
}

EdgeMetrics edge_metrics(const EdgeSet& truth, const EdgeSet& est, int p) {
  if (p < 2) throw InvalidInputError("need at least two nodes");
  auto check = [p](const EdgeSet& s) {
    for (const auto& [i, j] : s)
      if (i < 1 || j <= i || j > p)
        throw InvalidInputError("edge endpoints must satisfy 1 <= i < j <= p");
  };
  check(truth);
  check(est);

  const double possible = choose2(p);
  double tp = 0.0;
  for (const auto& e : est) tp += truth.count(e) ? 1.0 : 0.0;
  const double fp = static_cast<double>(est.size()) - tp;

  EdgeMetrics m;
  m.tpr = truth.empty() ? 1.0 : tp / static_cast<double>(truth.size());
  const double neg = possible - static_cast<double>(truth.size());
  m.fpr = neg > 0.0 ? fp / neg : 0.0;
  if (est.empty())
    m.ppv = truth.empty() ? 1.0 : 0.0;
  else
    m.ppv = tp / static_cast<double>(est.size());
  return m;
}

EvaluationResult evaluate_estimates(const NetworkTruth& truth,
                                    const std::vector<int>& est_labels,
                                    const std::vector<EdgeSet>& est_subject_networks,
                                    const std::vector<EdgeSet>* est_group_networks) {
  const int K = static_cast<int>(truth.labels.size());
  if (static_cast<int>(est_labels.size()) != K ||
      static_cast<int>(est_subject_networks.size()) != K)
    throw InvalidInputError("estimate counts must match the truth");
  const int p = static_cast<int>(truth.subject_precisions.front().rows());

  EvaluationResult out;
  out.rand_index = rand_index(truth.labels, est_labels);
  out.adjusted_rand_index = adjusted_rand_index(truth.labels, est_labels);

  double tpr = 0.0, fpr = 0.0, ppv = 0.0;
  for (int k = 0; k < K; ++k) {
    const auto m = edge_metrics(truth.subject_networks[k],
                                est_subject_networks[k], p);
    tpr += m.tpr;
    fpr += m.fpr;
    ppv += m.ppv;
  }
  out.tpr_subject = tpr / K;
  out.fpr_subject = fpr / K;
  out.ppv_subject = ppv / K;

  if (est_group_networks) {
    const int Gt = static_cast<int>(truth.group_networks.size());
    const int Ge = static_cast<int>(est_group_networks->size());
    EdgeMetrics acc;
    int used = 0;
    for (int g = 0; g < Ge; ++g) {
      // Match the estimated cluster to the true cluster sharing the most
      // members; empty estimated clusters are skipped.
      std::vector<int> overlap(Gt, 0);
      int members = 0;
      for (int k = 0; k < K; ++k)
        if (est_labels[k] == g + 1) {
          overlap[truth.labels[k] - 1]++;
          ++members;
        }
      if (members == 0) continue;
      const int match = static_cast<int>(
          std::max_element(overlap.begin(), overlap.end()) - overlap.begin());
      const auto m =
          edge_metrics(truth.group_networks[match], (*est_group_networks)[g], p);
      acc.tpr += m.tpr;
      acc.fpr += m.fpr;
      acc.ppv += m.ppv;
      ++used;
    }
    if (used > 0) {
      acc.tpr /= used;
      acc.fpr /= used;
      acc.ppv /= used;
      out.group = acc;
    }
  }
  return out;
}

BaselineFit glasso_kmeans_baseline(const TimeSeriesPanel& panel, double lambda,
                                   int G, std::uint64_t seed, int restarts,
                                   const SolverOptions& solver) {
  BaselineFit fit;
  fit.subject_precisions.reserve(panel.subjects.size());
  for (const auto& s : panel.subjects)
    fit.subject_precisions.push_back(glasso_fit(s.sample_cov, lambda, solver));
  fit.labels = kmeans_vectorized(fit.subject_precisions, G, seed, restarts);
  return fit;
}

PooledFit ward_pooled_baseline(const TimeSeriesPanel& panel, double lambda,
                               int G, const SolverOptions& solver) {
  PooledFit fit;
  std::vector<Matrix> per_subject;
  per_subject.reserve(panel.subjects.size());
  for (const auto& s : panel.subjects)
    per_subject.push_back(glasso_fit(s.sample_cov, lambda, solver));
  fit.labels = ward_cluster(frobenius_distance_matrix(per_subject), G);

  const int p = panel.p;
  fit.group_precisions.reserve(G);
  for (int g = 0; g < G; ++g) {
    Matrix pooled = Matrix::Zero(p, p);
    double weight = 0.0;
    for (int k = 0; k < panel.num_subjects(); ++k)
      if (fit.labels[k] == g + 1) {
        pooled += panel.subjects[k].n() * panel.subjects[k].sample_cov;
        weight += panel.subjects[k].n();
      }
    if (weight <= 0.0) throw EmptyClusterError(g + 1, 0);
    pooled /= weight;
    fit.group_precisions.push_back(glasso_fit(pooled, lambda, solver));
  }
  fit.subject_precisions.reserve(panel.subjects.size());
  for (int k = 0; k < panel.num_subjects(); ++k)
    fit.subject_precisions.push_back(fit.group_precisions[fit.labels[k] - 1]);
  return fit;
}

const char* method_name(Method m) {
  switch (m) {
    case Method::rccm:
      return "rccm";
    case Method::glasso_kmeans:
      return "glasso_kmeans";
    case Method::ward_pooled:
      return "ward_pooled";
  }
  return "unknown";
}

Method method_from_name(const std::string& name) {
  if (name == "rccm") return Method::rccm;
  if (name == "glasso_kmeans") return Method::glasso_kmeans;
  if (name == "ward_pooled") return Method::ward_pooled;
  throw InvalidInputError("unknown method '" + name +
                          "' (expected rccm, glasso_kmeans, or ward_pooled)");
}

namespace {

std::uint64_t derived_seed(std::uint64_t seed, std::string_view name,
                           std::uint64_t index) {
  return substream(seed, name, index).next();
}

MetricSummary summarize(const std::vector<double>& xs) {
  MetricSummary s;
  if (xs.empty()) return s;
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  s.mean = mean;
  if (xs.size() > 1) {
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    s.sd = std::sqrt(var / (static_cast<double>(xs.size()) - 1.0));
  }
  return s;
}

std::vector<EdgeSet> edge_sets_of(const std::vector<Matrix>& mats) {
  std::vector<EdgeSet> out;
  out.reserve(mats.size());
  for (const auto& m : mats) out.push_back(edge_set(m));
  return out;
}

}  // namespace

BenchmarkResult run_benchmark(const SimulationConfig& cfg, int replicates,
                              const std::vector<Method>& methods,
                              const BenchmarkOptions& opts) {
  if (replicates < 1) throw InvalidInputError("need at least one replicate");
  if (methods.empty()) throw InvalidInputError("need at least one method");
  if (opts.selection == SelectionMode::stars) {
    const bool needs_rccm =
        std::find(methods.begin(), methods.end(), Method::rccm) != methods.end();
    if (needs_rccm && opts.rccm_grid.empty())
      throw InvalidInputError("stars selection needs a tuning grid");
    const bool needs_baseline = methods.size() > (needs_rccm ? 1u : 0u);
    if (needs_baseline && opts.baseline_grid.empty())
      throw InvalidInputError("stars selection needs a baseline penalty grid");
  }

  BenchmarkResult result;
  std::map<Method, std::vector<EvaluationResult>> collected;

  for (int r = 1; r <= replicates; ++r) {
    const NetworkTruth truth = generate_truth(cfg, r - 1);
    const TimeSeriesPanel panel =
        sample_panel(truth, cfg.observations, cfg.seed, r);

    // Tuning for this replicate, shared across methods.
    TuningParams rccm_tp = opts.rccm_tuning;
    rccm_tp.groups = cfg.groups;
    double baseline_lambda = opts.baseline_lambda;
    bool selection_failed = false;
    std::string selection_error;
    if (opts.selection == SelectionMode::stars) {
      try {
        if (std::find(methods.begin(), methods.end(), Method::rccm) !=
            methods.end()) {
          std::vector<TuningParams> grid = opts.rccm_grid;
          for (auto& c : grid) c.groups = cfg.groups;
          StarsConfig sc = opts.stars;
          sc.fit = opts.fit;
          sc.seed = derived_seed(cfg.seed, "stars-rccm", r);
          const auto rep = stars_select(panel, grid, sc, StarsFitter::rccm);
          rccm_tp = rep.candidates[rep.selected].params;
        }
        if (methods.size() > 1 ||
            std::find(methods.begin(), methods.end(), Method::rccm) ==
                methods.end()) {
          std::vector<TuningParams> grid;
          for (double l : opts.baseline_grid) {
            TuningParams t;
            t.lambda1 = l;
            t.groups = 1;
            grid.push_back(t);
          }
          StarsConfig sc = opts.stars;
          sc.fit = opts.fit;
          sc.seed = derived_seed(cfg.seed, "stars-baseline", r);
          const auto rep =
              stars_select(panel, grid, sc, StarsFitter::glasso_per_subject);
          baseline_lambda = rep.candidates[rep.selected].params.lambda1;
        }
      } catch (const std::exception& e) {
        selection_failed = true;
        selection_error = e.what();
      }
    }

    for (Method method : methods) {
      ReplicateOutcome outcome;
      outcome.replicate = r;
      outcome.method = method;
      outcome.selected_tuning = rccm_tp;
      if (method != Method::rccm) {
        outcome.selected_tuning = TuningParams{};
        outcome.selected_tuning.lambda1 = baseline_lambda;
        outcome.selected_tuning.groups = cfg.groups;
      }
      if (selection_failed) {
        outcome.failed = true;
        outcome.failure = "tuning selection failed: " + selection_error;
        result.outcomes.push_back(outcome);
        continue;
      }
      try {
        switch (method) {
          case Method::rccm: {
            FitOptions fo = opts.fit;
            fo.seed = derived_seed(cfg.seed, "fit", r);
            const ModelState state =
                rccm_fit_multistart(panel, rccm_tp, fo, opts.rccm_restarts);
            const auto groups_est = edge_sets_of(state.group_precisions);
            outcome.metrics = evaluate_estimates(
                truth, hard_assignments(state),
                edge_sets_of(state.subject_precisions), &groups_est);
            break;
          }
          case Method::glasso_kmeans: {
            const auto fit = glasso_kmeans_baseline(
                panel, baseline_lambda, cfg.groups,
                derived_seed(cfg.seed, "kmeans", r), opts.kmeans_restarts,
                opts.fit.solver);
            outcome.metrics =
                evaluate_estimates(truth, fit.labels,
                                   edge_sets_of(fit.subject_precisions));
            break;
          }
          case Method::ward_pooled: {
            const auto fit = ward_pooled_baseline(panel, baseline_lambda,
                                                  cfg.groups, opts.fit.solver);
            const auto groups_est = edge_sets_of(fit.group_precisions);
            outcome.metrics = evaluate_estimates(
                truth, fit.labels, edge_sets_of(fit.subject_precisions),
                &groups_est);
            break;
          }
        }
        collected[method].push_back(outcome.metrics);
      } catch (const std::exception& e) {
        outcome.failed = true;
        outcome.failure = e.what();
      }
      result.outcomes.push_back(outcome);
    }
  }

  for (Method method : methods) {
    MethodSummary row;
    row.method = method;
    row.attempted = replicates;
    const auto& evals = collected[method];
    row.used = static_cast<int>(evals.size());
    auto pull = [&](auto getter) {
      std::vector<double> xs;
      xs.reserve(evals.size());
      for (const auto& e : evals) xs.push_back(getter(e));
      return summarize(xs);
    };
    row.rand_index = pull([](const EvaluationResult& e) { return e.rand_index; });
    row.adjusted_rand_index =
        pull([](const EvaluationResult& e) { return e.adjusted_rand_index; });
    row.tpr_subject = pull([](const EvaluationResult& e) { return e.tpr_subject; });
    row.fpr_subject = pull([](const EvaluationResult& e) { return e.fpr_subject; });
    row.ppv_subject = pull([](const EvaluationResult& e) { return e.ppv_subject; });
    std::vector<double> gt, gf, gp;
    for (const auto& e : evals)
      if (e.group) {
        gt.push_back(e.group->tpr);
        gf.push_back(e.group->fpr);
        gp.push_back(e.group->ppv);
      }
    if (!gt.empty()) {
      row.has_group_metrics = true;
      row.tpr_group = summarize(gt);
      row.fpr_group = summarize(gf);
      row.ppv_group = summarize(gp);
    }
    result.rows.push_back(row);
  }
  return result;
}

}  // namespace rccm
