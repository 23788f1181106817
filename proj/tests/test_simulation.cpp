#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "rccm/linalg.hpp"
#include "rccm/rng.hpp"
#include "rccm/simulation.hpp"

using namespace rccm;

namespace {

SimulationConfig desk_config(std::uint64_t seed) {
  SimulationConfig cfg;
  cfg.groups = 2;
  cfg.subjects = 20;
  cfg.variables = 10;
  cfg.observations = 150;
  cfg.overlap = 0.2;
  cfg.magnitude = Magnitude::high;
  cfg.seed = seed;
  return cfg;
}

// Pair-counting oracle, written against the contingency identities rather
// than the library's loops.
void pair_counts(const std::vector<int>& a, const std::vector<int>& b,
                 double* same_same, double* same_diff, double* diff_same,
                 double* diff_diff) {
  *same_same = *same_diff = *diff_same = *diff_diff = 0.0;
  const int n = static_cast<int>(a.size());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const bool sa = a[i] == a[j];
      const bool sb = b[i] == b[j];
      if (sa && sb)
        ++*same_same;
      else if (sa)
        ++*same_diff;
      else if (sb)
        ++*diff_same;
      else
        ++*diff_diff;
    }
}

double oracle_rand(const std::vector<int>& a, const std::vector<int>& b) {
  double ss, sd, ds, dd;
  pair_counts(a, b, &ss, &sd, &ds, &dd);
  return (ss + dd) / (ss + sd + ds + dd);
}

double oracle_ari(const std::vector<int>& a, const std::vector<int>& b) {
  double ss, sd, ds, dd;
  pair_counts(a, b, &ss, &sd, &ds, &dd);
  const double denom = (ss + sd) * (sd + dd) + (ss + ds) * (ds + dd);
  if (denom == 0.0) return 1.0;
  return 2.0 * (ss * dd - sd * ds) / denom;
}

}  // namespace

TEST_CASE("generated truths satisfy the structural invariants") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const SimulationConfig cfg = desk_config(seed);
    const NetworkTruth truth = generate_truth(cfg);
    const int E = 7;  // p - floor(sqrt(p)) spokes

    REQUIRE(truth.group_networks.size() == 2);
    REQUIRE(truth.group_precisions.size() == 2);
    REQUIRE(truth.subject_networks.size() == 20);
    REQUIRE(truth.subject_precisions.size() == 20);
    CHECK(std::count(truth.labels.begin(), truth.labels.end(), 1) == 10);
    CHECK(std::count(truth.labels.begin(), truth.labels.end(), 2) == 10);

    for (int g = 0; g < 2; ++g) {
      const auto& m = truth.group_precisions[g];
      CHECK(truth.group_networks[g].size() == E);
      CHECK(is_symmetric(m, 0.0));
      CHECK(cholesky_ok(m));
      CHECK(min_eigenvalue_sym(m) > 0.05);
      for (int i = 0; i < 10; ++i)
        CHECK(m(i, i) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(edge_set(m) == truth.group_networks[g]);
    }

    // Pinned spokes agree in both endpoints and values across clusters.
    EdgeSet shared;
    for (const Edge& e : truth.group_networks[0])
      if (truth.group_networks[1].count(e)) shared.insert(e);
    CHECK(shared.size() == 1);  // floor(0.2 * 7)
    for (const Edge& e : shared)
      CHECK(truth.group_precisions[0](e.first - 1, e.second - 1) ==
            doctest::Approx(
                truth.group_precisions[1](e.first - 1, e.second - 1))
                .epsilon(1e-12));

    for (int k = 0; k < 20; ++k) {
      const auto& m = truth.subject_precisions[k];
      CHECK(is_symmetric(m, 0.0));
      CHECK(cholesky_ok(m));
      CHECK(min_eigenvalue_sym(m) > 0.05);
      for (int i = 0; i < 10; ++i) {
        CHECK(m(i, i) > 0.6);  // diagonal carries the inherited-value noise
        CHECK(m(i, i) < 1.4);
      }
      CHECK(edge_set(m) == truth.subject_networks[k]);

      // Exactly floor(0.2 * E) pairs toggled against the parent network.
      const auto& parent = truth.group_networks[truth.labels[k] - 1];
      int hamming = 0;
      for (const Edge& e : parent) hamming += !truth.subject_networks[k].count(e);
      for (const Edge& e : truth.subject_networks[k]) hamming += !parent.count(e);
      CHECK(hamming == 1);
    }
  }
}

TEST_CASE("variants redraw values but keep the topology") {
  const SimulationConfig cfg = desk_config(77);
  const NetworkTruth a = generate_truth(cfg, 0);
  const NetworkTruth b = generate_truth(cfg, 1);
  CHECK(a.group_networks == b.group_networks);
  CHECK(a.labels == b.labels);
  CHECK(max_abs_diff(a.group_precisions[0], b.group_precisions[0]) > 0.0);

  const NetworkTruth again = generate_truth(cfg, 1);
  CHECK(max_abs_diff(again.group_precisions[0], b.group_precisions[0]) == 0.0);
  CHECK(max_abs_diff(again.subject_precisions[3], b.subject_precisions[3]) ==
        0.0);
}

TEST_CASE("full overlap makes every cluster network identical") {
  SimulationConfig cfg = desk_config(5);
  cfg.overlap = 1.0;
  const NetworkTruth truth = generate_truth(cfg);
  CHECK(truth.group_networks[0] == truth.group_networks[1]);
  CHECK(max_abs_diff(truth.group_precisions[0], truth.group_precisions[1]) ==
        0.0);
}

TEST_CASE("generator rejects invalid configurations") {
  SimulationConfig cfg = desk_config(1);
  cfg.variables = 3;
  CHECK_THROWS_AS(generate_truth(cfg), InvalidInputError);
  cfg = desk_config(1);
  cfg.groups = 4;  // exceeds floor(sqrt(10)) hubs
  CHECK_THROWS_AS(generate_truth(cfg), InvalidInputError);
  cfg = desk_config(1);
  cfg.overlap = 1.5;
  CHECK_THROWS_AS(generate_truth(cfg), InvalidInputError);
  cfg = desk_config(1);
  cfg.cluster_sizes = {5, 5};  // sums to 10, subjects is 20
  CHECK_THROWS_AS(generate_truth(cfg), InvalidInputError);
  cfg = desk_config(1);
  cfg.cluster_sizes = {20};
  CHECK_THROWS_AS(generate_truth(cfg), InvalidInputError);
  CHECK_THROWS_AS(generate_truth(desk_config(1), -1), InvalidInputError);
}

TEST_CASE("sampled panels recover the true correlations at large n") {
  SimulationConfig cfg;
  cfg.groups = 1;
  cfg.subjects = 1;
  cfg.variables = 4;
  cfg.observations = 20000;
  cfg.magnitude = Magnitude::high;
  cfg.seed = 9;
  const NetworkTruth truth = generate_truth(cfg);

  std::vector<Matrix> raw;
  const TimeSeriesPanel panel = sample_panel(truth, 20000, 9, 0, &raw);
  REQUIRE(panel.num_subjects() == 1);
  CHECK(panel.standardized);

  const Matrix sigma = spd_inverse(truth.subject_precisions[0], "truth");
  Matrix corr(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      corr(i, j) = sigma(i, j) / std::sqrt(sigma(i, i) * sigma(j, j));
  CHECK(max_abs_diff(panel.subjects[0].sample_cov, corr) < 0.05);

  // Raw draws keep the unscaled covariance.
  const Matrix centered = raw[0].rowwise() - raw[0].colwise().mean();
  const Matrix raw_cov = centered.transpose() * centered / 20000.0;
  CHECK(max_abs_diff(raw_cov, sigma) < 0.05);

  const TimeSeriesPanel same = sample_panel(truth, 50, 9, 0);
  const TimeSeriesPanel repeat = sample_panel(truth, 50, 9, 0);
  CHECK(max_abs_diff(same.subjects[0].data, repeat.subjects[0].data) == 0.0);
  const TimeSeriesPanel other = sample_panel(truth, 50, 9, 1);
  CHECK(max_abs_diff(same.subjects[0].data, other.subjects[0].data) > 0.0);

  CHECK_THROWS_AS(sample_panel(truth, 1, 9), InvalidInputError);
}

TEST_CASE("rand indices match the pair-counting oracle") {
  Rng rng(1234);
  for (int t = 0; t < 1000; ++t) {
    const int n = 2 + rng.below(11);
    std::vector<int> a(static_cast<std::size_t>(n)), b(a);
    for (int i = 0; i < n; ++i) {
      a[static_cast<std::size_t>(i)] = 1 + rng.below(4);
      b[static_cast<std::size_t>(i)] = 1 + rng.below(4);
    }
    CHECK(rand_index(a, b) == doctest::Approx(oracle_rand(a, b)).epsilon(1e-12));
    CHECK(adjusted_rand_index(a, b) ==
          doctest::Approx(oracle_ari(a, b)).epsilon(1e-12));
  }

  CHECK(rand_index({1, 1, 2, 2}, {2, 2, 1, 1}) == 1.0);
  CHECK(adjusted_rand_index({1, 1, 2, 2}, {2, 2, 1, 1}) == 1.0);
  CHECK(adjusted_rand_index({1, 2, 3}, {1, 2, 3}) == 1.0);  // degenerate denom
  CHECK(rand_index({1, 1, 1, 1}, {1, 1, 1, 2}) == doctest::Approx(0.5));
  CHECK_THROWS_AS(rand_index({1}, {1}), InvalidInputError);
  CHECK_THROWS_AS(rand_index({1, 2}, {1, 2, 3}), InvalidInputError);
}

TEST_CASE("edge metrics match the worked four-node example") {
  const EdgeSet truth = {{1, 2}, {1, 3}};
  const EdgeSet est = {{1, 2}, {2, 4}};
  const EdgeMetrics m = edge_metrics(truth, est, 4);
  CHECK(m.tpr == doctest::Approx(0.5));
  CHECK(m.fpr == doctest::Approx(0.25));
  CHECK(m.ppv == doctest::Approx(0.5));

  const EdgeMetrics empty_truth = edge_metrics({}, est, 4);
  CHECK(empty_truth.tpr == 1.0);
  const EdgeMetrics both_empty = edge_metrics({}, {}, 4);
  CHECK(both_empty.ppv == 1.0);
  CHECK(both_empty.fpr == 0.0);
  const EdgeMetrics none_found = edge_metrics(truth, {}, 4);
  CHECK(none_found.ppv == 0.0);
  CHECK(none_found.tpr == 0.0);
}

TEST_CASE("evaluation matches estimated clusters to true ones by overlap") {
  const SimulationConfig cfg = desk_config(8);
  const NetworkTruth truth = generate_truth(cfg);

  // Relabeled versions of the exact truth should score perfectly.
  std::vector<int> flipped;
  for (int l : truth.labels) flipped.push_back(3 - l);
  std::vector<EdgeSet> swapped_groups = {truth.group_networks[1],
                                         truth.group_networks[0]};
  const EvaluationResult r = evaluate_estimates(
      truth, flipped, truth.subject_networks, &swapped_groups);
  CHECK(r.rand_index == 1.0);
  CHECK(r.adjusted_rand_index == 1.0);
  CHECK(r.tpr_subject == 1.0);
  CHECK(r.fpr_subject == 0.0);
  CHECK(r.ppv_subject == 1.0);
  REQUIRE(r.group.has_value());
  CHECK(r.group->tpr == 1.0);
  CHECK(r.group->fpr == 0.0);

  const EvaluationResult without = evaluate_estimates(
      truth, truth.labels, truth.subject_networks);
  CHECK_FALSE(without.group.has_value());
}

TEST_CASE("baselines cluster an easy high-magnitude panel") {
  SimulationConfig cfg = desk_config(5);
  cfg.subjects = 8;
  cfg.variables = 5;
  const NetworkTruth truth = generate_truth(cfg);
  const TimeSeriesPanel panel = sample_panel(truth, 150, 5, 0);

  const BaselineFit km = glasso_kmeans_baseline(panel, 0.2, 2, 3);
  CHECK(adjusted_rand_index(km.labels, truth.labels) == 1.0);
  REQUIRE(km.subject_precisions.size() == 8);

  const BaselineFit km2 = glasso_kmeans_baseline(panel, 0.2, 2, 3);
  CHECK(km.labels == km2.labels);

  const PooledFit wp = ward_pooled_baseline(panel, 0.2, 2);
  CHECK(adjusted_rand_index(wp.labels, truth.labels) == 1.0);
  REQUIRE(wp.group_precisions.size() == 2);
  for (std::size_t k = 0; k < wp.labels.size(); ++k)
    CHECK(max_abs_diff(
              wp.subject_precisions[k],
              wp.group_precisions[static_cast<std::size_t>(wp.labels[k] - 1)]) ==
          0.0);
}

TEST_CASE("benchmark wires methods, replicates, and summaries together") {
  SimulationConfig cfg = desk_config(5);
  cfg.subjects = 8;
  cfg.variables = 5;
  cfg.observations = 100;

  BenchmarkOptions opts;
  opts.rccm_tuning.lambda2 = 20.0;
  opts.rccm_tuning.lambda1 = 0.02 * (100 + 20 - 6);
  opts.rccm_tuning.lambda3 = 0.8;
  opts.baseline_lambda = 0.2;
  opts.rccm_restarts = 2;

  const std::vector<Method> methods = {Method::rccm, Method::glasso_kmeans,
                                       Method::ward_pooled};
  const BenchmarkResult res = run_benchmark(cfg, 2, methods, opts);

  REQUIRE(res.rows.size() == 3);
  REQUIRE(res.outcomes.size() == 6);
  for (std::size_t i = 0; i < res.rows.size(); ++i) {
    const auto& row = res.rows[i];
    CHECK(row.method == methods[i]);
    CHECK(row.attempted == 2);
    CHECK(row.used <= row.attempted);
    CHECK(row.rand_index.mean >= 0.0);
    CHECK(row.rand_index.mean <= 1.0);
    CHECK(row.fpr_subject.mean >= 0.0);
    CHECK(row.fpr_subject.mean <= 1.0);
  }
  CHECK(res.rows[0].has_group_metrics);
  CHECK_FALSE(res.rows[1].has_group_metrics);
  CHECK(res.rows[2].has_group_metrics);

  const BenchmarkResult rerun = run_benchmark(cfg, 2, methods, opts);
  for (std::size_t i = 0; i < res.outcomes.size(); ++i) {
    CHECK(res.outcomes[i].failed == rerun.outcomes[i].failed);
    CHECK(res.outcomes[i].metrics.rand_index ==
          rerun.outcomes[i].metrics.rand_index);
    CHECK(res.outcomes[i].metrics.tpr_subject ==
          rerun.outcomes[i].metrics.tpr_subject);
  }

  CHECK_THROWS_AS(run_benchmark(cfg, 0, methods, opts), InvalidInputError);
  CHECK_THROWS_AS(run_benchmark(cfg, 1, {}, opts), InvalidInputError);
  BenchmarkOptions stars = opts;
  stars.selection = SelectionMode::stars;
  CHECK_THROWS_AS(run_benchmark(cfg, 1, {Method::rccm}, stars),
                  InvalidInputError);
}

TEST_CASE("method names round-trip") {
  for (Method m : {Method::rccm, Method::glasso_kmeans, Method::ward_pooled})
    CHECK(method_from_name(method_name(m)) == m);
  CHECK_THROWS_AS(method_from_name("mystery"), InvalidInputError);
}
