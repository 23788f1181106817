#include "rccm/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rccm/rng.hpp"

namespace rccm {

Matrix frobenius_distance_matrix(const std::vector<Matrix>& mats) {
  if (mats.empty()) throw InvalidInputError("need at least one matrix");
  const int K = static_cast<int>(mats.size());
  const auto rows = mats.front().rows();
  const auto cols = mats.front().cols();
  for (const auto& m : mats)
    if (m.rows() != rows || m.cols() != cols)
      throw InvalidInputError("matrices must share dimensions");

  Matrix D = Matrix::Zero(K, K);
  for (int i = 0; i < K; ++i)
    for (int j = i + 1; j < K; ++j) {
      const double d = (mats[i] - mats[j]).norm();
      D(i, j) = d;
      D(j, i) = d;
    }
  return D;
}

namespace {

struct Cluster {
  std::vector<int> members;  // sorted ascending
  int rep() const { return members.front(); }
  int size() const { return static_cast<int>(members.size()); }
};

}  // namespace

std::vector<int> ward_cluster(const Matrix& distances, int G) {
  require_symmetric(distances, "distance matrix");
  const int K = static_cast<int>(distances.rows());
  if (G < 1 || G > K)
    throw InvalidInputError("cluster count must lie in [1, number of items]");
  if (distances.diagonal().cwiseAbs().maxCoeff() > 1e-12)
    throw InvalidInputError("distance matrix needs a zero diagonal");
  if (distances.minCoeff() < 0.0)
    throw InvalidInputError("distances must be non-negative");

  std::vector<Cluster> clusters(K);
  for (int k = 0; k < K; ++k) clusters[k].members = {k};
  Matrix d2 = distances.cwiseProduct(distances);

  while (static_cast<int>(clusters.size()) > G) {
    // Clusters stay ordered by representative, so scanning pairs in index
    // order realizes the lexicographic tie-break.
    int best_a = -1, best_b = -1;
    double best = std::numeric_limits<double>::infinity();
    const int m = static_cast<int>(clusters.size());
    for (int a = 0; a < m; ++a)
      for (int b = a + 1; b < m; ++b)
        if (d2(a, b) < best) {
          best = d2(a, b);
          best_a = a;
          best_b = b;
        }

    const int na = clusters[best_a].size();
    const int nb = clusters[best_b].size();
    Matrix next(m - 1, m - 1);
    std::vector<Cluster> merged;
    merged.reserve(m - 1);

    std::vector<int> keep;  // old indexes surviving, with best_a as the merge slot
    for (int i = 0; i < m; ++i)
      if (i != best_b) keep.push_back(i);

    for (int i = 0; i < m - 1; ++i) {
      for (int j = i + 1; j < m - 1; ++j) {
        const int oi = keep[i], oj = keep[j];
        double v;
        if (oi == best_a || oj == best_a) {
          const int ok = (oi == best_a) ? oj : oi;
          const int nk = clusters[ok].size();
          v = ((na + nk) * d2(best_a, ok) + (nb + nk) * d2(best_b, ok) -
               nk * d2(best_a, best_b)) /
              (na + nb + nk);
        } else {
          v = d2(oi, oj);
        }
        next(i, j) = v;
        next(j, i) = v;
      }
      next(i, i) = 0.0;
    }

    for (int i = 0; i < m; ++i) {
      if (i == best_b) continue;
      Cluster c = clusters[i];
      if (i == best_a) {
        c.members.insert(c.members.end(), clusters[best_b].members.begin(),
                         clusters[best_b].members.end());
        std::sort(c.members.begin(), c.members.end());
      }
      merged.push_back(std::move(c));
    }

    clusters = std::move(merged);
    d2 = std::move(next);
  }

  std::sort(clusters.begin(), clusters.end(),
            [](const Cluster& x, const Cluster& y) { return x.rep() < y.rep(); });
  std::vector<int> labels(K, 0);
  for (int g = 0; g < static_cast<int>(clusters.size()); ++g)
    for (int k : clusters[g].members) labels[k] = g + 1;
  return labels;
}

namespace {

std::vector<Vector> stack_upper_triangles(const std::vector<Matrix>& mats) {
  const int p = static_cast<int>(mats.front().rows());
  const int q = p * (p + 1) / 2;
  std::vector<Vector> ys;
  ys.reserve(mats.size());
  for (const auto& m : mats) {
    Vector y(q);
    int idx = 0;
    for (int i = 0; i < p; ++i)
      for (int j = i; j < p; ++j) y(idx++) = m(i, j);
    ys.push_back(std::move(y));
  }
  return ys;
}

}  // namespace

std::vector<int> kmeans_vectorized(const std::vector<Matrix>& mats, int G,
                                   std::uint64_t seed, int restarts) {
  if (mats.empty()) throw InvalidInputError("need at least one matrix");
  const int K = static_cast<int>(mats.size());
  if (G < 1 || G > K)
    throw InvalidInputError("cluster count must lie in [1, number of items]");
  if (restarts < 1) throw InvalidInputError("need at least one restart");
  for (const auto& m : mats) require_square(m, "input matrix");
  const auto ys = stack_upper_triangles(mats);

  std::vector<int> best_labels;
  double best_wcss = std::numeric_limits<double>::infinity();

  for (int r = 0; r < restarts; ++r) {
    Rng rng = substream(seed, "kmeans", static_cast<std::uint64_t>(r));

    std::vector<Vector> centers;
    centers.push_back(ys[static_cast<std::size_t>(rng.below(K))]);
    std::vector<double> d2(K);
    while (static_cast<int>(centers.size()) < G) {
      double total = 0.0;
      for (int k = 0; k < K; ++k) {
        double dmin = std::numeric_limits<double>::infinity();
        for (const auto& c : centers)
          dmin = std::min(dmin, (ys[k] - c).squaredNorm());
        d2[k] = dmin;
        total += dmin;
      }
      int pick;
      if (total <= 0.0) {
        pick = rng.below(K);
      } else {
        const double target = rng.uniform01() * total;
        double acc = 0.0;
        pick = K - 1;
        for (int k = 0; k < K; ++k) {
          acc += d2[k];
          if (target < acc) {
            pick = k;
            break;
          }
        }
      }
      centers.push_back(ys[static_cast<std::size_t>(pick)]);
    }

    std::vector<int> labels(K, 0);
    for (int iter = 0; iter < 100; ++iter) {
      bool changed = false;
      for (int k = 0; k < K; ++k) {
        int arg = 0;
        double dmin = std::numeric_limits<double>::infinity();
        for (int g = 0; g < G; ++g) {
          const double d = (ys[k] - centers[g]).squaredNorm();
          if (d < dmin) {
            dmin = d;
            arg = g;
          }
        }
        if (labels[k] != arg + 1) {
          labels[k] = arg + 1;
          changed = true;
        }
      }

      std::vector<int> counts(G, 0);
      for (int k = 0; k < K; ++k) counts[labels[k] - 1]++;
      for (int g = 0; g < G; ++g) {
        if (counts[g] > 0) continue;
        // Re-seed an empty cluster with the point farthest from its center.
        int far_k = -1;
        double far_d = -1.0;
        for (int k = 0; k < K; ++k) {
          if (counts[labels[k] - 1] <= 1) continue;
          const double d = (ys[k] - centers[labels[k] - 1]).squaredNorm();
          if (d > far_d) {
            far_d = d;
            far_k = k;
          }
        }
        if (far_k < 0) break;
        counts[labels[far_k] - 1]--;
        labels[far_k] = g + 1;
        counts[g] = 1;
        changed = true;
      }

      for (int g = 0; g < G; ++g) {
        Vector mean = Vector::Zero(ys.front().size());
        int cnt = 0;
        for (int k = 0; k < K; ++k)
          if (labels[k] == g + 1) {
            mean += ys[k];
            ++cnt;
          }
        if (cnt > 0) centers[g] = mean / cnt;
      }
      if (!changed && iter > 0) break;
    }

    double wcss = 0.0;
    for (int k = 0; k < K; ++k)
      wcss += (ys[k] - centers[labels[k] - 1]).squaredNorm();
    if (wcss < best_wcss) {
      best_wcss = wcss;
      best_labels = labels;
    }
  }
  return best_labels;
}

}  // namespace rccm
