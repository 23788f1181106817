#pragma once

#include <cstdint>
#include <vector>

#include "rccm/linalg.hpp"

namespace rccm {

// Pairwise Frobenius distances between same-sized matrices.
Matrix frobenius_distance_matrix(const std::vector<Matrix>& mats);

// Agglomerative Ward clustering driven by a precomputed distance matrix.
// Merge costs follow the Lance-Williams recurrence on squared distances; ties
// break toward the pair whose smallest member indices are lexicographically
// least. Returns labels 1..G, numbered by each cluster's smallest member.
std::vector<int> ward_cluster(const Matrix& distances, int G);

// k-means++ with Lloyd iterations on the stacked upper triangles of the input
// matrices. Runs `restarts` seeded restarts and keeps the lowest
// within-cluster sum of squares (earliest restart wins ties).
std::vector<int> kmeans_vectorized(const std::vector<Matrix>& mats, int G,
                                   std::uint64_t seed, int restarts = 10);

}  // namespace rccm
