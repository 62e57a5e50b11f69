#pragma once

#include <cstdint>
#include <vector>

#include "pmnet/matrix.hpp"

namespace pmnet {

struct ClusterResult {
    Matrix centers;                        // k x D
    std::vector<std::size_t> assignments;  // one per input row
    std::vector<double> sse_history;       // within-cluster SSE after each Lloyd iteration
};

/// Lloyd's algorithm with k-means++ seeding. Deterministic for a given seed;
/// stops when the largest center shift drops below `tol` or after `max_iter`
/// iterations. Throws ArgumentError when there are fewer points than centers.
ClusterResult kmeans(const Matrix& points, std::size_t k, std::uint64_t seed,
                     std::size_t max_iter = 100, double tol = 1e-10);

/// Bottom-up agglomerative clustering with Ward's criterion until k clusters
/// remain; centers are cluster means. Fully deterministic: merge ties are
/// broken by the lowest pair of cluster labels.
ClusterResult agglomerative(const Matrix& points, std::size_t k);

}  // namespace pmnet
