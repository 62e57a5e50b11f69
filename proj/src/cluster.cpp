#include "pmnet/cluster.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "pmnet/error.hpp"
#include "pmnet/rng.hpp"

namespace pmnet {

namespace {

double squared_distance(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

void require_enough_points(const Matrix& points, std::size_t k, const char* op) {
    if (k == 0) throw ArgumentError(std::string(op) + ": k must be >= 1");
    if (points.rows() < k) {
        throw ArgumentError(std::string(op) + ": " + std::to_string(points.rows()) +
                            " points cannot form " + std::to_string(k) + " clusters");
    }
}

/// k-means++: first center uniform, the rest proportional to the squared
/// distance to the nearest chosen center.
Matrix seed_centers(const Matrix& points, std::size_t k, Rng& rng) {
    const std::size_t n = points.rows();
    const std::size_t dim = points.cols();
    Matrix centers(k, dim);
    std::vector<double> nearest(n, std::numeric_limits<double>::infinity());

    std::size_t first = rng.index(n);
    centers.set_row(0, points.row_copy(first));
    for (std::size_t c = 1; c < k; ++c) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = squared_distance(points.row(i), centers.row(c - 1), dim);
            nearest[i] = std::min(nearest[i], d);
            total += nearest[i];
        }
        std::size_t chosen = 0;
        if (total > 0.0) {
            double ticket = rng.uniform() * total;
            for (std::size_t i = 0; i < n; ++i) {
                ticket -= nearest[i];
                if (ticket <= 0.0) {
                    chosen = i;
                    break;
                }
                chosen = i;
            }
        } else {
            chosen = rng.index(n);  // all points coincide with chosen centers
        }
        centers.set_row(c, points.row_copy(chosen));
    }
    return centers;
}

std::size_t nearest_center(const Matrix& centers, const double* point, std::size_t dim) {
    std::size_t best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centers.rows(); ++c) {
        const double d = squared_distance(point, centers.row(c), dim);
        if (d < best_dist) {
            best_dist = d;
            best = c;
        }
    }
    return best;
}

double total_sse(const Matrix& points, const Matrix& centers,
                 const std::vector<std::size_t>& assignments) {
    double sse = 0.0;
    for (std::size_t i = 0; i < points.rows(); ++i) {
        sse += squared_distance(points.row(i), centers.row(assignments[i]), points.cols());
    }
    return sse;
}

}  // namespace

ClusterResult kmeans(const Matrix& points, std::size_t k, std::uint64_t seed,
                     std::size_t max_iter, double tol) {
    require_enough_points(points, k, "kmeans");
    const std::size_t n = points.rows();
    const std::size_t dim = points.cols();

    Rng rng(seed);
    ClusterResult result;
    result.centers = seed_centers(points, k, rng);
    result.assignments.assign(n, 0);

    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        for (std::size_t i = 0; i < n; ++i) {
            result.assignments[i] = nearest_center(result.centers, points.row(i), dim);
        }

        Matrix sums(k, dim);
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t c = result.assignments[i];
            const double* p = points.row(i);
            double* s = sums.row(c);
            for (std::size_t j = 0; j < dim; ++j) s[j] += p[j];
            ++counts[c];
        }
        // An emptied cluster steals the point farthest from its own center.
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] > 0) continue;
            std::size_t farthest = 0;
            double farthest_dist = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (counts[result.assignments[i]] <= 1) continue;
                const double d = squared_distance(points.row(i),
                                                  result.centers.row(result.assignments[i]), dim);
                if (d > farthest_dist) {
                    farthest_dist = d;
                    farthest = i;
                }
            }
            const std::size_t old = result.assignments[farthest];
            const double* p = points.row(farthest);
            for (std::size_t j = 0; j < dim; ++j) {
                sums(old, j) -= p[j];
                sums(c, j) += p[j];
            }
            --counts[old];
            ++counts[c];
            result.assignments[farthest] = c;
        }

        double max_shift = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            double shift = 0.0;
            for (std::size_t j = 0; j < dim; ++j) {
                const double updated = sums(c, j) / static_cast<double>(counts[c]);
                const double d = updated - result.centers(c, j);
                shift += d * d;
                result.centers(c, j) = updated;
            }
            max_shift = std::max(max_shift, shift);
        }

        // Re-evaluate assignments against the moved centers for the SSE trace.
        for (std::size_t i = 0; i < n; ++i) {
            result.assignments[i] = nearest_center(result.centers, points.row(i), dim);
        }
        result.sse_history.push_back(total_sse(points, result.centers, result.assignments));

        if (max_shift < tol * tol) break;
    }
    return result;
}

ClusterResult agglomerative(const Matrix& points, std::size_t k) {
    require_enough_points(points, k, "agglomerative");
    const std::size_t n = points.rows();
    const std::size_t dim = points.cols();

    struct Cluster {
        std::size_t label;  // lowest original point index inside
        std::size_t count;
        std::vector<double> mean;
        std::vector<std::size_t> members;
    };
    std::vector<Cluster> clusters;
    clusters.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        clusters.push_back({i, 1, points.row_copy(i), {i}});
    }

    while (clusters.size() > k) {
        // Ward merge cost: |A||B| / (|A|+|B|) * ||mean_A - mean_B||^2.
        double best_cost = std::numeric_limits<double>::infinity();
        std::size_t best_a = 0;
        std::size_t best_b = 1;
        for (std::size_t a = 0; a < clusters.size(); ++a) {
            for (std::size_t b = a + 1; b < clusters.size(); ++b) {
                const double na = static_cast<double>(clusters[a].count);
                const double nb = static_cast<double>(clusters[b].count);
                const double cost = na * nb / (na + nb) *
                                    squared_distance(clusters[a].mean.data(),
                                                     clusters[b].mean.data(), dim);
                const auto pair_key = [&](std::size_t x, std::size_t y) {
                    return std::minmax(clusters[x].label, clusters[y].label);
                };
                const bool better = cost < best_cost ||
                                    (cost == best_cost && pair_key(a, b) < pair_key(best_a, best_b));
                if (better) {
                    best_cost = cost;
                    best_a = a;
                    best_b = b;
                }
            }
        }
        Cluster& a = clusters[best_a];
        Cluster& b = clusters[best_b];
        const double na = static_cast<double>(a.count);
        const double nb = static_cast<double>(b.count);
        for (std::size_t j = 0; j < dim; ++j) {
            a.mean[j] = (na * a.mean[j] + nb * b.mean[j]) / (na + nb);
        }
        a.count += b.count;
        a.label = std::min(a.label, b.label);
        a.members.insert(a.members.end(), b.members.begin(), b.members.end());
        clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(best_b));
    }

    std::sort(clusters.begin(), clusters.end(),
              [](const Cluster& a, const Cluster& b) { return a.label < b.label; });

    ClusterResult result;
    result.centers = Matrix(k, dim);
    result.assignments.assign(n, 0);
    for (std::size_t c = 0; c < clusters.size(); ++c) {
        result.centers.set_row(c, clusters[c].mean);
        for (std::size_t member : clusters[c].members) result.assignments[member] = c;
    }
    return result;
}

}  // namespace pmnet
