#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pmnet {

/// Settings for the self-contained gradient check. The model is deliberately
/// small: central differences visit every scalar parameter twice per loss.
struct GradCheckConfig {
    std::uint64_t seed = 7;
    std::size_t num_seeds = 1;
    double tolerance = 1e-4;
    double epsilon = 1e-5;
    std::size_t feature_dim = 9;
    std::size_t hidden_dim = 12;
    std::size_t embed_dim = 8;
    std::size_t num_classes = 5;
    std::size_t num_scenes = 5;
    std::size_t key_dim = 7;
    std::size_t value_dim = 6;
    std::size_t num_heads = 3;
    std::size_t batch = 4;
    /// Test hook: analytic gradients of matching parameter groups are
    /// perturbed before comparison, so the check must fail.
    std::string corrupt_group;
};

struct GradCheckGroup {
    std::string name;
    double max_rel_error = 0.0;
    std::size_t worst_index = 0;  // flat index of the worst scalar in the group
};

struct GradCheckReport {
    std::vector<GradCheckGroup> groups;
    double worst = 0.0;
    std::string worst_group;
    double tolerance = 1e-4;

    bool passed() const { return worst <= tolerance; }
};

/// Compares every analytic backward pass (cross-entropy, triplet, full
/// predict+BCE in both retrieval modes) against central differences on a
/// random model, aggregating the max relative error per parameter group
/// across seeds. Relative error uses max(|analytic|, |numeric|, 1e-8) as the
/// denominator.
GradCheckReport run_gradcheck(const GradCheckConfig& config);

}  // namespace pmnet
