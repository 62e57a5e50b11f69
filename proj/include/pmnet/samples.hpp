#pragma once

#include <cstddef>
#include <vector>

namespace pmnet {

/// Feature vector with a single class index (one-hot label).
struct SingleSceneSample {
    std::vector<double> features;
    std::size_t scene_index = 0;
};

/// Feature vector with a multi-hot 0/1 label vector over the scene set.
/// An all-zero label vector is legal but unusual; loaders report it.
struct MultiSceneSample {
    std::vector<double> features;
    std::vector<int> labels;
};

}  // namespace pmnet
