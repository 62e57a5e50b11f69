#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pmnet/cluster.hpp"
#include "pmnet/embedding.hpp"
#include "pmnet/matrix.hpp"

namespace pmnet {

/// The external memory: one prototype row per scene (k rows per scene in
/// multi-prototype mode), stacked in scene order. Frozen once built; the
/// retrieval phase never touches it.
struct PrototypeMemory {
    Matrix rows;                           // (S*k) x D
    std::vector<std::string> scene_names;  // length S
    std::size_t prototypes_per_scene = 1;
    std::vector<std::size_t> row_to_scene;  // length S*k

    std::size_t scene_count() const { return scene_names.size(); }
    std::size_t row_count() const { return rows.rows(); }
    std::size_t dim() const { return rows.cols(); }

    void validate() const;
};

/// Many-to-many (source class -> target scene) renaming applied before
/// prototype extraction. A source may feed several targets (e.g. the same
/// coastline images yielding both a "beach" and a "sea" prototype) and
/// several sources may merge into one target. Empty means identity.
struct LabelMergeMap {
    std::vector<std::pair<std::string, std::string>> pairs;

    bool empty() const { return pairs.empty(); }

    /// Target scenes a source class contributes to (itself, when unmapped).
    std::vector<std::string> targets_for(const std::string& source) const;
};

/// Parses lines of the form `source -> target`; '#' starts a comment.
LabelMergeMap parse_merge_map(const std::string& text);
LabelMergeMap load_merge_map(const std::string& path);

/// The scene list a memory built from these classes will carry: sorted unique
/// merge targets (the class names themselves under the identity map).
std::vector<std::string> derive_scene_names(const std::vector<std::string>& class_names,
                                            const LabelMergeMap& merge);

/// Component-wise arithmetic mean. Throws ArgumentError on an empty list.
std::vector<double> compute_prototype(const std::vector<std::vector<double>>& embeddings);

enum class PrototypeMethod { mean, kmeans, agglomerative };

PrototypeMethod prototype_method_from_string(const std::string& name);
std::string to_string(PrototypeMethod method);

/// Embeds every single-scene sample, groups the embeddings by target scene
/// (after merging), and extracts k prototypes per scene with the requested
/// method. Row order follows the sorted scene list; a scene's k rows are
/// contiguous. Throws when a scene has fewer than k samples.
PrototypeMemory build_memory(const EmbeddingNet& net,
                             const std::vector<SingleSceneSample>& samples,
                             const std::vector<std::string>& class_names,
                             const LabelMergeMap& merge, std::size_t k, PrototypeMethod method,
                             std::uint64_t seed);

}  // namespace pmnet
