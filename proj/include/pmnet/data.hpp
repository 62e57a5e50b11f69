#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pmnet/samples.hpp"
#include "pmnet/trainer.hpp"

namespace pmnet {

/// One row of a feature table: a unique id, F features, and zero or more
/// label names (one for single-scene tables, any number for multi-scene).
struct FeatureRow {
    std::string id;
    std::vector<double> features;
    std::vector<std::string> labels;
    std::size_t line = 0;  // 1-based line in the source file, for messages
};

/// Delimited text table with a mandatory `id,f0..f{F-1},labels` header.
/// Multiple labels are joined with ';' inside the labels column.
struct FeatureTable {
    std::size_t feature_dim = 0;
    std::vector<FeatureRow> rows;
};

FeatureTable parse_feature_table(const std::string& text, const std::string& origin = "table");
FeatureTable load_feature_table(const std::string& path);

std::string feature_table_text(const FeatureTable& table);
void save_feature_table(const FeatureTable& table, const std::string& path);

/// Single-scene view: every row must carry exactly one label. Returns the
/// samples plus the sorted class-name list their indices refer to.
std::pair<std::vector<SingleSceneSample>, std::vector<std::string>> to_single_samples(
    const FeatureTable& table);

/// Multi-scene view against a fixed scene list; unknown labels are parse
/// errors. `unlabeled` (optional) counts rows with no labels at all.
std::vector<MultiSceneSample> to_multi_samples(const FeatureTable& table,
                                               const std::vector<std::string>& scene_names,
                                               std::size_t* unlabeled = nullptr);

FeatureTable table_from_single(const std::vector<SingleSceneSample>& samples,
                               const std::vector<std::string>& class_names,
                               const std::string& id_prefix);
FeatureTable table_from_multi(const std::vector<MultiSceneSample>& samples,
                              const std::vector<std::string>& scene_names,
                              const std::string& id_prefix);

enum class Combine { sum, average };

Combine combine_from_string(const std::string& name);
std::string to_string(Combine combine);

/// Synthetic benchmark generator: abundant single-scene samples around
/// well-separated Gaussian scene centers, scarce multi-scene samples whose
/// features superpose the centers of their scene sets.
struct SynthConfig {
    std::size_t num_scenes = 8;
    std::size_t feature_dim = 16;
    std::size_t samples_per_scene = 100;
    std::size_t num_multiscene = 90;
    std::size_t num_multiscene_test = 0;
    std::size_t scenes_per_image_min = 1;
    std::size_t scenes_per_image_max = 3;
    double noise_sigma = 0.5;
    double center_scale = 1.0;
    Combine combine = Combine::sum;
    std::uint64_t seed = 0;

    void validate() const;
};

struct SynthData {
    std::vector<std::string> scene_names;
    Matrix centers;  // S x F ground-truth scene centers
    std::vector<SingleSceneSample> single;
    std::vector<MultiSceneSample> multi_train;
    std::vector<MultiSceneSample> multi_test;
};

/// Deterministic by seed. Scene centers are redrawn until every pairwise
/// distance reaches 6 * noise_sigma; a config whose dimensions cannot reach
/// that separation fails with an ArgumentError.
SynthData synth_generate(const SynthConfig& config);

/// Stratified split of single-scene samples into len(fractions) disjoint,
/// exhaustive parts, per-class exact up to rounding. Fractions must sum to 1;
/// every class must have at least as many samples as there are parts.
std::vector<std::vector<SingleSceneSample>> split_stratified(
    const std::vector<SingleSceneSample>& samples, const std::vector<double>& fractions,
    std::uint64_t seed);

/// Binary model checkpoint: magic string, format version, then
/// length-prefixed sections per module. 64-bit values are stored raw
/// (little-endian), so a round trip is bit-exact.
void save_checkpoint(const PmNetModel& model, const std::string& path);
PmNetModel load_checkpoint(const std::string& path);

}  // namespace pmnet
