#include <cmath>
#include <cstdio>
#include <doctest.h>
#include <filesystem>
#include <fstream>

#include "pmnet/data.hpp"
#include "pmnet/error.hpp"

using namespace pmnet;

namespace {

std::string temp_path(const std::string& name) {
    static int counter = 0;
    const auto dir = std::filesystem::temp_directory_path() / "pmnet_data_tests";
    std::filesystem::create_directories(dir);
    return (dir / (std::to_string(counter++) + "_" + name)).string();
}

}  // namespace

TEST_SUITE_BEGIN("data");

TEST_CASE("a minimal table parses") {
    const FeatureTable table =
        parse_feature_table("id,f0,f1,labels\nrow0,0.5,-1.25,forest\n");
    CHECK(table.feature_dim == 2);
    REQUIRE(table.rows.size() == 1);
    CHECK(table.rows[0].id == "row0");
    CHECK(table.rows[0].features == std::vector<double>{0.5, -1.25});
    CHECK(table.rows[0].labels == std::vector<std::string>{"forest"});
}

TEST_CASE("wrong arity names the offending line") {
    try {
        parse_feature_table("id,f0,f1,labels\nrow0,0.5,forest\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
}

TEST_CASE("non-numeric features and duplicate ids are parse errors") {
    CHECK_THROWS_AS(parse_feature_table("id,f0,labels\nrow0,abc,forest\n"), ParseError);
    CHECK_THROWS_AS(
        parse_feature_table("id,f0,labels\nrow0,1.0,forest\nrow0,2.0,beach\n"), ParseError);
    CHECK_THROWS_AS(parse_feature_table("id,x0,labels\nrow0,1.0,forest\n"), ParseError);
    CHECK_THROWS_AS(parse_feature_table(""), ParseError);
}

TEST_CASE("multi-label column splits on semicolons; empty means no labels") {
    const FeatureTable table =
        parse_feature_table("id,f0,labels\na,1.0,forest;beach\nb,2.0,\n");
    CHECK(table.rows[0].labels == std::vector<std::string>{"forest", "beach"});
    CHECK(table.rows[1].labels.empty());

    std::size_t unlabeled = 0;
    const auto samples = to_multi_samples(table, {"beach", "forest"}, &unlabeled);
    CHECK(unlabeled == 1);
    CHECK(samples[0].labels == std::vector<int>{1, 1});
    CHECK(samples[1].labels == std::vector<int>{0, 0});
}

TEST_CASE("unknown class names are rejected with the line number") {
    const FeatureTable table = parse_feature_table("id,f0,labels\na,1.0,forest\nb,2.0,swamp\n");
    try {
        to_multi_samples(table, {"forest"}, nullptr);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        const std::string what = e.what();
        CHECK(what.find("swamp") != std::string::npos);
        CHECK(what.find("line 3") != std::string::npos);
    }
}

TEST_CASE("single-scene view requires exactly one label per row") {
    const FeatureTable table = parse_feature_table("id,f0,labels\na,1.0,forest;beach\n");
    CHECK_THROWS_AS(to_single_samples(table), ParseError);
}

TEST_CASE("a large random table survives a save/load round trip") {
    Rng rng(101);
    FeatureTable table;
    table.feature_dim = 5;
    for (int i = 0; i < 1000; ++i) {
        FeatureRow row;
        row.id = "sample" + std::to_string(i);
        for (int j = 0; j < 5; ++j) row.features.push_back(rng.normal(0.0, 13.7));
        if (i % 3 == 0) row.labels.push_back("forest");
        if (i % 3 == 1) row.labels = {"beach", "sea"};
        table.rows.push_back(std::move(row));
    }
    const std::string path = temp_path("roundtrip.csv");
    save_feature_table(table, path);
    const FeatureTable loaded = load_feature_table(path);
    REQUIRE(loaded.rows.size() == table.rows.size());
    CHECK(loaded.feature_dim == table.feature_dim);
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        CHECK(loaded.rows[i].id == table.rows[i].id);
        CHECK(loaded.rows[i].features == table.rows[i].features);  // %.17g is lossless
        CHECK(loaded.rows[i].labels == table.rows[i].labels);
    }
}

TEST_CASE("noise-free synthetic multi-scene samples equal their scene centers") {
    SynthConfig config;
    config.num_scenes = 4;
    config.feature_dim = 5;
    config.samples_per_scene = 3;
    config.num_multiscene = 12;
    config.scenes_per_image_min = 1;
    config.scenes_per_image_max = 1;
    config.noise_sigma = 0.0;
    config.seed = 77;
    const SynthData data = synth_generate(config);
    for (const auto& sample : data.multi_train) {
        std::size_t scene = 0;
        std::size_t count = 0;
        for (std::size_t s = 0; s < 4; ++s) {
            if (sample.labels[s]) {
                scene = s;
                ++count;
            }
        }
        REQUIRE(count == 1);
        CHECK(sample.features == data.centers.row_copy(scene));
    }
}

TEST_CASE("synthetic generation is deterministic by seed") {
    SynthConfig config;
    config.num_scenes = 5;
    config.feature_dim = 7;
    config.samples_per_scene = 10;
    config.num_multiscene = 20;
    config.num_multiscene_test = 10;
    config.seed = 123;
    const SynthData a = synth_generate(config);
    const SynthData b = synth_generate(config);
    CHECK(a.centers == b.centers);
    REQUIRE(a.single.size() == b.single.size());
    for (std::size_t i = 0; i < a.single.size(); ++i) {
        CHECK(a.single[i].features == b.single[i].features);
        CHECK(a.single[i].scene_index == b.single[i].scene_index);
    }
    REQUIRE(a.multi_test.size() == 10);
    for (std::size_t i = 0; i < a.multi_test.size(); ++i) {
        CHECK(a.multi_test[i].features == b.multi_test[i].features);
        CHECK(a.multi_test[i].labels == b.multi_test[i].labels);
    }
}

TEST_CASE("a nearest-center classifier is perfect at vanishing noise") {
    SynthConfig config;
    config.num_scenes = 6;
    config.feature_dim = 8;
    config.samples_per_scene = 30;
    config.num_multiscene = 1;
    config.noise_sigma = 1e-4;
    config.seed = 9;
    const SynthData data = synth_generate(config);
    for (const auto& sample : data.single) {
        std::size_t best = 0;
        double best_dist = std::numeric_limits<double>::infinity();
        for (std::size_t s = 0; s < 6; ++s) {
            double dist = 0.0;
            for (std::size_t j = 0; j < 8; ++j) {
                const double d = sample.features[j] - data.centers(s, j);
                dist += d * d;
            }
            if (dist < best_dist) {
                best_dist = dist;
                best = s;
            }
        }
        CHECK(best == sample.scene_index);
    }
}

TEST_CASE("impossible separation requirements fail loudly") {
    SynthConfig config;
    config.num_scenes = 40;
    config.feature_dim = 1;
    config.samples_per_scene = 1;
    config.num_multiscene = 1;
    config.noise_sigma = 10.0;  // 6 sigma separation of 40 centers on a line
    config.center_scale = 1.0;
    CHECK_THROWS_AS(synth_generate(config), ArgumentError);
}

TEST_CASE("average combining divides the superposition by the scene count") {
    SynthConfig config;
    config.num_scenes = 3;
    config.feature_dim = 4;
    config.samples_per_scene = 2;
    config.num_multiscene = 10;
    config.scenes_per_image_min = 2;
    config.scenes_per_image_max = 2;
    config.noise_sigma = 0.0;
    config.combine = Combine::average;
    config.seed = 31;
    const SynthData data = synth_generate(config);
    for (const auto& sample : data.multi_train) {
        std::vector<double> expected(4, 0.0);
        std::size_t count = 0;
        for (std::size_t s = 0; s < 3; ++s) {
            if (!sample.labels[s]) continue;
            ++count;
            for (std::size_t j = 0; j < 4; ++j) expected[j] += data.centers(s, j);
        }
        REQUIRE(count == 2);
        for (std::size_t j = 0; j < 4; ++j) {
            CHECK(sample.features[j] == doctest::Approx(expected[j] / 2.0).epsilon(1e-15));
        }
    }
}

TEST_CASE("stratified split is exact for clean fractions") {
    std::vector<SingleSceneSample> samples;
    for (std::size_t c = 0; c < 3; ++c) {
        for (std::size_t i = 0; i < 100; ++i) samples.push_back({{double(i)}, c});
    }
    const auto parts = split_stratified(samples, {0.8, 0.2}, 5);
    REQUIRE(parts.size() == 2);
    CHECK(parts[0].size() == 240);
    CHECK(parts[1].size() == 60);
    std::vector<std::size_t> train_per_class(3, 0), test_per_class(3, 0);
    for (const auto& s : parts[0]) ++train_per_class[s.scene_index];
    for (const auto& s : parts[1]) ++test_per_class[s.scene_index];
    for (std::size_t c = 0; c < 3; ++c) {
        CHECK(train_per_class[c] == 80);
        CHECK(test_per_class[c] == 20);
    }
}

TEST_CASE("split with fraction one is the identity partition") {
    std::vector<SingleSceneSample> samples = {{{1.0}, 0}, {{2.0}, 1}, {{3.0}, 0}};
    const auto parts = split_stratified(samples, {1.0}, 0);
    REQUIRE(parts.size() == 1);
    CHECK(parts[0].size() == 3);
}

TEST_CASE("split partitions are disjoint and exhaustive") {
    Rng rng(2);
    std::vector<SingleSceneSample> samples;
    for (std::size_t i = 0; i < 83; ++i) samples.push_back({{rng.normal()}, i % 4});
    const auto parts = split_stratified(samples, {0.5, 0.3, 0.2}, 11);
    std::vector<double> seen;
    std::size_t total = 0;
    for (const auto& part : parts) {
        total += part.size();
        for (const auto& s : part) seen.push_back(s.features[0]);
    }
    CHECK(total == samples.size());
    std::vector<double> original;
    for (const auto& s : samples) original.push_back(s.features[0]);
    std::sort(seen.begin(), seen.end());
    std::sort(original.begin(), original.end());
    CHECK(seen == original);

    const auto parts_again = split_stratified(samples, {0.5, 0.3, 0.2}, 11);
    for (std::size_t p = 0; p < parts.size(); ++p) {
        REQUIRE(parts[p].size() == parts_again[p].size());
        for (std::size_t i = 0; i < parts[p].size(); ++i) {
            CHECK(parts[p][i].features == parts_again[p][i].features);
        }
    }
}

TEST_CASE("split rejects classes smaller than the partition count") {
    std::vector<SingleSceneSample> samples = {{{1.0}, 0}, {{2.0}, 0}, {{3.0}, 1}};
    CHECK_THROWS_AS(split_stratified(samples, {0.5, 0.3, 0.2}, 0), ArgumentError);
    CHECK_THROWS_AS(split_stratified(samples, {0.5, 0.2}, 0), ArgumentError);  // sums to 0.7
}

namespace {

PmNetModel train_small_model(std::uint64_t seed, std::size_t heads = 2,
                             std::size_t value_dim = 8) {
    SynthConfig synth;
    synth.num_scenes = 3;
    synth.feature_dim = 5;
    synth.samples_per_scene = 12;
    synth.num_multiscene = 10;
    synth.noise_sigma = 0.3;
    synth.seed = seed;
    const SynthData data = synth_generate(synth);

    PipelineConfig config;
    config.feature_dim = 5;
    config.hidden_dims = {10};
    config.embed_dim = 6;
    config.key_dim = 7;
    config.value_dim = value_dim;
    config.num_heads = heads;
    config.phase1.max_epochs = 4;
    config.phase2.max_epochs = 4;
    config.seed = seed;
    return run_two_phase(config, data.single, data.scene_names, LabelMergeMap{},
                         data.multi_train);
}

}  // namespace

TEST_CASE("checkpoints reproduce predictions bit for bit") {
    const PmNetModel model = train_small_model(3);
    const std::string path = temp_path("model.pmn");
    save_checkpoint(model, path);
    const PmNetModel loaded = load_checkpoint(path);

    CHECK(loaded.memory.scene_names == model.memory.scene_names);
    CHECK(loaded.class_names == model.class_names);
    CHECK(loaded.config.threshold == model.config.threshold);
    Rng rng(1234);
    for (int probe = 0; probe < 10; ++probe) {
        std::vector<double> x(5);
        for (double& v : x) v = rng.normal();
        const auto a = model.predict_probs(x);
        const auto b = loaded.predict_probs(x);
        REQUIRE(a.size() == b.size());
        for (std::size_t j = 0; j < a.size(); ++j) CHECK(a[j] == b[j]);
    }
}

TEST_CASE("a twenty-head checkpoint preserves the concatenated width") {
    const PmNetModel model = train_small_model(4, 20, 256);
    const std::string path = temp_path("wide.pmn");
    save_checkpoint(model, path);
    const PmNetModel loaded = load_checkpoint(path);
    Rng rng(5);
    std::vector<double> x(5);
    for (double& v : x) v = rng.normal();
    const std::vector<double> e = embed(loaded.net, x);
    CHECK(multi_head_retrieve(e, loaded.memory, loaded.module).size() == 5120);
}

TEST_CASE("a truncated checkpoint fails to load cleanly") {
    const PmNetModel model = train_small_model(6);
    const std::string path = temp_path("trunc.pmn");
    save_checkpoint(model, path);
    const auto size = std::filesystem::file_size(path);
    std::filesystem::resize_file(path, size / 2);
    CHECK_THROWS_AS(load_checkpoint(path), IoError);
}

TEST_CASE("garbage and missing files are load errors") {
    const std::string path = temp_path("garbage.pmn");
    std::ofstream(path) << "this is not a checkpoint";
    CHECK_THROWS_AS(load_checkpoint(path), IoError);
    CHECK_THROWS_AS(load_checkpoint(temp_path("missing.pmn")), IoError);
}

TEST_CASE("a corrupted version field is rejected") {
    const PmNetModel model = train_small_model(7);
    const std::string path = temp_path("version.pmn");
    save_checkpoint(model, path);
    std::fstream file(path, std::ios::binary | std::ios::in | std::ios::out);
    file.seekp(8);  // version lives right after the magic
    const std::uint32_t bad = 999;
    file.write(reinterpret_cast<const char*>(&bad), sizeof(bad));
    file.close();
    CHECK_THROWS_AS(load_checkpoint(path), IoError);
}

TEST_SUITE_END();
