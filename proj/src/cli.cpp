#include "pmnet/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "pmnet/error.hpp"
#include "pmnet/svg.hpp"

namespace pmnet {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    const auto end = s.find_last_not_of(" \t\r");
    return begin == std::string::npos ? std::string() : s.substr(begin, end - begin + 1);
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream file(path, std::ios::trunc);
    if (!file) throw IoError("cannot write '" + path + "'");
    file << text;
    if (!file) throw IoError("short write to '" + path + "'");
}

std::string join_path(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

RunConfig RunConfig::from_text(const std::string& text, const std::string& origin) {
    RunConfig config;
    std::istringstream stream(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ParseError(origin + " line " + std::to_string(line_no) +
                             ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ParseError(origin + " line " + std::to_string(line_no) + ": empty key");
        }
        config.values_[key] = value;
    }
    return config;
}

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw IoError("cannot open config '" + path + "'");
    std::ostringstream buffer;
    buffer << file.rdbuf();
    return from_text(buffer.str(), path);
}

void RunConfig::set(const std::string& key, const std::string& value) {
    values_[key] = value;
}

void RunConfig::set_flag(const std::string& key, const std::string& value) {
    values_[key] = value;
    flag_keys_.insert(key);
}

bool RunConfig::has(const std::string& key) const { return values_.count(key) > 0; }

std::string RunConfig::get(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

std::string RunConfig::require(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end() || it->second.empty()) {
        throw ArgumentError("missing required setting '" + key + "'");
    }
    return it->second;
}

double RunConfig::get_double(const std::string& key, double fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        return std::stod(it->second);
    } catch (const std::exception&) {
        throw ParseError("setting '" + key + "': not a number: '" + it->second + "'");
    }
}

std::size_t RunConfig::get_size(const std::string& key, std::size_t fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        const long long v = std::stoll(it->second);
        if (v < 0) throw ParseError("setting '" + key + "': must be non-negative");
        return static_cast<std::size_t>(v);
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception&) {
        throw ParseError("setting '" + key + "': not an integer: '" + it->second + "'");
    }
}

std::uint64_t RunConfig::get_u64(const std::string& key, std::uint64_t fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        return std::stoull(it->second);
    } catch (const std::exception&) {
        throw ParseError("setting '" + key + "': not an integer: '" + it->second + "'");
    }
}

bool RunConfig::get_bool(const std::string& key, bool fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    const std::string& v = it->second;
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ParseError("setting '" + key + "': not a boolean: '" + v + "'");
}

std::vector<std::size_t> RunConfig::get_size_list(const std::string& key,
                                                  const std::vector<std::size_t>& fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<std::size_t> out;
    std::istringstream stream(it->second);
    std::string field;
    while (std::getline(stream, field, ',')) {
        field = trim(field);
        if (field.empty()) continue;
        try {
            out.push_back(static_cast<std::size_t>(std::stoull(field)));
        } catch (const std::exception&) {
            throw ParseError("setting '" + key + "': not an integer list: '" + it->second + "'");
        }
    }
    return out;
}

PipelineConfig pipeline_from_config(const RunConfig& config) {
    PipelineConfig p;
    p.feature_dim = config.get_size("feature_dim", 0);
    p.hidden_dims = config.get_size_list("hidden_dims", p.hidden_dims);
    p.embed_dim = config.get_size("embed_dim", p.embed_dim);
    p.key_dim = config.get_size("key_dim", p.key_dim);
    p.value_dim = config.get_size("value_dim", p.value_dim);
    p.num_heads = config.get_size("heads", p.num_heads);
    p.prototypes_per_scene = config.get_size("k", p.prototypes_per_scene);
    p.prototype_method = prototype_method_from_string(
        config.get("cluster_method", p.prototypes_per_scene > 1 ? "kmeans" : "mean"));
    p.mode = retrieval_mode_from_string(config.get("mode", "standard"));
    const std::string loss = config.get("phase1_loss", "cross_entropy");
    if (loss == "cross_entropy") {
        p.phase1_loss = EmbeddingLoss::cross_entropy;
    } else if (loss == "triplet") {
        p.phase1_loss = EmbeddingLoss::triplet;
    } else {
        throw ArgumentError("unknown phase1_loss '" + loss + "'");
    }
    p.freeze_embedding = config.get_bool("freeze_embedding", false);
    p.threshold = config.get_double("threshold", p.threshold);
    p.seed = config.get_u64("seed", 0);

    auto schedule = [&](TrainSchedule& s, const std::string& prefix, double default_lr) {
        s.learning_rate = config.get_double(prefix + "_lr", default_lr);
        s.beta1 = config.get_double("beta1", s.beta1);
        s.beta2 = config.get_double("beta2", s.beta2);
        s.epsilon = config.get_double("adam_eps", s.epsilon);
        s.batch_size = config.get_size("batch_size", s.batch_size);
        s.max_epochs = config.get_size(prefix + "_epochs", s.max_epochs);
        s.plateau_patience = config.get_size("patience", s.plateau_patience);
        s.decay_factor = config.get_double("decay_factor", s.decay_factor);
    };
    schedule(p.phase1, "phase1", 2e-4);
    schedule(p.phase2, "phase2", 5e-4);
    return p;
}

SynthConfig synth_from_config(const RunConfig& config) {
    SynthConfig s;
    s.num_scenes = config.get_size("scenes", s.num_scenes);
    s.feature_dim = config.get_size("feature_dim", s.feature_dim);
    s.samples_per_scene = config.get_size("samples_per_scene", s.samples_per_scene);
    s.num_multiscene = config.get_size("multi_train", s.num_multiscene);
    s.num_multiscene_test = config.get_size("multi_test", s.num_multiscene_test);
    s.scenes_per_image_min = config.get_size("scenes_min", s.scenes_per_image_min);
    s.scenes_per_image_max = config.get_size("scenes_max", s.scenes_per_image_max);
    s.noise_sigma = config.get_double("noise_sigma", s.noise_sigma);
    s.center_scale = config.get_double("center_scale", s.center_scale);
    s.combine = combine_from_string(config.get("combine", "sum"));
    s.seed = config.get_u64("seed", 0);
    return s;
}

GradCheckConfig gradcheck_from_config(const RunConfig& config) {
    GradCheckConfig g;
    g.seed = config.get_u64("seed", g.seed);
    g.num_seeds = config.get_size("seeds", g.num_seeds);
    g.tolerance = config.get_double("tolerance", g.tolerance);
    g.epsilon = config.get_double("fd_epsilon", g.epsilon);
    g.corrupt_group = config.get("corrupt_group", "");
    return g;
}

std::string resolve_out_dir(const RunConfig& config) {
    std::string dir;
    const char* env = std::getenv("PMNET_OUT_DIR");
    if (config.from_cli("out_dir")) {
        dir = config.get("out_dir", ".");
    } else if (env && *env) {
        dir = env;
    } else {
        dir = config.get("out_dir", ".");
    }
    std::filesystem::create_directories(dir);
    return dir;
}

namespace {

struct LoadedData {
    std::vector<SingleSceneSample> single;
    std::vector<std::string> class_names;
    LabelMergeMap merge;
    std::vector<std::string> scene_names;
    std::vector<MultiSceneSample> multi_train;
    std::vector<MultiSceneSample> multi_test;
    bool has_test = false;
};

LoadedData load_datasets(const RunConfig& config, bool need_train) {
    LoadedData data;
    const FeatureTable single_table = load_feature_table(config.require("single_table"));
    std::tie(data.single, data.class_names) = to_single_samples(single_table);
    if (config.has("merge_map")) data.merge = load_merge_map(config.get("merge_map", ""));
    data.scene_names = derive_scene_names(data.class_names, data.merge);

    std::size_t unlabeled = 0;
    if (need_train || config.has("multi_train_table")) {
        const FeatureTable table = load_feature_table(config.require("multi_train_table"));
        data.multi_train = to_multi_samples(table, data.scene_names, &unlabeled);
        if (unlabeled > 0) {
            std::cerr << "warning: " << unlabeled << " training rows carry no labels\n";
        }
    }
    if (config.has("multi_test_table")) {
        const FeatureTable table = load_feature_table(config.require("multi_test_table"));
        data.multi_test = to_multi_samples(table, data.scene_names, &unlabeled);
        data.has_test = true;
    }
    return data;
}

std::string predictions_csv(const Predictor& predictor,
                            const std::vector<MultiSceneSample>& dataset,
                            const std::vector<std::string>& scene_names) {
    std::ostringstream out;
    out << "index";
    for (const auto& name : scene_names) out << "," << name;
    out << "\n";
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        out << i;
        for (double p : predictor(dataset[i].features)) out << "," << format_g17(p);
        out << "\n";
    }
    return out.str();
}

void write_metrics_files(const std::string& out_dir, const MetricsReport& report,
                         double threshold) {
    write_text_file(join_path(out_dir, "metrics.csv"),
                    "# threshold = " + format_g17(threshold) + "\n" + report_csv(report));
    write_text_file(join_path(out_dir, "metrics_per_label.csv"), report_per_label_csv(report));
    write_text_file(join_path(out_dir, "metrics.txt"), report_table(report, threshold));
}

std::string config_echo(const RunConfig& config) {
    std::ostringstream out;
    for (const auto& [key, value] : config.values()) out << key << " = " << value << "\n";
    return out.str();
}

}  // namespace

int cmd_synth(const RunConfig& config) {
    const SynthConfig synth = synth_from_config(config);
    const std::string out_dir = resolve_out_dir(config);
    const SynthData data = synth_generate(synth);

    save_feature_table(table_from_single(data.single, data.scene_names, "single_"),
                       join_path(out_dir, "single.csv"));
    save_feature_table(table_from_multi(data.multi_train, data.scene_names, "multi_"),
                       join_path(out_dir, "multi_train.csv"));
    save_feature_table(table_from_multi(data.multi_test, data.scene_names, "test_"),
                       join_path(out_dir, "multi_test.csv"));

    std::ostringstream manifest;
    manifest << "generator = synthetic\n";
    manifest << "scenes = " << synth.num_scenes << "\n";
    manifest << "feature_dim = " << synth.feature_dim << "\n";
    manifest << "samples_per_scene = " << synth.samples_per_scene << "\n";
    manifest << "multi_train = " << synth.num_multiscene << "\n";
    manifest << "multi_test = " << synth.num_multiscene_test << "\n";
    manifest << "scenes_per_image = [" << synth.scenes_per_image_min << ", "
             << synth.scenes_per_image_max << "]\n";
    manifest << "noise_sigma = " << format_g17(synth.noise_sigma) << "\n";
    manifest << "center_scale = " << format_g17(synth.center_scale) << "\n";
    manifest << "combine = " << to_string(synth.combine) << "\n";
    manifest << "seed = " << synth.seed << "\n";
    manifest << "files = single.csv, multi_train.csv, multi_test.csv\n";
    for (const auto& name : data.scene_names) manifest << "scene = " << name << "\n";
    write_text_file(join_path(out_dir, "manifest.txt"), manifest.str());

    std::cout << "synth: wrote " << data.single.size() << " single-scene, "
              << data.multi_train.size() << " multi-scene training and " << data.multi_test.size()
              << " multi-scene test samples to " << out_dir << "\n";
    return 0;
}

int cmd_train(const RunConfig& config) {
    PipelineConfig pipeline = pipeline_from_config(config);
    const std::string out_dir = resolve_out_dir(config);
    LoadedData data = load_datasets(config, true);
    if (pipeline.feature_dim == 0 && !data.single.empty()) {
        pipeline.feature_dim = data.single.front().features.size();
    }
    pipeline.validate();

    TwoPhaseReport report;
    const PmNetModel model = run_two_phase(pipeline, data.single, data.class_names, data.merge,
                                           data.multi_train, &report);

    save_checkpoint(model, join_path(out_dir, config.get("checkpoint", "checkpoint.pmn")));
    write_text_file(join_path(out_dir, "loss_history.csv"), loss_history_csv(report.history));

    const auto& eval_set = data.has_test ? data.multi_test : data.multi_train;
    const MetricsReport metrics =
        evaluate(model.predictor(), eval_set, pipeline.threshold, model.memory.scene_names);
    write_metrics_files(out_dir, metrics, pipeline.threshold);
    write_text_file(join_path(out_dir, "predictions.csv"),
                    predictions_csv(model.predictor(), eval_set, model.memory.scene_names));

    std::ostringstream summary;
    summary << "command = train\n" << config_echo(config);
    summary << "scenes = " << model.memory.scene_count() << "\n";
    summary << "memory_rows = " << model.memory.row_count() << "\n";
    summary << "memory_hash = " << report.memory_hash << "\n";
    summary << "memory_frozen_in_phase2 = " << (report.memory_unchanged ? "true" : "false") << "\n";
    summary << "phase2_embedding = " << (pipeline.freeze_embedding ? "frozen" : "trainable")
            << "\n";
    summary << "evaluated_on = " << (data.has_test ? "multi_test_table" : "multi_train_table")
            << "\n";
    summary << "mean_f1 = " << format_g17(metrics.mean_f1) << "\n";
    write_text_file(join_path(out_dir, "run_summary.txt"), summary.str());

    std::cout << report_table(metrics, pipeline.threshold);
    return 0;
}

int cmd_evaluate(const RunConfig& config) {
    const std::string out_dir = resolve_out_dir(config);
    const PmNetModel model = load_checkpoint(config.require("checkpoint"));
    const double threshold = config.get_double("threshold", model.config.threshold);

    const FeatureTable table = load_feature_table(config.require("multi_test_table"));
    std::size_t unlabeled = 0;
    const std::vector<MultiSceneSample> dataset =
        to_multi_samples(table, model.memory.scene_names, &unlabeled);
    if (unlabeled > 0) std::cerr << "warning: " << unlabeled << " rows carry no labels\n";

    const MetricsReport metrics =
        evaluate(model.predictor(), dataset, threshold, model.memory.scene_names);
    write_metrics_files(out_dir, metrics, threshold);
    write_text_file(join_path(out_dir, "predictions.csv"),
                    predictions_csv(model.predictor(), dataset, model.memory.scene_names));

    const std::size_t sweep = config.get_size("sweep_thresholds", 0);
    if (sweep > 0) {
        std::ostringstream curve;
        curve << "threshold,mean_f1,mean_f2\n";
        for (std::size_t i = 1; i <= sweep; ++i) {
            const double t = static_cast<double>(i) / static_cast<double>(sweep + 1);
            const MetricsReport r = evaluate(model.predictor(), dataset, t,
                                             model.memory.scene_names);
            char buf[96];
            std::snprintf(buf, sizeof(buf), "%.6f,%.6f,%.6f\n", t, r.mean_f1, r.mean_f2);
            curve << buf;
        }
        write_text_file(join_path(out_dir, "threshold_curve.csv"), curve.str());
    }

    std::cout << report_table(metrics, threshold);
    return 0;
}

namespace {

struct SweepSetting {
    std::string name;
    PipelineConfig config;
};

std::vector<SweepSetting> sweep_settings(const std::string& sweep, const PipelineConfig& base) {
    std::vector<SweepSetting> settings;
    if (sweep == "heads") {
        for (std::size_t h : {1, 5, 10, 20, 30, 40}) {
            PipelineConfig c = base;
            c.num_heads = h;
            settings.push_back({"heads_" + std::to_string(h), c});
        }
    } else if (sweep == "clusters") {
        for (PrototypeMethod method :
             {PrototypeMethod::kmeans, PrototypeMethod::agglomerative}) {
            for (std::size_t k : {1, 2, 3, 4}) {
                PipelineConfig c = base;
                c.prototypes_per_scene = k;
                c.prototype_method = method;
                settings.push_back({to_string(method) + "_k" + std::to_string(k), c});
            }
        }
    } else if (sweep == "freeze") {
        PipelineConfig trainable = base;
        trainable.freeze_embedding = false;
        PipelineConfig frozen = base;
        frozen.freeze_embedding = true;
        settings.push_back({"trainable", trainable});
        settings.push_back({"frozen", frozen});
    } else if (sweep == "loss") {
        PipelineConfig ce = base;
        ce.phase1_loss = EmbeddingLoss::cross_entropy;
        PipelineConfig triplet = base;
        triplet.phase1_loss = EmbeddingLoss::triplet;
        settings.push_back({"cross_entropy", ce});
        settings.push_back({"triplet", triplet});
    } else if (sweep == "mode") {
        PipelineConfig standard = base;
        standard.mode = RetrievalMode::standard;
        PipelineConfig relevance = base;
        relevance.mode = RetrievalMode::relevance_as_prediction;
        relevance.num_heads = 1;
        relevance.prototypes_per_scene = 1;
        relevance.prototype_method = base.prototypes_per_scene > 1 ? PrototypeMethod::mean
                                                                   : base.prototype_method;
        settings.push_back({"standard", standard});
        settings.push_back({"relevance_as_prediction", relevance});
    } else {
        throw ArgumentError("unknown sweep '" + sweep +
                            "' (expected heads|clusters|freeze|loss|mode)");
    }
    return settings;
}

}  // namespace

int cmd_ablate(const RunConfig& config) {
    const std::string sweep = config.require("sweep");
    const std::size_t num_seeds = config.get_size("sweep_seeds", 3);
    if (num_seeds == 0) throw ArgumentError("ablate: sweep_seeds must be >= 1");
    const std::string out_dir = resolve_out_dir(config);

    PipelineConfig base = pipeline_from_config(config);
    LoadedData data = load_datasets(config, true);
    if (base.feature_dim == 0 && !data.single.empty()) {
        base.feature_dim = data.single.front().features.size();
    }
    const auto& eval_set = data.has_test ? data.multi_test : data.multi_train;

    const std::vector<SweepSetting> settings = sweep_settings(sweep, base);
    for (const auto& setting : settings) setting.config.validate();

    std::ostringstream runs_csv;
    runs_csv << "setting,seed,mean_f1\n";
    std::ostringstream summary_csv;
    summary_csv << "setting,mean_f1,std_f1,runs\n";
    std::vector<double> xs;
    std::vector<double> means;
    std::vector<double> stds;

    for (std::size_t si = 0; si < settings.size(); ++si) {
        const SweepSetting& setting = settings[si];
        std::vector<double> scores;
        for (std::size_t r = 0; r < num_seeds; ++r) {
            PipelineConfig run_config = setting.config;
            run_config.seed = base.seed + r;  // paired seeds across settings
            TwoPhaseReport report;
            const PmNetModel model = run_two_phase(run_config, data.single, data.class_names,
                                                   data.merge, data.multi_train, &report);
            const MetricsReport metrics = evaluate(model.predictor(), eval_set,
                                                   run_config.threshold,
                                                   model.memory.scene_names);
            scores.push_back(metrics.mean_f1);
            char buf[96];
            std::snprintf(buf, sizeof(buf), "%s,%llu,%.6f\n", setting.name.c_str(),
                          static_cast<unsigned long long>(run_config.seed), metrics.mean_f1);
            runs_csv << buf;
            std::cout << "ablate " << sweep << ": " << setting.name << " seed "
                      << run_config.seed << " mean_f1 " << metrics.mean_f1 << "\n";
        }
        double mean = 0.0;
        for (double s : scores) mean += s;
        mean /= static_cast<double>(scores.size());
        double var = 0.0;
        for (double s : scores) var += (s - mean) * (s - mean);
        const double std_dev =
            scores.size() > 1 ? std::sqrt(var / static_cast<double>(scores.size() - 1)) : 0.0;
        char buf[128];
        std::snprintf(buf, sizeof(buf), "%s,%.6f,%.6f,%zu\n", setting.name.c_str(), mean, std_dev,
                      scores.size());
        summary_csv << buf;
        xs.push_back(static_cast<double>(si));
        means.push_back(mean);
        stds.push_back(std_dev);
    }

    write_text_file(join_path(out_dir, "ablate_" + sweep + ".csv"), runs_csv.str());
    write_text_file(join_path(out_dir, "ablate_" + sweep + "_summary.csv"), summary_csv.str());

    // Plot-ready curve: numeric x per setting (head count when sweeping heads).
    std::ostringstream curve;
    curve << "x,setting,mean_f1,std_f1\n";
    for (std::size_t si = 0; si < settings.size(); ++si) {
        double x = xs[si];
        if (sweep == "heads") x = static_cast<double>(settings[si].config.num_heads);
        if (sweep == "clusters") {
            x = static_cast<double>(settings[si].config.prototypes_per_scene);
        }
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%.0f,%s,%.6f,%.6f\n", x, settings[si].name.c_str(),
                      means[si], stds[si]);
        curve << buf;
        xs[si] = x;
    }
    write_text_file(join_path(out_dir, "ablate_" + sweep + "_curve.csv"), curve.str());

    SvgSeries series;
    series.label = "mean F1";
    series.x = xs;
    series.y = means;
    series.y_err = stds;
    if (sweep == "clusters") {
        // Two series, one per clustering method.
        SvgSeries km = series;
        km.label = "kmeans";
        km.x.assign(xs.begin(), xs.begin() + 4);
        km.y.assign(means.begin(), means.begin() + 4);
        km.y_err.assign(stds.begin(), stds.begin() + 4);
        SvgSeries agg = series;
        agg.label = "agglomerative";
        agg.color = "#d62728";
        agg.x.assign(xs.begin() + 4, xs.end());
        agg.y.assign(means.begin() + 4, means.end());
        agg.y_err.assign(stds.begin() + 4, stds.end());
        write_text_file(join_path(out_dir, "ablate_" + sweep + ".svg"),
                        svg_line_chart("cluster sweep", "prototypes per scene", "mean F1",
                                       {km, agg}));
    } else {
        const std::string x_label = sweep == "heads" ? "heads" : "setting index";
        write_text_file(join_path(out_dir, "ablate_" + sweep + ".svg"),
                        svg_line_chart(sweep + " sweep", x_label, "mean F1", {series}));
    }
    return 0;
}

int cmd_gradcheck(const RunConfig& config) {
    const GradCheckConfig check = gradcheck_from_config(config);
    const GradCheckReport report = run_gradcheck(check);
    for (const auto& group : report.groups) {
        char buf[256];
        std::snprintf(buf, sizeof(buf), "group %-32s max_rel_error %.3e at index %zu%s\n",
                      group.name.c_str(), group.max_rel_error, group.worst_index,
                      group.max_rel_error <= report.tolerance ? "" : "  FAIL");
        std::cout << buf;
    }
    if (report.passed()) {
        std::cout << "gradcheck: PASS (worst " << report.worst << " in " << report.worst_group
                  << ", tolerance " << report.tolerance << ", seeds " << check.num_seeds << ")\n";
        return 0;
    }
    std::cerr << "error: gradcheck failed: group " << report.worst_group << " max_rel_error "
              << report.worst << " exceeds tolerance " << report.tolerance << "\n";
    return 2;
}

}  // namespace pmnet
