// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Heavier than the unit tests; the benchmark criteria train full
// models end to end.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "pmnet/cli.hpp"
#include "pmnet/data.hpp"
#include "pmnet/gradcheck.hpp"
#include "pmnet/trainer.hpp"

using namespace pmnet;

namespace {

int failures = 0;

void report(int criterion, const std::string& name, bool ok, const std::string& detail) {
    std::printf("%s %d %-22s %s\n", ok ? "PASS" : "FAIL", criterion, name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

double seconds_since(const std::chrono::steady_clock::time_point& start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), pattern, a, b, c);
    return buf;
}

// ---------------------------------------------------------------------------
// 1. Gradient oracle

void criterion_gradient_oracle() {
    const auto start = std::chrono::steady_clock::now();
    GradCheckConfig config;
    config.num_seeds = 20;
    const GradCheckReport result = run_gradcheck(config);
    const double elapsed = seconds_since(start);

    bool cli_ok = true;
#ifdef PMNET_CLI_PATH
    const std::string command = std::string(PMNET_CLI_PATH) + " gradcheck --seeds 20 > /dev/null";
    const int status = std::system(command.c_str());
    cli_ok = status != -1 && WIFEXITED(status) && WEXITSTATUS(status) == 0;
#endif

    report(1, "gradient-oracle", result.passed() && cli_ok && elapsed < 120.0,
           fmt("max_rel_error %.3e (limit 1e-4), %.1f s", result.worst, elapsed) +
               " in " + result.worst_group + (cli_ok ? "" : " [cli failed]"));
}

// ---------------------------------------------------------------------------
// 2. Equation oracles: straight-line reimplementation of the forward path.

std::vector<double> oracle_affine(const std::vector<double>& x, const Matrix& w,
                                  const Matrix& b) {
    std::vector<double> out(w.cols());
    for (std::size_t j = 0; j < w.cols(); ++j) {
        double acc = b(0, j);
        for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * w(i, j);
        out[j] = acc;
    }
    return out;
}

std::vector<double> oracle_embed(const EmbeddingNet& net, const std::vector<double>& x) {
    std::vector<double> h = x;
    for (const DenseLayer& layer : net.layers()) {
        h = oracle_affine(h, layer.weights, layer.bias);
        if (layer.activation == Activation::rectifier) {
            for (double& v : h) v = v > 0.0 ? v : 0.0;
        }
    }
    return h;
}

std::vector<double> oracle_relevance(const std::vector<double>& e, const PrototypeMemory& memory,
                                     const RetrievalHead& head, bool apply_softmax) {
    const std::vector<double> query = oracle_affine(e, head.query_weights, head.query_bias);
    std::vector<double> logits(memory.row_count());
    for (std::size_t row = 0; row < memory.row_count(); ++row) {
        const std::vector<double> key =
            oracle_affine(memory.rows.row_copy(row), head.key_weights, head.key_bias);
        double dot = 0.0;
        for (std::size_t l = 0; l < query.size(); ++l) dot += query[l] * key[l];
        logits[row] = dot / std::sqrt(static_cast<double>(head.key_dim()));
    }
    if (!apply_softmax) return logits;
    double total = 0.0;
    for (double& v : logits) {
        v = std::exp(v);
        total += v;
    }
    for (double& v : logits) v /= total;
    return logits;
}

std::vector<double> oracle_retrieve(const std::vector<double>& e, const PrototypeMemory& memory,
                                    const RetrievalHead& head) {
    const std::vector<double> weights = oracle_relevance(e, memory, head, true);
    std::vector<double> z(head.value_dim(), 0.0);
    for (std::size_t row = 0; row < memory.row_count(); ++row) {
        const std::vector<double> value =
            oracle_affine(memory.rows.row_copy(row), head.value_weights, head.value_bias);
        for (std::size_t u = 0; u < z.size(); ++u) z[u] += weights[row] * value[u];
    }
    return z;
}

std::vector<double> oracle_predict(const std::vector<double>& x, const EmbeddingNet& net,
                                   const PrototypeMemory& memory, const RetrievalModule& module) {
    const std::vector<double> e = oracle_embed(net, x);
    if (module.mode == RetrievalMode::relevance_as_prediction) {
        std::vector<double> logits = oracle_relevance(e, memory, module.heads.front(), false);
        for (double& v : logits) v = 1.0 / (1.0 + std::exp(-v));
        return logits;
    }
    std::vector<double> concat;
    for (const RetrievalHead& head : module.heads) {
        const std::vector<double> z = oracle_retrieve(e, memory, head);
        concat.insert(concat.end(), z.begin(), z.end());
    }
    std::vector<double> out(module.out_bias.cols());
    for (std::size_t s = 0; s < out.size(); ++s) {
        double logit = module.out_bias(0, s);
        for (std::size_t j = 0; j < concat.size(); ++j) {
            logit += concat[j] * module.out_weights(j, s);
        }
        out[s] = 1.0 / (1.0 + std::exp(-logit));
    }
    return out;
}

PrototypeMemory random_memory(std::size_t scenes, std::size_t dim, Rng& rng) {
    PrototypeMemory memory;
    memory.rows = Matrix(scenes, dim);
    for (double& v : memory.rows.data()) v = rng.normal();
    memory.prototypes_per_scene = 1;
    for (std::size_t s = 0; s < scenes; ++s) {
        memory.scene_names.push_back("s" + std::to_string(s));
        memory.row_to_scene.push_back(s);
    }
    return memory;
}

void criterion_equation_oracles() {
    double worst = 0.0;
    std::string worst_op = "none";
    const auto track = [&](const char* op, const std::vector<double>& got,
                           const std::vector<double>& expected) {
        for (std::size_t i = 0; i < got.size(); ++i) {
            const double err = std::fabs(got[i] - expected[i]);
            if (err > worst) {
                worst = err;
                worst_op = op;
            }
        }
    };

    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Rng rng(splitmix64(900 + seed));
        const std::size_t feature_dim = 3 + rng.index(6);
        const std::size_t dim = 2 + rng.index(6);
        const std::size_t key_dim = 2 + rng.index(6);
        const std::size_t value_dim = 2 + rng.index(6);
        const std::size_t scenes = 2 + rng.index(6);
        const std::size_t heads = 1 + rng.index(4);
        const bool relevance_mode = seed % 5 == 4;

        EmbeddingNet net({feature_dim, 2 + rng.index(8), dim}, rng);
        const PrototypeMemory memory = random_memory(scenes, dim, rng);
        RetrievalModule module(dim, key_dim, value_dim, relevance_mode ? 1 : heads, scenes,
                               relevance_mode ? RetrievalMode::relevance_as_prediction
                                              : RetrievalMode::standard,
                               rng);
        std::vector<double> x(feature_dim);
        for (double& v : x) v = rng.normal();
        const std::vector<double> e = embed(net, x);

        track("relevance", relevance(e, memory, module.heads.front()),
              oracle_relevance(e, memory, module.heads.front(), true));
        track("retrieve", retrieve(e, memory, module.heads.front()),
              oracle_retrieve(e, memory, module.heads.front()));
        if (!relevance_mode) {
            std::vector<double> concat;
            for (const RetrievalHead& head : module.heads) {
                const auto z = oracle_retrieve(e, memory, head);
                concat.insert(concat.end(), z.begin(), z.end());
            }
            track("multi_head_retrieve", multi_head_retrieve(e, memory, module), concat);
        }
        track("predict", predict(x, net, memory, module), oracle_predict(x, net, memory, module));
    }
    report(2, "equation-oracles", worst <= 1e-9,
           fmt("worst abs deviation %.3e (limit 1e-9)", worst) + " in " + worst_op);
}

// ---------------------------------------------------------------------------
// 3. Metric oracles

void criterion_metric_oracles() {
    Rng rng(424242);
    double worst = 0.0;
    for (int pair = 0; pair < 1000; ++pair) {
        const std::size_t width = 1 + rng.index(24);
        std::vector<int> pred(width), truth(width);
        for (auto& v : pred) v = rng.uniform() < 0.4 ? 1 : 0;
        for (auto& v : truth) v = rng.uniform() < 0.4 ? 1 : 0;

        long tp = 0, fp = 0, fn = 0;
        for (std::size_t j = 0; j < width; ++j) {
            tp += pred[j] && truth[j];
            fp += pred[j] && !truth[j];
            fn += !pred[j] && truth[j];
        }
        double p = 0.0, r = 0.0, f1 = 0.0, f2 = 0.0;
        if (tp + fn > 0) {
            p = tp + fp > 0 ? double(tp) / double(tp + fp) : 0.0;
            r = double(tp) / double(tp + fn);
            f1 = p + r > 0 ? 2.0 * p * r / (p + r) : 0.0;
            f2 = 4.0 * p + r > 0 ? 5.0 * p * r / (4.0 * p + r) : 0.0;
        }
        const ExamplePR got = example_prf(pred, truth);
        worst = std::max(worst, std::fabs(got.precision - p));
        worst = std::max(worst, std::fabs(got.recall - r));
        worst = std::max(worst, std::fabs(f_beta(got.precision, got.recall, 1.0) - f1));
        worst = std::max(worst, std::fabs(f_beta(got.precision, got.recall, 2.0) - f2));
    }

    // Label-based counting against brute force on whole random sets.
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t width = 2 + rng.index(12);
        const std::size_t n = 1 + rng.index(50);
        std::vector<std::vector<int>> preds(n, std::vector<int>(width));
        std::vector<std::vector<int>> truths(n, std::vector<int>(width));
        for (auto& row : preds) {
            for (auto& v : row) v = rng.uniform() < 0.5 ? 1 : 0;
        }
        for (auto& row : truths) {
            for (auto& v : row) v = rng.uniform() < 0.5 ? 1 : 0;
        }
        const LabelPrfResult got = label_prf(preds, truths);
        for (std::size_t j = 0; j < width; ++j) {
            long tp = 0, fp = 0, fn = 0;
            for (std::size_t i = 0; i < n; ++i) {
                tp += preds[i][j] && truths[i][j];
                fp += preds[i][j] && !truths[i][j];
                fn += !preds[i][j] && truths[i][j];
            }
            const double p = tp + fp > 0 ? double(tp) / double(tp + fp) : 0.0;
            const double r = tp + fn > 0 ? double(tp) / double(tp + fn) : 0.0;
            worst = std::max(worst, std::fabs(got.precision[j] - p));
            worst = std::max(worst, std::fabs(got.recall[j] - r));
        }
    }

    // f_beta identities.
    bool identities = true;
    for (int i = 0; i < 2000; ++i) {
        const double x = rng.uniform();
        const double p = 0.001 + 0.998 * rng.uniform();
        const double r = 0.001 + 0.998 * rng.uniform();
        const double beta = 1.0 + 9.0 * rng.uniform();
        identities &= f_beta(x, x, 1.0) == x;
        identities &= f_beta(x, x, 2.0) == x;
        identities &= f_beta(p, r, beta) == f_beta(r, p, 1.0 / beta);
    }

    report(3, "metric-oracles", worst <= 1e-12 && identities,
           fmt("worst abs deviation %.3e (limit 1e-12)", worst) +
               (identities ? ", identities exact" : ", identities VIOLATED"));
}

// ---------------------------------------------------------------------------
// 4. Prototype equivalences

void criterion_prototype_equivalences() {
    Rng rng(777);
    double worst_mean = 0.0;
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t dim = 1 + rng.index(12);
        std::vector<std::vector<double>> embeddings(1 + rng.index(200),
                                                    std::vector<double>(dim));
        for (auto& e : embeddings) {
            for (double& v : e) v = rng.normal(0.0, 5.0);
        }
        const auto proto = compute_prototype(embeddings);
        for (std::size_t j = 0; j < dim; ++j) {
            double total = 0.0;
            for (const auto& e : embeddings) total += e[j];
            worst_mean = std::max(worst_mean,
                                  std::fabs(proto[j] - total / double(embeddings.size())));
        }
    }

    // kmeans with k = 1 equals the mean prototype.
    double worst_kmeans = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        Matrix points(20 + rng.index(50), 4);
        for (double& v : points.data()) v = rng.normal();
        const ClusterResult r = kmeans(points, 1, splitmix64(trial));
        for (std::size_t j = 0; j < 4; ++j) {
            double total = 0.0;
            for (std::size_t i = 0; i < points.rows(); ++i) total += points(i, j);
            worst_kmeans =
                std::max(worst_kmeans, std::fabs(r.centers(0, j) - total / double(points.rows())));
        }
    }

    // Multi-prototype machinery end to end for k in {2,3,4}, both methods.
    bool multi_ok = true;
    std::string multi_detail;
    SynthConfig synth;
    synth.num_scenes = 4;
    synth.feature_dim = 8;
    synth.samples_per_scene = 30;
    synth.num_multiscene = 24;
    synth.num_multiscene_test = 40;
    synth.noise_sigma = 0.4;
    synth.seed = 4242;
    const SynthData data = synth_generate(synth);
    for (std::size_t k : {2, 3, 4}) {
        for (PrototypeMethod method :
             {PrototypeMethod::kmeans, PrototypeMethod::agglomerative}) {
            PipelineConfig config;
            config.feature_dim = 8;
            config.hidden_dims = {16};
            config.embed_dim = 8;
            config.key_dim = 8;
            config.value_dim = 8;
            config.num_heads = 2;
            config.prototypes_per_scene = k;
            config.prototype_method = method;
            config.phase1.max_epochs = 8;
            config.phase2.max_epochs = 12;
            config.phase1.learning_rate = 2e-3;
            config.phase2.learning_rate = 5e-3;
            config.seed = 100 + k;
            try {
                const PmNetModel model = run_two_phase(config, data.single, data.scene_names,
                                                       LabelMergeMap{}, data.multi_train);
                if (model.memory.row_count() != 4 * k) {
                    multi_ok = false;
                    multi_detail = "wrong row count for k=" + std::to_string(k);
                }
                const MetricsReport metrics =
                    evaluate(model.predictor(), data.multi_test, 0.5, model.memory.scene_names);
                if (!std::isfinite(metrics.mean_f1)) {
                    multi_ok = false;
                    multi_detail = "non-finite F1 for k=" + std::to_string(k);
                }
            } catch (const std::exception& e) {
                multi_ok = false;
                multi_detail = std::string("k=") + std::to_string(k) + " " + to_string(method) +
                               ": " + e.what();
            }
        }
    }

    const bool ok = worst_mean <= 1e-12 && worst_kmeans <= 1e-9 && multi_ok;
    report(4, "prototype-equivalences", ok,
           fmt("mean dev %.3e (1e-12), k=1 kmeans dev %.3e (1e-9)", worst_mean, worst_kmeans) +
               (multi_ok ? ", k=2..4 both methods ran" : ", multi-prototype FAILED " +
                                                             multi_detail));
}

// ---------------------------------------------------------------------------
// 5. Overfit check

void criterion_overfit() {
    SynthConfig synth;
    synth.num_scenes = 16;
    synth.feature_dim = 32;
    synth.samples_per_scene = 4;
    synth.num_multiscene = 10;
    synth.noise_sigma = 0.5;
    synth.seed = 515;
    const SynthData data = synth_generate(synth);

    Rng rng(515);
    EmbeddingNet net({32, 256, 256, 64}, rng);
    const PrototypeMemory memory = build_memory(net, data.single, data.scene_names,
                                                LabelMergeMap{}, 1, PrototypeMethod::mean, 515);
    RetrievalModule module(64, 256, 256, 20, 16, RetrievalMode::standard, rng);

    TrainSchedule schedule;  // phase-2 defaults: lr 5e-4, batch 32
    schedule.learning_rate = 5e-4;
    schedule.max_epochs = 200;
    schedule.seed = 515;
    const RetrievalTrainResult result =
        train_retrieval(net, memory, module, data.multi_train, schedule, false);
    const double final_loss = result.history.back().train_loss;
    report(5, "overfit-check", final_loss < 0.05,
           fmt("BCE %.4f after %.0f epochs (limit 0.05)", final_loss,
               double(result.history.size())));
}

// ---------------------------------------------------------------------------
// 6 + 7. Benchmark trend and freeze ablation

struct BenchmarkOutcome {
    double pm_trainable = 0.0;
    double pm_frozen = 0.0;
    double baseline = 0.0;
    double seconds = 0.0;
};

PipelineConfig benchmark_pipeline(std::uint64_t seed, bool freeze) {
    PipelineConfig config;
    config.feature_dim = 32;
    config.hidden_dims = {256, 256};
    config.embed_dim = 64;
    config.key_dim = 256;
    config.value_dim = 256;
    config.num_heads = 20;
    config.freeze_embedding = freeze;
    config.phase1.max_epochs = 40;
    config.phase2.max_epochs = 100;
    config.seed = seed;
    return config;
}

BenchmarkOutcome run_benchmark() {
    const auto start = std::chrono::steady_clock::now();

    SynthConfig synth;
    synth.num_scenes = 16;
    synth.feature_dim = 32;
    synth.samples_per_scene = 100;  // 1600 single-scene samples
    synth.num_multiscene = 90;
    synth.num_multiscene_test = 1500;
    synth.scenes_per_image_min = 1;
    synth.scenes_per_image_max = 3;
    synth.noise_sigma = 0.8;
    synth.seed = 20240811;  // fixed generator seed
    const SynthData data = synth_generate(synth);

    BenchmarkOutcome outcome;
    const std::vector<std::uint64_t> seeds = {101, 102, 103, 104, 105};
    for (std::uint64_t seed : seeds) {
        const PmNetModel trainable =
            run_two_phase(benchmark_pipeline(seed, false), data.single, data.scene_names,
                          LabelMergeMap{}, data.multi_train);
        outcome.pm_trainable +=
            evaluate(trainable.predictor(), data.multi_test, 0.5, trainable.memory.scene_names)
                .mean_f1;

        const PmNetModel frozen =
            run_two_phase(benchmark_pipeline(seed, true), data.single, data.scene_names,
                          LabelMergeMap{}, data.multi_train);
        outcome.pm_frozen +=
            evaluate(frozen.predictor(), data.multi_test, 0.5, frozen.memory.scene_names).mean_f1;

        BaselineModel baseline = make_baseline(32, {256, 256}, 64, 16, seed);
        TrainSchedule schedule;
        schedule.learning_rate = 5e-4;
        schedule.max_epochs = 100;
        schedule.seed = seed;
        train_baseline(baseline, data.multi_train, schedule);
        outcome.baseline +=
            evaluate(baseline.predictor(), data.multi_test, 0.5, data.scene_names).mean_f1;
    }
    const double n = double(seeds.size());
    outcome.pm_trainable /= n;
    outcome.pm_frozen /= n;
    outcome.baseline /= n;
    outcome.seconds = seconds_since(start);
    return outcome;
}

void criteria_benchmark() {
    const BenchmarkOutcome outcome = run_benchmark();
    const double gap = outcome.pm_trainable - outcome.baseline;
    report(6, "trend-reproduction",
           gap >= 0.03 && outcome.seconds < 900.0,
           fmt("PM-Net F1 %.4f vs baseline %.4f, gap %.4f", outcome.pm_trainable,
               outcome.baseline, gap) +
               fmt(" (need >= 0.03), %.0f s (limit 900)", outcome.seconds));
    report(7, "freeze-ablation", outcome.pm_trainable >= outcome.pm_frozen - 0.01,
           fmt("trainable F1 %.4f vs frozen %.4f (allowed slack 0.01)", outcome.pm_trainable,
               outcome.pm_frozen));
}

// ---------------------------------------------------------------------------
// Auxiliary: the documented CLI quickstart (default model, ~2k samples)
// finishes within a minute on one core.

void aux_quickstart_timing() {
#ifdef PMNET_CLI_PATH
    const auto dir = std::filesystem::temp_directory_path() / "pmnet_acceptance" / "quickstart";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    const std::string base = std::string(PMNET_CLI_PATH);
    const std::string synth = base + " synth --out-dir " + dir.string() +
                              " --scenes 8 --feature-dim 32 --samples-per-scene 200"
                              " --multi-train 200 --multi-test 200 --noise-sigma 0.5 --seed 3"
                              " > /dev/null";
    const std::string train = base + " train --out-dir " + dir.string() + " --single " +
                              (dir / "single.csv").string() + " --multi-train " +
                              (dir / "multi_train.csv").string() + " --multi-test " +
                              (dir / "multi_test.csv").string() + " --seed 3 > /dev/null";
    const auto start = std::chrono::steady_clock::now();
    const int synth_status = std::system(synth.c_str());
    const int train_status = std::system(train.c_str());
    const double elapsed = seconds_since(start);
    const bool ok = synth_status == 0 && train_status == 0 && elapsed < 60.0;
    report(0, "quickstart-timing", ok,
           fmt("default-config synth+train in %.1f s (limit 60)", elapsed));
#endif
}

// ---------------------------------------------------------------------------
// 8. Determinism and persistence

void criterion_determinism() {
    SynthConfig synth;
    synth.num_scenes = 6;
    synth.feature_dim = 12;
    synth.samples_per_scene = 30;
    synth.num_multiscene = 30;
    synth.num_multiscene_test = 60;
    synth.noise_sigma = 0.4;
    synth.seed = 808;
    const SynthData data = synth_generate(synth);

    PipelineConfig config;
    config.feature_dim = 12;
    config.hidden_dims = {32};
    config.embed_dim = 12;
    config.key_dim = 16;
    config.value_dim = 16;
    config.num_heads = 4;
    config.phase1.max_epochs = 10;
    config.phase2.max_epochs = 15;
    config.seed = 808;

    const PmNetModel model_a = run_two_phase(config, data.single, data.scene_names,
                                             LabelMergeMap{}, data.multi_train);
    const PmNetModel model_b = run_two_phase(config, data.single, data.scene_names,
                                             LabelMergeMap{}, data.multi_train);
    const MetricsReport metrics_a =
        evaluate(model_a.predictor(), data.multi_test, 0.5, model_a.memory.scene_names);
    const MetricsReport metrics_b =
        evaluate(model_b.predictor(), data.multi_test, 0.5, model_b.memory.scene_names);
    const bool rerun_identical = metrics_a.mean_f1 == metrics_b.mean_f1 &&
                                 metrics_a.mean_f2 == metrics_b.mean_f2 &&
                                 metrics_a.mean_example_precision ==
                                     metrics_b.mean_example_precision &&
                                 metrics_a.mean_example_recall == metrics_b.mean_example_recall &&
                                 metrics_a.mean_label_precision == metrics_b.mean_label_precision &&
                                 metrics_a.mean_label_recall == metrics_b.mean_label_recall;

    const auto dir = std::filesystem::temp_directory_path() / "pmnet_acceptance";
    std::filesystem::create_directories(dir);
    const std::string path = (dir / "determinism.pmn").string();
    save_checkpoint(model_a, path);
    const PmNetModel loaded = load_checkpoint(path);
    bool roundtrip_identical = true;
    for (const auto& sample : data.multi_test) {
        const auto original = model_a.predict_probs(sample.features);
        const auto reloaded = loaded.predict_probs(sample.features);
        for (std::size_t j = 0; j < original.size(); ++j) {
            roundtrip_identical &= original[j] == reloaded[j];
        }
    }

    report(8, "determinism", rerun_identical && roundtrip_identical,
           std::string("rerun metrics ") + (rerun_identical ? "bit-identical" : "DIFFER") +
               ", checkpoint predictions " +
               (roundtrip_identical ? "bit-identical" : "DIFFER"));
}

// ---------------------------------------------------------------------------
// 9. Head-sweep integrity

void criterion_head_sweep() {
    const auto dir = std::filesystem::temp_directory_path() / "pmnet_acceptance" / "heads";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);

    RunConfig synth;
    synth.set("out_dir", dir.string());
    synth.set("scenes", "8");
    synth.set("feature_dim", "16");
    synth.set("samples_per_scene", "40");
    synth.set("multi_train", "40");
    synth.set("multi_test", "150");
    synth.set("noise_sigma", "0.4");
    synth.set("seed", "909");
    cmd_synth(synth);

    RunConfig ablate;
    ablate.set("single_table", (dir / "single.csv").string());
    ablate.set("multi_train_table", (dir / "multi_train.csv").string());
    ablate.set("multi_test_table", (dir / "multi_test.csv").string());
    ablate.set("out_dir", dir.string());
    ablate.set("sweep", "heads");
    ablate.set("sweep_seeds", "3");
    ablate.set("hidden_dims", "64");
    ablate.set("embed_dim", "16");
    ablate.set("key_dim", "32");
    ablate.set("value_dim", "32");
    ablate.set("phase1_epochs", "10");
    ablate.set("phase2_epochs", "20");
    ablate.set("phase1_lr", "1e-3");
    ablate.set("phase2_lr", "2e-3");
    ablate.set("seed", "909");

    bool ok = true;
    std::string detail;
    try {
        ok = cmd_ablate(ablate) == 0;
        if (!ok) detail = "nonzero exit";
    } catch (const std::exception& e) {
        ok = false;
        detail = e.what();
    }

    std::size_t curve_rows = 0;
    bool finite = true;
    if (ok) {
        std::ifstream curve((dir / "ablate_heads_curve.csv").string());
        ok = curve.good();
        std::string line;
        std::getline(curve, line);  // header
        while (std::getline(curve, line)) {
            ++curve_rows;
            std::istringstream fields(line);
            std::string x, name, mean, std_dev;
            std::getline(fields, x, ',');
            std::getline(fields, name, ',');
            std::getline(fields, mean, ',');
            std::getline(fields, std_dev, ',');
            const double m = std::stod(mean);
            const double s = std::stod(std_dev);
            finite &= std::isfinite(m) && std::isfinite(s) && m >= 0.0 && m <= 1.0 && s >= 0.0;
        }
        // 18 runs logged: 6 settings x 3 seeds
        std::ifstream runs((dir / "ablate_heads.csv").string());
        std::size_t run_rows = 0;
        std::getline(runs, line);
        while (std::getline(runs, line)) ++run_rows;
        ok = ok && curve_rows == 6 && run_rows == 18 && finite;
        if (!ok) {
            detail = "curve rows " + std::to_string(curve_rows) + ", run rows " +
                     std::to_string(run_rows) + (finite ? "" : ", non-finite values");
        }
    }
    report(9, "head-sweep-integrity", ok,
           ok ? "6-point mean±std curve over {1,5,10,20,30,40}, 18 runs, all finite" : detail);
}

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    if (argc > 2 && std::string(argv[1]) == "--only") only = std::atoi(argv[2]);

    const auto want = [&](int criterion) { return only == 0 || only == criterion; };
    const auto start = std::chrono::steady_clock::now();

    if (want(1)) criterion_gradient_oracle();
    if (want(2)) criterion_equation_oracles();
    if (want(3)) criterion_metric_oracles();
    if (want(4)) criterion_prototype_equivalences();
    if (want(5)) criterion_overfit();
    if (want(6) || want(7)) criteria_benchmark();
    if (want(8)) criterion_determinism();
    if (want(9)) criterion_head_sweep();
    if (only == 0) aux_quickstart_timing();

    std::printf("%s: %d criterion(s) failed, %.0f s total\n", failures == 0 ? "OK" : "FAILED",
                failures, seconds_since(start));
    return failures == 0 ? 0 : 1;
}
