#include "pmnet/trainer.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "pmnet/error.hpp"

namespace pmnet {

namespace {

void fill_multi_batch(const std::vector<MultiSceneSample>& samples,
                      const std::vector<std::size_t>& order, std::size_t begin, std::size_t end,
                      std::size_t feature_dim, std::size_t num_scenes, Matrix& batch,
                      Matrix& targets) {
    batch = Matrix(end - begin, feature_dim);
    targets = Matrix(end - begin, num_scenes);
    for (std::size_t b = begin; b < end; ++b) {
        const MultiSceneSample& sample = samples[order[b]];
        if (sample.features.size() != feature_dim) {
            throw ShapeError("train: ragged feature vector");
        }
        if (sample.labels.size() != num_scenes) {
            throw ShapeError("train: label width does not match the scene count");
        }
        batch.set_row(b - begin, sample.features);
        for (std::size_t j = 0; j < num_scenes; ++j) {
            targets(b - begin, j) = sample.labels[j] != 0 ? 1.0 : 0.0;
        }
    }
}

}  // namespace

RetrievalTrainResult train_retrieval(EmbeddingNet& net, const PrototypeMemory& memory,
                                     RetrievalModule& module,
                                     const std::vector<MultiSceneSample>& samples,
                                     const TrainSchedule& schedule, bool freeze_embedding) {
    schedule.validate();
    net.validate();
    module.validate();
    memory.validate();
    if (samples.empty()) throw ArgumentError("train_retrieval: empty dataset");
    if (net.output_dim() != memory.dim() || memory.dim() != module.embed_dim()) {
        throw ShapeError("train_retrieval: embedding, memory and module dims disagree");
    }
    const std::size_t feature_dim = net.input_dim();
    const std::size_t num_scenes = memory.scene_count();

    ParamTape tape;
    module.collect_params(tape, "retrieval");
    if (!freeze_embedding) net.collect_params(tape, "embedding");

    OptimizerState state;
    PlateauScheduler plateau(schedule.learning_rate, schedule.plateau_patience,
                             schedule.decay_factor);
    Rng rng = Rng(schedule.seed).fork(0x702);

    std::vector<std::size_t> order(samples.size());
    std::iota(order.begin(), order.end(), 0);

    RetrievalTrainResult result;
    Matrix batch, targets;
    for (std::size_t epoch = 1; epoch <= schedule.max_epochs; ++epoch) {
        rng.shuffle(order);
        double loss_sum = 0.0;
        double weight_sum = 0.0;
        for (std::size_t begin = 0; begin < order.size(); begin += schedule.batch_size) {
            const std::size_t end = std::min(begin + schedule.batch_size, order.size());
            fill_multi_batch(samples, order, begin, end, feature_dim, num_scenes, batch, targets);
            tape.zero_grads();

            EmbeddingCache embed_cache;
            RetrievalCache retrieval_cache;
            const Matrix embeddings =
                net.forward(batch, freeze_embedding ? nullptr : &embed_cache);
            Matrix probs = retrieval_logits(embeddings, memory, module, &retrieval_cache);
            sigmoid_inplace(probs);
            const double loss = bce_matrix_loss(probs, targets);
            const Matrix grad_logits = bce_logit_grad(probs, targets);
            const Matrix grad_embeddings =
                retrieval_backward(module, memory, retrieval_cache, grad_logits);
            if (!freeze_embedding) net.backward(embed_cache, grad_embeddings);

            nadam_step(tape, state, schedule, plateau.learning_rate());
            loss_sum += loss * static_cast<double>(end - begin);
            weight_sum += static_cast<double>(end - begin);
        }
        const double train_loss = loss_sum / weight_sum;
        result.history.push_back({epoch, 2, plateau.learning_rate(), train_loss, train_loss});
        plateau.observe(train_loss);
    }
    return result;
}

void PipelineConfig::validate() const {
    if (feature_dim == 0) throw ArgumentError("config: feature_dim must be positive");
    if (embed_dim == 0 || key_dim == 0 || value_dim == 0 || num_heads == 0) {
        throw ArgumentError("config: model dims must be positive");
    }
    if (prototypes_per_scene == 0) throw ArgumentError("config: k must be >= 1");
    if (!(threshold > 0.0 && threshold < 1.0)) {
        throw ArgumentError("config: threshold must lie in (0, 1)");
    }
    if (mode == RetrievalMode::relevance_as_prediction) {
        if (num_heads != 1) {
            throw ArgumentError("config: relevance-as-prediction requires exactly one head");
        }
        if (prototypes_per_scene != 1) {
            throw ArgumentError("config: relevance-as-prediction requires k = 1");
        }
    }
    if (prototype_method == PrototypeMethod::mean && prototypes_per_scene != 1) {
        throw ArgumentError("config: the mean prototype method requires k = 1");
    }
    phase1.validate();
    phase2.validate();
}

PmNetModel run_two_phase(const PipelineConfig& config,
                         const std::vector<SingleSceneSample>& single_samples,
                         const std::vector<std::string>& class_names, const LabelMergeMap& merge,
                         const std::vector<MultiSceneSample>& multi_train,
                         TwoPhaseReport* report) {
    config.validate();
    if (single_samples.empty()) throw ArgumentError("run_two_phase: no single-scene samples");
    if (multi_train.empty()) throw ArgumentError("run_two_phase: no multi-scene samples");
    if (class_names.empty()) throw ArgumentError("run_two_phase: no class names");

    PmNetModel model;
    model.config = config;
    model.class_names = class_names;

    Rng init_rng = Rng(config.seed).fork(0x1417);
    std::vector<std::size_t> dims;
    dims.push_back(config.feature_dim);
    dims.insert(dims.end(), config.hidden_dims.begin(), config.hidden_dims.end());
    dims.push_back(config.embed_dim);
    model.net = EmbeddingNet(dims, init_rng);
    model.head = ClassifierHead(config.embed_dim, class_names.size(), init_rng);

    TwoPhaseReport local_report;
    TwoPhaseReport& rep = report ? *report : local_report;

    TrainSchedule phase1 = config.phase1;
    phase1.seed = splitmix64(config.seed ^ 0xF1);
    if (phase1.max_epochs > 0) {
        const EmbeddingTrainResult r =
            train_embedding(model.net, model.head, single_samples, phase1, config.phase1_loss);
        rep.history.insert(rep.history.end(), r.history.begin(), r.history.end());
    }

    model.memory = build_memory(model.net, single_samples, class_names, merge,
                                config.prototypes_per_scene, config.prototype_method,
                                splitmix64(config.seed ^ 0xF2));
    const std::uint64_t hash_before = matrix_hash(model.memory.rows);

    for (const auto& sample : multi_train) {
        if (sample.labels.size() != model.memory.scene_count()) {
            throw ShapeError("run_two_phase: multi-scene label width (" +
                             std::to_string(sample.labels.size()) + ") does not match the " +
                             std::to_string(model.memory.scene_count()) + " derived scenes");
        }
    }

    model.module = RetrievalModule(config.embed_dim, config.key_dim, config.value_dim,
                                   config.num_heads, model.memory.scene_count(), config.mode,
                                   init_rng);

    TrainSchedule phase2 = config.phase2;
    phase2.seed = splitmix64(config.seed ^ 0xF3);
    if (phase2.max_epochs > 0) {
        const RetrievalTrainResult r = train_retrieval(model.net, model.memory, model.module,
                                                       multi_train, phase2,
                                                       config.freeze_embedding);
        rep.history.insert(rep.history.end(), r.history.begin(), r.history.end());
    }

    rep.memory_hash = matrix_hash(model.memory.rows);
    rep.memory_unchanged = rep.memory_hash == hash_before;
    return model;
}

BaselineModel make_baseline(std::size_t feature_dim, const std::vector<std::size_t>& hidden_dims,
                            std::size_t embed_dim, std::size_t num_scenes, std::uint64_t seed) {
    Rng rng = Rng(seed).fork(0xBA5E);
    std::vector<std::size_t> dims;
    dims.push_back(feature_dim);
    dims.insert(dims.end(), hidden_dims.begin(), hidden_dims.end());
    dims.push_back(embed_dim);
    dims.push_back(num_scenes);
    BaselineModel model;
    model.net = EmbeddingNet(dims, rng);
    return model;
}

RetrievalTrainResult train_baseline(BaselineModel& model,
                                    const std::vector<MultiSceneSample>& samples,
                                    const TrainSchedule& schedule) {
    schedule.validate();
    model.net.validate();
    if (samples.empty()) throw ArgumentError("train_baseline: empty dataset");
    const std::size_t feature_dim = model.net.input_dim();
    const std::size_t num_scenes = model.net.output_dim();

    ParamTape tape;
    model.net.collect_params(tape, "baseline");
    OptimizerState state;
    PlateauScheduler plateau(schedule.learning_rate, schedule.plateau_patience,
                             schedule.decay_factor);
    Rng rng = Rng(schedule.seed).fork(0x703);

    std::vector<std::size_t> order(samples.size());
    std::iota(order.begin(), order.end(), 0);

    RetrievalTrainResult result;
    Matrix batch, targets;
    for (std::size_t epoch = 1; epoch <= schedule.max_epochs; ++epoch) {
        rng.shuffle(order);
        double loss_sum = 0.0;
        double weight_sum = 0.0;
        for (std::size_t begin = 0; begin < order.size(); begin += schedule.batch_size) {
            const std::size_t end = std::min(begin + schedule.batch_size, order.size());
            fill_multi_batch(samples, order, begin, end, feature_dim, num_scenes, batch, targets);
            tape.zero_grads();
            EmbeddingCache cache;
            Matrix probs = model.net.forward(batch, &cache);
            sigmoid_inplace(probs);
            const double loss = bce_matrix_loss(probs, targets);
            model.net.backward(cache, bce_logit_grad(probs, targets));
            nadam_step(tape, state, schedule, plateau.learning_rate());
            loss_sum += loss * static_cast<double>(end - begin);
            weight_sum += static_cast<double>(end - begin);
        }
        const double train_loss = loss_sum / weight_sum;
        result.history.push_back({epoch, 0, plateau.learning_rate(), train_loss, train_loss});
        plateau.observe(train_loss);
    }
    return result;
}

std::string loss_history_csv(const std::vector<EpochRecord>& history) {
    std::ostringstream out;
    out << "epoch,phase,lr,train_loss,val_loss\n";
    for (const auto& record : history) {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%zu,%d,%.17g,%.17g,%.17g\n", record.epoch, record.phase,
                      record.learning_rate, record.train_loss, record.val_loss);
        out << buf;
    }
    return out.str();
}

}  // namespace pmnet
