#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pmnet/embedding.hpp"
#include "pmnet/metrics.hpp"
#include "pmnet/optim.hpp"
#include "pmnet/prototype.hpp"
#include "pmnet/retrieval.hpp"

namespace pmnet {

struct RetrievalTrainResult {
    std::vector<EpochRecord> history;
};

/// Phase-2 training: minimize binary cross-entropy of the retrieval module
/// (and optionally the embedding) on multi-scene samples. The memory is
/// frozen: its rows are bit-identical before and after. With
/// `freeze_embedding` set the embedding parameters are untouched as well.
/// Multi-scene sets are small, so the plateau policy runs on training loss.
RetrievalTrainResult train_retrieval(EmbeddingNet& net, const PrototypeMemory& memory,
                                     RetrievalModule& module,
                                     const std::vector<MultiSceneSample>& samples,
                                     const TrainSchedule& schedule, bool freeze_embedding);

/// Hyperparameters for the whole pipeline. Defaults: 2-hidden-layer
/// 256-unit embedding into 64 dims; 20 heads with key/value dims 256;
/// phase-1 learning rate 2e-4, phase-2 5e-4.
struct PipelineConfig {
    std::size_t feature_dim = 0;
    std::vector<std::size_t> hidden_dims = {256, 256};
    std::size_t embed_dim = 64;
    std::size_t key_dim = 256;
    std::size_t value_dim = 256;
    std::size_t num_heads = 20;
    std::size_t prototypes_per_scene = 1;
    PrototypeMethod prototype_method = PrototypeMethod::mean;
    RetrievalMode mode = RetrievalMode::standard;
    EmbeddingLoss phase1_loss = EmbeddingLoss::cross_entropy;
    bool freeze_embedding = false;
    double threshold = 0.5;
    TrainSchedule phase1;
    TrainSchedule phase2;
    std::uint64_t seed = 0;

    PipelineConfig() {
        phase1.learning_rate = 2e-4;
        phase2.learning_rate = 5e-4;
    }

    void validate() const;
};

/// A fully trained model: embedding net, auxiliary classifier, frozen
/// prototype memory and retrieval module, plus the configuration and the
/// source class names it was built from.
struct PmNetModel {
    EmbeddingNet net;
    ClassifierHead head;
    PrototypeMemory memory;
    RetrievalModule module;
    PipelineConfig config;
    std::vector<std::string> class_names;

    std::vector<double> predict_probs(const std::vector<double>& features) const {
        return predict(features, net, memory, module);
    }

    /// Callable view for evaluate(); the model must outlive it.
    Predictor predictor() const {
        return [this](const std::vector<double>& f) { return predict_probs(f); };
    }
};

struct TwoPhaseReport {
    std::vector<EpochRecord> history;  // phase-1 records then phase-2 records
    std::uint64_t memory_hash = 0;
    bool memory_unchanged = true;
};

/// The full pipeline: train the embedding on single-scene samples, build the
/// prototype memory, then train the retrieval module on multi-scene samples.
/// Multi-scene label vectors must be aligned with
/// derive_scene_names(class_names, merge). Deterministic given the seed.
PmNetModel run_two_phase(const PipelineConfig& config,
                         const std::vector<SingleSceneSample>& single_samples,
                         const std::vector<std::string>& class_names, const LabelMergeMap& merge,
                         const std::vector<MultiSceneSample>& multi_train,
                         TwoPhaseReport* report = nullptr);

/// Plain feedforward multi-label classifier over the same feature vectors;
/// the from-scratch reference PM-Net is compared against.
struct BaselineModel {
    EmbeddingNet net;  // final layer maps to one logit per scene

    std::vector<double> predict_probs(const std::vector<double>& features) const {
        return sigmoid(embed(net, features));
    }

    Predictor predictor() const {
        return [this](const std::vector<double>& f) { return predict_probs(f); };
    }
};

BaselineModel make_baseline(std::size_t feature_dim, const std::vector<std::size_t>& hidden_dims,
                            std::size_t embed_dim, std::size_t num_scenes, std::uint64_t seed);

RetrievalTrainResult train_baseline(BaselineModel& model,
                                    const std::vector<MultiSceneSample>& samples,
                                    const TrainSchedule& schedule);

/// CSV with one row per epoch: epoch,phase,lr,train_loss,val_loss.
std::string loss_history_csv(const std::vector<EpochRecord>& history);

}  // namespace pmnet
