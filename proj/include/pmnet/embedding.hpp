#pragma once

#include <string>
#include <vector>

#include "pmnet/matrix.hpp"
#include "pmnet/optim.hpp"
#include "pmnet/samples.hpp"
#include "pmnet/tape.hpp"

namespace pmnet {

enum class Activation { rectifier, none };

struct DenseLayer {
    Matrix weights;  // in_dim x out_dim
    Matrix bias;     // 1 x out_dim
    Activation activation = Activation::none;
    Matrix grad_weights;
    Matrix grad_bias;

    std::size_t in_dim() const { return weights.rows(); }
    std::size_t out_dim() const { return weights.cols(); }
};

/// Intermediate activations of one forward pass, kept so the backward pass
/// can run without recomputation.
struct EmbeddingCache {
    Matrix input;                      // batch x F
    std::vector<Matrix> pre;           // pre-activation per layer
    std::vector<Matrix> activations;   // post-activation per layer
};

/// The embedding function: a multilayer net mapping feature vectors to
/// D-dimensional embeddings. Hidden layers use the rectifier; the final layer
/// is linear so embeddings are unbounded reals.
class EmbeddingNet {
public:
    EmbeddingNet() = default;

    /// dims = {input, hidden..., output}; Glorot-uniform weights, zero biases.
    EmbeddingNet(const std::vector<std::size_t>& dims, Rng& rng);

    std::size_t input_dim() const;
    std::size_t output_dim() const;

    std::vector<DenseLayer>& layers() { return layers_; }
    const std::vector<DenseLayer>& layers() const { return layers_; }

    /// Batch forward pass; rows are samples. Fills `cache` when given.
    Matrix forward(const Matrix& batch, EmbeddingCache* cache = nullptr) const;

    /// Accumulates parameter gradients and returns the gradient with respect
    /// to the batch input.
    Matrix backward(const EmbeddingCache& cache, const Matrix& grad_output);

    void zero_grads();
    void collect_params(ParamTape& tape, const std::string& prefix);

    void validate() const;

private:
    std::vector<DenseLayer> layers_;
};

/// Deterministic single-vector forward pass through the net.
std::vector<double> embed(const EmbeddingNet& net, const std::vector<double>& features);

/// The auxiliary classifier on top of the embedding: one affine map whose
/// softmax output scores the single-scene classes.
struct ClassifierHead {
    Matrix weights;  // D x S
    Matrix bias;     // 1 x S
    Matrix grad_weights;
    Matrix grad_bias;

    ClassifierHead() = default;
    ClassifierHead(std::size_t embed_dim, std::size_t num_classes, Rng& rng);

    std::size_t embed_dim() const { return weights.rows(); }
    std::size_t num_classes() const { return weights.cols(); }

    void zero_grads();
    void collect_params(ParamTape& tape, const std::string& prefix);
};

struct CrossEntropyResult {
    double loss = 0.0;
    Matrix grad_logits;        // 1 x S, equals softmax(logits) - onehot(target)
    Matrix grad_head_weights;  // D x S
    Matrix grad_head_bias;     // 1 x S
    std::vector<double> grad_embedding;  // D
};

/// Softmax cross-entropy of one embedded sample against its class index,
/// with gradients for the head and for the embedding itself.
CrossEntropyResult cross_entropy_loss(const ClassifierHead& head,
                                      const std::vector<double>& embedding,
                                      std::size_t scene_index);

/// Batch cross-entropy (mean over the batch). Accumulates gradients into the
/// head; writes the embedding-batch gradient into `grad_embeddings` if given.
double cross_entropy_batch(ClassifierHead& head, const Matrix& embeddings,
                           const std::vector<std::size_t>& targets, Matrix* grad_embeddings);

/// Loss-only batch cross-entropy, used for validation and gradient checks.
double cross_entropy_eval(const ClassifierHead& head, const Matrix& embeddings,
                          const std::vector<std::size_t>& targets);

struct TripletResult {
    double loss = 0.0;
    std::vector<double> grad_anchor;
    std::vector<double> grad_positive;
    std::vector<double> grad_negative;
};

/// Hinge on squared euclidean distances: max(‖a−p‖² − ‖a−n‖² + alpha, 0).
/// Gradients are exactly zero when the hinge is inactive.
TripletResult triplet_loss(const std::vector<double>& anchor, const std::vector<double>& positive,
                           const std::vector<double>& negative, double alpha = 0.5);

enum class EmbeddingLoss { cross_entropy, triplet };

struct EpochRecord {
    std::size_t epoch = 0;
    int phase = 0;
    double learning_rate = 0.0;
    double train_loss = 0.0;
    double val_loss = 0.0;
};

struct EmbeddingTrainResult {
    std::vector<EpochRecord> history;
};

/// Phase-1 training: fit the embedding (and classifier head, in cross-entropy
/// mode) on single-scene samples with Nadam and plateau learning-rate decay.
/// 10% of the samples are held out per class for plateau detection when the
/// dataset is large enough; otherwise the training loss is used.
EmbeddingTrainResult train_embedding(EmbeddingNet& net, ClassifierHead& head,
                                     const std::vector<SingleSceneSample>& samples,
                                     const TrainSchedule& schedule,
                                     EmbeddingLoss loss_kind = EmbeddingLoss::cross_entropy);

}  // namespace pmnet
