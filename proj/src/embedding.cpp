#include "pmnet/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "pmnet/error.hpp"

namespace pmnet {

namespace {

Matrix batch_from_samples(const std::vector<SingleSceneSample>& samples,
                          const std::vector<std::size_t>& indices, std::size_t begin,
                          std::size_t end, std::size_t feature_dim) {
    Matrix batch(end - begin, feature_dim);
    for (std::size_t b = begin; b < end; ++b) {
        const auto& f = samples[indices[b]].features;
        if (f.size() != feature_dim) throw ShapeError("train_embedding: ragged feature vector");
        batch.set_row(b - begin, f);
    }
    return batch;
}

double log_sum_exp(const double* values, std::size_t n) {
    const double peak = *std::max_element(values, values + n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += std::exp(values[i] - peak);
    return peak + std::log(total);
}

Matrix head_logits(const ClassifierHead& head, const Matrix& embeddings) {
    Matrix logits = matmul(embeddings, head.weights);
    add_row_broadcast(logits, head.bias);
    return logits;
}

}  // namespace

double cross_entropy_eval(const ClassifierHead& head, const Matrix& embeddings,
                          const std::vector<std::size_t>& targets) {
    if (targets.size() != embeddings.rows()) {
        throw ShapeError("cross_entropy_eval: one target per row required");
    }
    const Matrix logits = head_logits(head, embeddings);
    double total = 0.0;
    for (std::size_t b = 0; b < logits.rows(); ++b) {
        total += log_sum_exp(logits.row(b), logits.cols()) - logits(b, targets[b]);
    }
    return total / static_cast<double>(logits.rows());
}

EmbeddingNet::EmbeddingNet(const std::vector<std::size_t>& dims, Rng& rng) {
    if (dims.size() < 2) throw ArgumentError("embedding net needs at least input and output dims");
    layers_.reserve(dims.size() - 1);
    for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
        DenseLayer layer;
        layer.weights = Matrix(dims[i], dims[i + 1]);
        glorot_fill(layer.weights, dims[i], dims[i + 1], rng);
        layer.bias = Matrix(1, dims[i + 1]);
        layer.activation =
            (i + 2 == dims.size()) ? Activation::none : Activation::rectifier;
        layer.grad_weights = Matrix(dims[i], dims[i + 1]);
        layer.grad_bias = Matrix(1, dims[i + 1]);
        layers_.push_back(std::move(layer));
    }
}

std::size_t EmbeddingNet::input_dim() const {
    return layers_.empty() ? 0 : layers_.front().in_dim();
}

std::size_t EmbeddingNet::output_dim() const {
    return layers_.empty() ? 0 : layers_.back().out_dim();
}

void EmbeddingNet::validate() const {
    if (layers_.empty()) throw StateError("embedding net has no layers");
    for (std::size_t i = 0; i + 1 < layers_.size(); ++i) {
        if (layers_[i].out_dim() != layers_[i + 1].in_dim()) {
            throw ShapeError("embedding net: layer dims do not chain");
        }
    }
    if (layers_.back().activation != Activation::none) {
        throw StateError("embedding net: final layer must be linear");
    }
}

Matrix EmbeddingNet::forward(const Matrix& batch, EmbeddingCache* cache) const {
    if (layers_.empty()) throw StateError("embedding net has no layers");
    if (batch.cols() != input_dim()) {
        throw ShapeError("embedding forward: expected " + std::to_string(input_dim()) +
                         " features, got " + std::to_string(batch.cols()));
    }
    if (cache) {
        cache->input = batch;
        cache->pre.clear();
        cache->activations.clear();
    }
    Matrix h = batch;
    for (const DenseLayer& layer : layers_) {
        Matrix pre = matmul(h, layer.weights);
        add_row_broadcast(pre, layer.bias);
        h = pre;
        if (layer.activation == Activation::rectifier) relu_inplace(h);
        if (cache) {
            cache->pre.push_back(std::move(pre));
            cache->activations.push_back(h);
        }
    }
    return h;
}

Matrix EmbeddingNet::backward(const EmbeddingCache& cache, const Matrix& grad_output) {
    if (cache.pre.size() != layers_.size()) {
        throw StateError("embedding backward: cache does not match the net");
    }
    Matrix grad = grad_output;
    for (std::size_t li = layers_.size(); li-- > 0;) {
        DenseLayer& layer = layers_[li];
        if (layer.activation == Activation::rectifier) {
            relu_backward_inplace(grad, cache.pre[li]);
        }
        const Matrix& layer_input = (li == 0) ? cache.input : cache.activations[li - 1];
        add_inplace(layer.grad_weights, matmul_tn(layer_input, grad));
        add_inplace(layer.grad_bias, col_sums(grad));
        grad = matmul_nt(grad, layer.weights);
    }
    return grad;
}

void EmbeddingNet::zero_grads() {
    for (DenseLayer& layer : layers_) {
        layer.grad_weights.fill(0.0);
        layer.grad_bias.fill(0.0);
    }
}

void EmbeddingNet::collect_params(ParamTape& tape, const std::string& prefix) {
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        const std::string base = prefix + ".layer" + std::to_string(i);
        tape.add(base + ".weights", layers_[i].weights, layers_[i].grad_weights);
        tape.add(base + ".bias", layers_[i].bias, layers_[i].grad_bias);
    }
}

std::vector<double> embed(const EmbeddingNet& net, const std::vector<double>& features) {
    const Matrix out = net.forward(Matrix::row_vector(features));
    return out.row_copy(0);
}

ClassifierHead::ClassifierHead(std::size_t embed_dim, std::size_t num_classes, Rng& rng) {
    weights = Matrix(embed_dim, num_classes);
    glorot_fill(weights, embed_dim, num_classes, rng);
    bias = Matrix(1, num_classes);
    grad_weights = Matrix(embed_dim, num_classes);
    grad_bias = Matrix(1, num_classes);
}

void ClassifierHead::zero_grads() {
    grad_weights.fill(0.0);
    grad_bias.fill(0.0);
}

void ClassifierHead::collect_params(ParamTape& tape, const std::string& prefix) {
    tape.add(prefix + ".weights", weights, grad_weights);
    tape.add(prefix + ".bias", bias, grad_bias);
}

CrossEntropyResult cross_entropy_loss(const ClassifierHead& head,
                                      const std::vector<double>& embedding,
                                      std::size_t scene_index) {
    if (embedding.size() != head.embed_dim()) {
        throw ShapeError("cross_entropy_loss: embedding dim mismatch");
    }
    if (scene_index >= head.num_classes()) {
        throw ArgumentError("cross_entropy_loss: scene index out of range");
    }
    const Matrix e = Matrix::row_vector(embedding);
    const Matrix logits = head_logits(head, e);
    CrossEntropyResult result;
    result.loss = log_sum_exp(logits.row(0), logits.cols()) - logits(0, scene_index);

    result.grad_logits = Matrix(1, logits.cols());
    std::vector<double> probs = softmax_row(logits.row_copy(0));
    for (std::size_t j = 0; j < probs.size(); ++j) result.grad_logits(0, j) = probs[j];
    result.grad_logits(0, scene_index) -= 1.0;

    result.grad_head_weights = matmul_tn(e, result.grad_logits);
    result.grad_head_bias = result.grad_logits;
    result.grad_embedding = matmul_nt(result.grad_logits, head.weights).row_copy(0);
    return result;
}

double cross_entropy_batch(ClassifierHead& head, const Matrix& embeddings,
                           const std::vector<std::size_t>& targets, Matrix* grad_embeddings) {
    if (targets.size() != embeddings.rows()) {
        throw ShapeError("cross_entropy_batch: one target per row required");
    }
    Matrix logits = head_logits(head, embeddings);
    const double batch = static_cast<double>(logits.rows());
    double total = 0.0;
    Matrix grad_logits = logits;  // reuse storage; overwritten row by row
    for (std::size_t b = 0; b < logits.rows(); ++b) {
        if (targets[b] >= logits.cols()) {
            throw ArgumentError("cross_entropy_batch: scene index out of range");
        }
        total += log_sum_exp(logits.row(b), logits.cols()) - logits(b, targets[b]);
        std::vector<double> probs = softmax_row(logits.row_copy(b));
        for (std::size_t j = 0; j < probs.size(); ++j) grad_logits(b, j) = probs[j] / batch;
        grad_logits(b, targets[b]) -= 1.0 / batch;
    }
    add_inplace(head.grad_weights, matmul_tn(embeddings, grad_logits));
    add_inplace(head.grad_bias, col_sums(grad_logits));
    if (grad_embeddings) *grad_embeddings = matmul_nt(grad_logits, head.weights);
    return total / batch;
}

TripletResult triplet_loss(const std::vector<double>& anchor, const std::vector<double>& positive,
                           const std::vector<double>& negative, double alpha) {
    if (anchor.size() != positive.size() || anchor.size() != negative.size()) {
        throw ShapeError("triplet_loss: vectors must have equal length");
    }
    if (alpha < 0.0) throw ArgumentError("triplet_loss: alpha must be >= 0");
    double dist_pos = 0.0;
    double dist_neg = 0.0;
    for (std::size_t i = 0; i < anchor.size(); ++i) {
        const double dp = anchor[i] - positive[i];
        const double dn = anchor[i] - negative[i];
        dist_pos += dp * dp;
        dist_neg += dn * dn;
    }
    TripletResult result;
    result.grad_anchor.assign(anchor.size(), 0.0);
    result.grad_positive.assign(anchor.size(), 0.0);
    result.grad_negative.assign(anchor.size(), 0.0);
    const double hinge = dist_pos - dist_neg + alpha;
    if (hinge <= 0.0) {
        result.loss = 0.0;
        return result;
    }
    result.loss = hinge;
    for (std::size_t i = 0; i < anchor.size(); ++i) {
        result.grad_anchor[i] = 2.0 * (negative[i] - positive[i]);
        result.grad_positive[i] = -2.0 * (anchor[i] - positive[i]);
        result.grad_negative[i] = 2.0 * (anchor[i] - negative[i]);
    }
    return result;
}

namespace {

/// Seeded stratified holdout for plateau detection; returns false (and leaves
/// `val` empty) when the dataset is too small to spare validation samples.
bool holdout_split(const std::vector<SingleSceneSample>& samples, std::uint64_t seed,
                   std::vector<std::size_t>& train_idx, std::vector<std::size_t>& val_idx) {
    std::size_t num_classes = 0;
    for (const auto& s : samples) num_classes = std::max(num_classes, s.scene_index + 1);
    std::vector<std::vector<std::size_t>> by_class(num_classes);
    for (std::size_t i = 0; i < samples.size(); ++i) by_class[samples[i].scene_index].push_back(i);

    Rng rng = Rng(seed).fork(0x511);
    train_idx.clear();
    val_idx.clear();
    for (auto& group : by_class) {
        rng.shuffle(group);
        const std::size_t held = group.size() / 10;
        for (std::size_t i = 0; i < group.size(); ++i) {
            (i < held ? val_idx : train_idx).push_back(group[i]);
        }
    }
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(val_idx.begin(), val_idx.end());
    return !val_idx.empty();
}

struct TripletPick {
    std::size_t anchor, positive, negative;
};

/// Uniform-random positive/negative per anchor within the batch. Anchors with
/// no differently-labeled batch member are skipped.
std::vector<TripletPick> pick_triplets(const std::vector<SingleSceneSample>& samples,
                                       const std::vector<std::size_t>& indices, std::size_t begin,
                                       std::size_t end, Rng& rng) {
    std::vector<TripletPick> picks;
    for (std::size_t a = begin; a < end; ++a) {
        const std::size_t anchor_class = samples[indices[a]].scene_index;
        std::vector<std::size_t> positives;
        std::vector<std::size_t> negatives;
        for (std::size_t b = begin; b < end; ++b) {
            if (b == a) continue;
            (samples[indices[b]].scene_index == anchor_class ? positives : negatives).push_back(b);
        }
        if (negatives.empty()) continue;
        const std::size_t pos = positives.empty() ? a : positives[rng.index(positives.size())];
        const std::size_t neg = negatives[rng.index(negatives.size())];
        picks.push_back({a - begin, pos - begin, neg - begin});
    }
    return picks;
}

double triplet_batch(EmbeddingNet& net, const Matrix& batch,
                     const std::vector<TripletPick>& picks, bool with_grads) {
    EmbeddingCache cache;
    const Matrix embeddings = net.forward(batch, with_grads ? &cache : nullptr);
    if (picks.empty()) return 0.0;
    Matrix grad(embeddings.rows(), embeddings.cols());
    double total = 0.0;
    const double scale = 1.0 / static_cast<double>(picks.size());
    for (const TripletPick& pick : picks) {
        const TripletResult r =
            triplet_loss(embeddings.row_copy(pick.anchor), embeddings.row_copy(pick.positive),
                         embeddings.row_copy(pick.negative));
        total += r.loss;
        if (!with_grads) continue;
        for (std::size_t j = 0; j < embeddings.cols(); ++j) {
            grad(pick.anchor, j) += scale * r.grad_anchor[j];
            grad(pick.positive, j) += scale * r.grad_positive[j];
            grad(pick.negative, j) += scale * r.grad_negative[j];
        }
    }
    if (with_grads) net.backward(cache, grad);
    return total * scale;
}

}  // namespace

EmbeddingTrainResult train_embedding(EmbeddingNet& net, ClassifierHead& head,
                                     const std::vector<SingleSceneSample>& samples,
                                     const TrainSchedule& schedule, EmbeddingLoss loss_kind) {
    schedule.validate();
    net.validate();
    if (samples.empty()) throw ArgumentError("train_embedding: empty dataset");
    const std::size_t feature_dim = net.input_dim();

    std::size_t num_classes = 0;
    for (const auto& s : samples) num_classes = std::max(num_classes, s.scene_index + 1);
    if (loss_kind == EmbeddingLoss::cross_entropy && head.num_classes() < num_classes) {
        throw ShapeError("train_embedding: classifier head too small for the class count");
    }
    if (loss_kind == EmbeddingLoss::triplet && num_classes < 2) {
        throw ArgumentError("train_embedding: triplet loss needs at least two classes");
    }

    std::vector<std::size_t> train_idx;
    std::vector<std::size_t> val_idx;
    const bool has_val = holdout_split(samples, schedule.seed, train_idx, val_idx);

    ParamTape tape;
    net.collect_params(tape, "embedding");
    if (loss_kind == EmbeddingLoss::cross_entropy) head.collect_params(tape, "classifier");

    OptimizerState state;
    PlateauScheduler plateau(schedule.learning_rate, schedule.plateau_patience,
                             schedule.decay_factor);
    Rng rng = Rng(schedule.seed).fork(0x701);

    EmbeddingTrainResult result;
    for (std::size_t epoch = 1; epoch <= schedule.max_epochs; ++epoch) {
        rng.shuffle(train_idx);
        double loss_sum = 0.0;
        double weight_sum = 0.0;
        for (std::size_t begin = 0; begin < train_idx.size(); begin += schedule.batch_size) {
            const std::size_t end = std::min(begin + schedule.batch_size, train_idx.size());
            const Matrix batch = batch_from_samples(samples, train_idx, begin, end, feature_dim);
            tape.zero_grads();
            double loss = 0.0;
            double weight = 0.0;
            if (loss_kind == EmbeddingLoss::cross_entropy) {
                std::vector<std::size_t> targets(end - begin);
                for (std::size_t b = begin; b < end; ++b) {
                    targets[b - begin] = samples[train_idx[b]].scene_index;
                }
                EmbeddingCache cache;
                const Matrix embeddings = net.forward(batch, &cache);
                Matrix grad_embeddings;
                loss = cross_entropy_batch(head, embeddings, targets, &grad_embeddings);
                net.backward(cache, grad_embeddings);
                weight = static_cast<double>(end - begin);
            } else {
                const auto picks = pick_triplets(samples, train_idx, begin, end, rng);
                if (picks.empty()) continue;
                loss = triplet_batch(net, batch, picks, true);
                weight = static_cast<double>(picks.size());
            }
            nadam_step(tape, state, schedule, plateau.learning_rate());
            loss_sum += loss * weight;
            weight_sum += weight;
        }
        const double train_loss = weight_sum > 0.0 ? loss_sum / weight_sum : 0.0;

        double val_loss = train_loss;
        if (has_val) {
            const Matrix val_batch =
                batch_from_samples(samples, val_idx, 0, val_idx.size(), feature_dim);
            if (loss_kind == EmbeddingLoss::cross_entropy) {
                std::vector<std::size_t> targets(val_idx.size());
                for (std::size_t i = 0; i < val_idx.size(); ++i) {
                    targets[i] = samples[val_idx[i]].scene_index;
                }
                val_loss = cross_entropy_eval(head, net.forward(val_batch), targets);
            } else {
                Rng val_rng = Rng(schedule.seed).fork(0x9000 + epoch);
                const auto picks = pick_triplets(samples, val_idx, 0, val_idx.size(), val_rng);
                val_loss = picks.empty() ? train_loss : triplet_batch(net, val_batch, picks, false);
            }
        }

        result.history.push_back({epoch, 1, plateau.learning_rate(), train_loss, val_loss});
        plateau.observe(val_loss);
    }
    return result;
}

}  // namespace pmnet
