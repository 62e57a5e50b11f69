#include "pmnet/retrieval.hpp"

#include <cmath>
#include <string>

#include "pmnet/error.hpp"

namespace pmnet {

namespace {

constexpr double kProbFloor = 1e-12;

void require_memory_matches(const PrototypeMemory& memory, std::size_t embed_dim,
                            const char* op) {
    if (memory.dim() != embed_dim) {
        throw ShapeError(std::string(op) + ": memory dim " + std::to_string(memory.dim()) +
                         " vs projection dim " + std::to_string(embed_dim));
    }
    if (memory.row_count() == 0) throw ArgumentError(std::string(op) + ": empty memory");
}

Matrix affine(const Matrix& input, const Matrix& weights, const Matrix& bias) {
    Matrix out = matmul(input, weights);
    add_row_broadcast(out, bias);
    return out;
}

/// Row-wise softmax Jacobian applied to an upstream gradient:
/// d logit_j = r_j * (g_j - sum_k g_k r_k).
Matrix softmax_rows_backward(const Matrix& softmax_out, const Matrix& grad_out) {
    Matrix grad(softmax_out.rows(), softmax_out.cols());
    for (std::size_t i = 0; i < softmax_out.rows(); ++i) {
        const double* r = softmax_out.row(i);
        const double* g = grad_out.row(i);
        double dot = 0.0;
        for (std::size_t j = 0; j < softmax_out.cols(); ++j) dot += g[j] * r[j];
        double* out = grad.row(i);
        for (std::size_t j = 0; j < softmax_out.cols(); ++j) out[j] = r[j] * (g[j] - dot);
    }
    return grad;
}

}  // namespace

RetrievalHead::RetrievalHead(std::size_t embed_dim, std::size_t key_dim, std::size_t value_dim,
                             Rng& rng) {
    if (embed_dim == 0 || key_dim == 0 || value_dim == 0) {
        throw ArgumentError("retrieval head: dims must be positive");
    }
    query_weights = Matrix(embed_dim, key_dim);
    key_weights = Matrix(embed_dim, key_dim);
    value_weights = Matrix(embed_dim, value_dim);
    glorot_fill(query_weights, embed_dim, key_dim, rng);
    glorot_fill(key_weights, embed_dim, key_dim, rng);
    glorot_fill(value_weights, embed_dim, value_dim, rng);
    query_bias = Matrix(1, key_dim);
    key_bias = Matrix(1, key_dim);
    value_bias = Matrix(1, value_dim);
    grad_query_weights = Matrix(embed_dim, key_dim);
    grad_query_bias = Matrix(1, key_dim);
    grad_key_weights = Matrix(embed_dim, key_dim);
    grad_key_bias = Matrix(1, key_dim);
    grad_value_weights = Matrix(embed_dim, value_dim);
    grad_value_bias = Matrix(1, value_dim);
}

void RetrievalHead::zero_grads() {
    grad_query_weights.fill(0.0);
    grad_query_bias.fill(0.0);
    grad_key_weights.fill(0.0);
    grad_key_bias.fill(0.0);
    grad_value_weights.fill(0.0);
    grad_value_bias.fill(0.0);
}

void RetrievalHead::collect_params(ParamTape& tape, const std::string& prefix) {
    tape.add(prefix + ".query.weights", query_weights, grad_query_weights);
    tape.add(prefix + ".query.bias", query_bias, grad_query_bias);
    tape.add(prefix + ".key.weights", key_weights, grad_key_weights);
    tape.add(prefix + ".key.bias", key_bias, grad_key_bias);
    tape.add(prefix + ".value.weights", value_weights, grad_value_weights);
    tape.add(prefix + ".value.bias", value_bias, grad_value_bias);
}

RetrievalMode retrieval_mode_from_string(const std::string& name) {
    if (name == "standard") return RetrievalMode::standard;
    if (name == "relevance-as-prediction" || name == "relevance_as_prediction") {
        return RetrievalMode::relevance_as_prediction;
    }
    throw ArgumentError("unknown retrieval mode '" + name + "'");
}

std::string to_string(RetrievalMode mode) {
    return mode == RetrievalMode::standard ? "standard" : "relevance-as-prediction";
}

RetrievalModule::RetrievalModule(std::size_t embed_dim, std::size_t key_dim,
                                 std::size_t value_dim, std::size_t num_heads,
                                 std::size_t num_scenes, RetrievalMode mode_in, Rng& rng)
    : mode(mode_in) {
    if (num_heads == 0) throw ArgumentError("retrieval module: needs at least one head");
    if (mode == RetrievalMode::relevance_as_prediction && num_heads != 1) {
        throw ArgumentError("retrieval module: relevance-as-prediction requires exactly one head");
    }
    heads.reserve(num_heads);
    for (std::size_t h = 0; h < num_heads; ++h) {
        heads.emplace_back(embed_dim, key_dim, value_dim, rng);
    }
    if (mode == RetrievalMode::standard) {
        const std::size_t concat_dim = num_heads * value_dim;
        out_weights = Matrix(concat_dim, num_scenes);
        glorot_fill(out_weights, concat_dim, num_scenes, rng);
        out_bias = Matrix(1, num_scenes);
        grad_out_weights = Matrix(concat_dim, num_scenes);
        grad_out_bias = Matrix(1, num_scenes);
    }
}

void RetrievalModule::zero_grads() {
    for (auto& head : heads) head.zero_grads();
    if (mode == RetrievalMode::standard) {
        grad_out_weights.fill(0.0);
        grad_out_bias.fill(0.0);
    }
}

void RetrievalModule::collect_params(ParamTape& tape, const std::string& prefix) {
    for (std::size_t h = 0; h < heads.size(); ++h) {
        heads[h].collect_params(tape, prefix + ".head" + std::to_string(h));
    }
    if (mode == RetrievalMode::standard) {
        tape.add(prefix + ".out.weights", out_weights, grad_out_weights);
        tape.add(prefix + ".out.bias", out_bias, grad_out_bias);
    }
}

void RetrievalModule::validate() const {
    if (heads.empty()) throw StateError("retrieval module: no heads");
    if (mode == RetrievalMode::relevance_as_prediction) {
        if (heads.size() != 1) {
            throw StateError("retrieval module: relevance-as-prediction requires one head");
        }
        if (!out_weights.empty()) {
            throw StateError("retrieval module: relevance-as-prediction has no output layer");
        }
        return;
    }
    if (out_weights.rows() != heads.size() * value_dim()) {
        throw StateError("retrieval module: output layer does not match H * U");
    }
    for (const auto& head : heads) {
        if (head.embed_dim() != embed_dim() || head.key_dim() != key_dim() ||
            head.value_dim() != value_dim()) {
            throw StateError("retrieval module: heads disagree on dims");
        }
    }
}

std::vector<double> relevance(const std::vector<double>& query_embedding,
                              const PrototypeMemory& memory, const RetrievalHead& head) {
    if (query_embedding.size() != head.embed_dim()) {
        throw ShapeError("relevance: embedding dim mismatch");
    }
    require_memory_matches(memory, head.embed_dim(), "relevance");
    const Matrix query = affine(Matrix::row_vector(query_embedding), head.query_weights,
                                head.query_bias);
    const Matrix keys = affine(memory.rows, head.key_weights, head.key_bias);
    Matrix logits = matmul_nt(query, keys);
    scale_inplace(logits, 1.0 / std::sqrt(static_cast<double>(head.key_dim())));
    return softmax_row(logits.row_copy(0));
}

std::vector<double> retrieve(const std::vector<double>& query_embedding,
                             const PrototypeMemory& memory, const RetrievalHead& head) {
    const std::vector<double> weights = relevance(query_embedding, memory, head);
    const Matrix values = affine(memory.rows, head.value_weights, head.value_bias);
    return matmul(Matrix::row_vector(weights), values).row_copy(0);
}

std::vector<double> multi_head_retrieve(const std::vector<double>& query_embedding,
                                        const PrototypeMemory& memory,
                                        const RetrievalModule& module) {
    if (module.mode != RetrievalMode::standard) {
        throw StateError("multi_head_retrieve: module is not in standard mode");
    }
    std::vector<double> concat;
    concat.reserve(module.num_heads() * module.value_dim());
    for (const auto& head : module.heads) {
        const std::vector<double> z = retrieve(query_embedding, memory, head);
        concat.insert(concat.end(), z.begin(), z.end());
    }
    return concat;
}

Matrix retrieval_logits(const Matrix& embeddings, const PrototypeMemory& memory,
                        const RetrievalModule& module, RetrievalCache* cache) {
    module.validate();
    require_memory_matches(memory, module.embed_dim(), "retrieval");
    if (embeddings.cols() != module.embed_dim()) {
        throw ShapeError("retrieval: embedding dim mismatch");
    }
    const std::size_t batch = embeddings.rows();
    const std::size_t value_dim = module.value_dim();
    const double scale = 1.0 / std::sqrt(static_cast<double>(module.key_dim()));

    if (cache) {
        cache->embeddings = embeddings;
        cache->heads.assign(module.num_heads(), {});
    }

    if (module.mode == RetrievalMode::relevance_as_prediction) {
        // Predictions are the single head's scaled pre-softmax logits; one
        // memory row per scene is required for them to line up with labels.
        if (memory.row_count() != memory.scene_count()) {
            throw StateError("relevance-as-prediction requires one prototype per scene");
        }
        const RetrievalHead& head = module.heads.front();
        Matrix queries = affine(embeddings, head.query_weights, head.query_bias);
        Matrix keys = affine(memory.rows, head.key_weights, head.key_bias);
        Matrix logits = matmul_nt(queries, keys);
        scale_inplace(logits, scale);
        if (cache) {
            cache->heads[0].queries = std::move(queries);
            cache->heads[0].keys = std::move(keys);
            cache->logits = logits;
        }
        return logits;
    }

    Matrix concat(batch, module.num_heads() * value_dim);
    for (std::size_t h = 0; h < module.num_heads(); ++h) {
        const RetrievalHead& head = module.heads[h];
        Matrix queries = affine(embeddings, head.query_weights, head.query_bias);
        Matrix keys = affine(memory.rows, head.key_weights, head.key_bias);
        Matrix values = affine(memory.rows, head.value_weights, head.value_bias);
        Matrix relevances = matmul_nt(queries, keys);
        scale_inplace(relevances, scale);
        softmax_rows_inplace(relevances);
        Matrix retrieved = matmul(relevances, values);
        for (std::size_t b = 0; b < batch; ++b) {
            const double* src = retrieved.row(b);
            double* dst = concat.row(b) + h * value_dim;
            for (std::size_t j = 0; j < value_dim; ++j) dst[j] = src[j];
        }
        if (cache) {
            cache->heads[h] = {std::move(queries), std::move(keys), std::move(values),
                               std::move(relevances), std::move(retrieved)};
        }
    }
    Matrix logits = affine(concat, module.out_weights, module.out_bias);
    if (cache) {
        cache->concat = std::move(concat);
        cache->logits = logits;
    }
    return logits;
}

Matrix retrieval_backward(RetrievalModule& module, const PrototypeMemory& memory,
                          const RetrievalCache& cache, const Matrix& grad_logits) {
    const std::size_t batch = cache.embeddings.rows();
    const std::size_t value_dim = module.value_dim();
    const double scale = 1.0 / std::sqrt(static_cast<double>(module.key_dim()));
    Matrix grad_embeddings(batch, module.embed_dim());

    if (module.mode == RetrievalMode::relevance_as_prediction) {
        RetrievalHead& head = module.heads.front();
        const auto& hc = cache.heads.front();
        Matrix grad_scores = grad_logits;
        scale_inplace(grad_scores, scale);
        const Matrix grad_queries = matmul(grad_scores, hc.keys);
        const Matrix grad_keys = matmul_tn(grad_scores, hc.queries);
        add_inplace(head.grad_query_weights, matmul_tn(cache.embeddings, grad_queries));
        add_inplace(head.grad_query_bias, col_sums(grad_queries));
        add_inplace(head.grad_key_weights, matmul_tn(memory.rows, grad_keys));
        add_inplace(head.grad_key_bias, col_sums(grad_keys));
        add_inplace(grad_embeddings, matmul_nt(grad_queries, head.query_weights));
        return grad_embeddings;
    }

    add_inplace(module.grad_out_weights, matmul_tn(cache.concat, grad_logits));
    add_inplace(module.grad_out_bias, col_sums(grad_logits));
    const Matrix grad_concat = matmul_nt(grad_logits, module.out_weights);

    for (std::size_t h = 0; h < module.num_heads(); ++h) {
        RetrievalHead& head = module.heads[h];
        const auto& hc = cache.heads[h];
        Matrix grad_retrieved(batch, value_dim);
        for (std::size_t b = 0; b < batch; ++b) {
            const double* src = grad_concat.row(b) + h * value_dim;
            double* dst = grad_retrieved.row(b);
            for (std::size_t j = 0; j < value_dim; ++j) dst[j] = src[j];
        }

        const Matrix grad_relevances = matmul_nt(grad_retrieved, hc.values);
        const Matrix grad_values = matmul_tn(hc.relevances, grad_retrieved);
        Matrix grad_scores = softmax_rows_backward(hc.relevances, grad_relevances);
        scale_inplace(grad_scores, scale);
        const Matrix grad_queries = matmul(grad_scores, hc.keys);
        const Matrix grad_keys = matmul_tn(grad_scores, hc.queries);

        add_inplace(head.grad_query_weights, matmul_tn(cache.embeddings, grad_queries));
        add_inplace(head.grad_query_bias, col_sums(grad_queries));
        add_inplace(head.grad_key_weights, matmul_tn(memory.rows, grad_keys));
        add_inplace(head.grad_key_bias, col_sums(grad_keys));
        add_inplace(head.grad_value_weights, matmul_tn(memory.rows, grad_values));
        add_inplace(head.grad_value_bias, col_sums(grad_values));
        add_inplace(grad_embeddings, matmul_nt(grad_queries, head.query_weights));
    }
    return grad_embeddings;
}

std::vector<double> predict(const std::vector<double>& features, const EmbeddingNet& net,
                            const PrototypeMemory& memory, const RetrievalModule& module) {
    const Matrix embeddings = net.forward(Matrix::row_vector(features));
    Matrix logits = retrieval_logits(embeddings, memory, module);
    sigmoid_inplace(logits);
    return logits.row_copy(0);
}

BceResult bce_loss(const std::vector<double>& probs, const std::vector<int>& labels) {
    if (probs.size() != labels.size()) {
        throw ShapeError("bce_loss: probability and label lengths differ");
    }
    if (probs.empty()) throw ArgumentError("bce_loss: empty input");
    BceResult result;
    result.grad_probs.assign(probs.size(), 0.0);
    const double n = static_cast<double>(probs.size());
    for (std::size_t i = 0; i < probs.size(); ++i) {
        const double p = std::min(std::max(probs[i], kProbFloor), 1.0 - kProbFloor);
        const double y = labels[i] != 0 ? 1.0 : 0.0;
        result.loss += -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
        result.grad_probs[i] = (-y / p + (1.0 - y) / (1.0 - p)) / n;
    }
    result.loss /= n;
    return result;
}

double bce_matrix_loss(const Matrix& probs, const Matrix& targets) {
    if (!probs.same_shape(targets)) throw ShapeError("bce: shape mismatch");
    if (probs.empty()) throw ArgumentError("bce: empty input");
    double total = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        const double p = std::min(std::max(probs.data()[i], kProbFloor), 1.0 - kProbFloor);
        const double y = targets.data()[i];
        total += -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
    }
    return total / static_cast<double>(probs.size());
}

Matrix bce_logit_grad(const Matrix& probs, const Matrix& targets) {
    if (!probs.same_shape(targets)) throw ShapeError("bce: shape mismatch");
    Matrix grad(probs.rows(), probs.cols());
    const double n = static_cast<double>(probs.size());
    for (std::size_t i = 0; i < probs.size(); ++i) {
        grad.data()[i] = (probs.data()[i] - targets.data()[i]) / n;
    }
    return grad;
}

}  // namespace pmnet
