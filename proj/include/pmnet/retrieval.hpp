#pragma once

#include <string>
#include <vector>

#include "pmnet/embedding.hpp"
#include "pmnet/matrix.hpp"
#include "pmnet/prototype.hpp"

namespace pmnet {

/// One attention head: affine query/key/value projections. Queries come from
/// the embedded input, keys and values from the prototype memory. Biases are
/// zero-initialized so the head starts out as a pure linear map.
struct RetrievalHead {
    Matrix query_weights, query_bias;  // D x L, 1 x L
    Matrix key_weights, key_bias;      // D x L, 1 x L
    Matrix value_weights, value_bias;  // D x U, 1 x U
    Matrix grad_query_weights, grad_query_bias;
    Matrix grad_key_weights, grad_key_bias;
    Matrix grad_value_weights, grad_value_bias;

    RetrievalHead() = default;
    RetrievalHead(std::size_t embed_dim, std::size_t key_dim, std::size_t value_dim, Rng& rng);

    std::size_t embed_dim() const { return query_weights.rows(); }
    std::size_t key_dim() const { return query_weights.cols(); }
    std::size_t value_dim() const { return value_weights.cols(); }

    void zero_grads();
    void collect_params(ParamTape& tape, const std::string& prefix);
};

enum class RetrievalMode { standard, relevance_as_prediction };

RetrievalMode retrieval_mode_from_string(const std::string& name);
std::string to_string(RetrievalMode mode);

/// H attention heads plus the sigmoid fully-connected prediction layer. In
/// relevance_as_prediction mode there is exactly one head and no output
/// layer: the head's pre-softmax relevance logits are the predictions.
struct RetrievalModule {
    std::vector<RetrievalHead> heads;
    Matrix out_weights;  // (H*U) x S; empty in relevance_as_prediction mode
    Matrix out_bias;     // 1 x S
    Matrix grad_out_weights, grad_out_bias;
    RetrievalMode mode = RetrievalMode::standard;

    RetrievalModule() = default;
    RetrievalModule(std::size_t embed_dim, std::size_t key_dim, std::size_t value_dim,
                    std::size_t num_heads, std::size_t num_scenes, RetrievalMode mode, Rng& rng);

    std::size_t num_heads() const { return heads.size(); }
    std::size_t embed_dim() const { return heads.empty() ? 0 : heads.front().embed_dim(); }
    std::size_t key_dim() const { return heads.empty() ? 0 : heads.front().key_dim(); }
    std::size_t value_dim() const { return heads.empty() ? 0 : heads.front().value_dim(); }

    void zero_grads();
    void collect_params(ParamTape& tape, const std::string& prefix);
    void validate() const;
};

/// Softmax-normalized relevance of the query to every memory row:
/// softmax(Q(q) · K(M)^T / sqrt(L)).
std::vector<double> relevance(const std::vector<double>& query_embedding,
                              const PrototypeMemory& memory, const RetrievalHead& head);

/// Relevance-weighted sum of the value rows; always a convex combination.
std::vector<double> retrieve(const std::vector<double>& query_embedding,
                             const PrototypeMemory& memory, const RetrievalHead& head);

/// Concatenation of every head's retrieved vector, in head order.
std::vector<double> multi_head_retrieve(const std::vector<double>& query_embedding,
                                        const PrototypeMemory& memory,
                                        const RetrievalModule& module);

/// End-to-end forward pass: embed, retrieve, project, sigmoid. Returns one
/// presence probability per scene.
std::vector<double> predict(const std::vector<double>& features, const EmbeddingNet& net,
                            const PrototypeMemory& memory, const RetrievalModule& module);

struct BceResult {
    double loss = 0.0;
    std::vector<double> grad_probs;
};

/// Binary cross-entropy, averaged over the label vector. Probabilities are
/// clamped to [1e-12, 1-1e-12] before the logs.
BceResult bce_loss(const std::vector<double>& probs, const std::vector<int>& labels);

/// Everything the backward pass needs from one batched forward pass.
struct RetrievalCache {
    Matrix embeddings;  // B x D
    struct HeadCache {
        Matrix queries;     // B x L
        Matrix keys;        // R x L
        Matrix values;      // R x U
        Matrix relevances;  // B x R, rows sum to 1
        Matrix retrieved;   // B x U
    };
    std::vector<HeadCache> heads;
    Matrix concat;  // B x (H*U), standard mode only
    Matrix logits;  // B x S, pre-sigmoid predictions
};

/// Batched pre-sigmoid prediction logits for a batch of embeddings.
Matrix retrieval_logits(const Matrix& embeddings, const PrototypeMemory& memory,
                        const RetrievalModule& module, RetrievalCache* cache = nullptr);

/// Accumulates module parameter gradients from `grad_logits` and returns the
/// gradient with respect to the embedding batch. The memory is a constant.
Matrix retrieval_backward(RetrievalModule& module, const PrototypeMemory& memory,
                          const RetrievalCache& cache, const Matrix& grad_logits);

/// Mean BCE over a batch of probability rows against 0/1 target rows.
double bce_matrix_loss(const Matrix& probs, const Matrix& targets);

/// Gradient of bce_matrix_loss with respect to pre-sigmoid logits:
/// (probs - targets) / (B * S).
Matrix bce_logit_grad(const Matrix& probs, const Matrix& targets);

}  // namespace pmnet
