#include "pmnet/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "pmnet/embedding.hpp"
#include "pmnet/error.hpp"
#include "pmnet/prototype.hpp"
#include "pmnet/retrieval.hpp"
#include "pmnet/tape.hpp"

namespace pmnet {

namespace {

PrototypeMemory random_memory(std::size_t num_scenes, std::size_t dim, Rng& rng) {
    PrototypeMemory memory;
    memory.rows = Matrix(num_scenes, dim);
    for (double& v : memory.rows.data()) v = rng.normal();
    memory.prototypes_per_scene = 1;
    memory.row_to_scene.resize(num_scenes);
    for (std::size_t s = 0; s < num_scenes; ++s) {
        memory.scene_names.push_back("s" + std::to_string(s));
        memory.row_to_scene[s] = s;
    }
    return memory;
}

Matrix random_batch(std::size_t rows, std::size_t cols, Rng& rng) {
    Matrix m(rows, cols);
    for (double& v : m.data()) v = rng.normal();
    return m;
}

using GroupErrors = std::map<std::string, std::pair<double, std::size_t>>;  // error, index

double rel_error(double analytic, double estimate) {
    const double denom = std::max({std::fabs(analytic), std::fabs(estimate), 1e-8});
    return std::fabs(analytic - estimate) / denom;
}

void merge_errors(GroupErrors& worst_by_group, const ParamTape& tape,
                  const std::vector<Matrix>& numeric, const std::function<double()>& loss_fn,
                  const GradCheckConfig& config) {
    for (std::size_t p = 0; p < tape.size(); ++p) {
        const ParamEntry& entry = tape.entries()[p];
        const bool corrupt = !config.corrupt_group.empty() &&
                             entry.id.find(config.corrupt_group) != std::string::npos;
        double group_worst = 0.0;
        std::size_t worst_index = 0;
        for (std::size_t i = 0; i < entry.grad->size(); ++i) {
            double analytic = entry.grad->data()[i];
            if (corrupt) analytic = 1.5 * analytic + 0.01;
            double error = rel_error(analytic, numeric[p].data()[i]);
            if (error > config.tolerance) {
                // Near-zero gradients (dead rectifier units, shift-invariant
                // bias directions) put the primary epsilon in the round-off
                // regime: the difference quotient is pure noise measured
                // against the 1e-8 floor. The loss is locally flat there, so
                // wider steps have no truncation cost and crush the noise. A
                // real backward bug disagrees at every scale.
                for (double factor : {60.0, 600.0, 6000.0}) {
                    const double wide = factor * config.epsilon;
                    double& scalar = entry.value->data()[i];
                    const double saved = scalar;
                    scalar = saved + wide;
                    const double up = loss_fn();
                    scalar = saved - wide;
                    const double down = loss_fn();
                    scalar = saved;
                    error = std::min(error, rel_error(analytic, (up - down) / (2.0 * wide)));
                    if (error <= 0.25 * config.tolerance) break;
                }
            }
            if (error > group_worst) {
                group_worst = error;
                worst_index = i;
            }
        }
        auto [it, inserted] =
            worst_by_group.try_emplace(entry.id, std::make_pair(group_worst, worst_index));
        if (!inserted && group_worst > it->second.first) {
            it->second = {group_worst, worst_index};
        }
    }
}

/// Finite differences are undefined at rectifier kinks, so checks run at
/// points where every pre-activation clears a margin wide enough for the
/// probe steps; kink-adjacent batches are redrawn.
Matrix draw_clear_batch(const EmbeddingNet& net, std::size_t rows, Rng& rng,
                        double margin = 3e-2) {
    for (int attempt = 0; attempt < 200; ++attempt) {
        Matrix batch = random_batch(rows, net.input_dim(), rng);
        EmbeddingCache cache;
        net.forward(batch, &cache);
        bool clear = true;
        for (std::size_t li = 0; li < net.layers().size() && clear; ++li) {
            if (net.layers()[li].activation != Activation::rectifier) continue;
            for (double v : cache.pre[li].data()) {
                if (std::fabs(v) < margin) {
                    clear = false;
                    break;
                }
            }
        }
        if (clear) return batch;
    }
    throw NumericError("gradcheck: could not find a kink-free evaluation point");
}

void check_cross_entropy(std::uint64_t seed, const GradCheckConfig& config,
                         GroupErrors& worst) {
    Rng rng(seed);
    EmbeddingNet net({config.feature_dim, config.hidden_dim, config.hidden_dim,
                      config.embed_dim},
                     rng);
    ClassifierHead head(config.embed_dim, config.num_classes, rng);
    const Matrix batch = draw_clear_batch(net, config.batch, rng);
    std::vector<std::size_t> targets(config.batch);
    for (auto& t : targets) t = rng.index(config.num_classes);

    ParamTape tape;
    net.collect_params(tape, "embedding");
    head.collect_params(tape, "classifier");

    tape.zero_grads();
    EmbeddingCache cache;
    const Matrix embeddings = net.forward(batch, &cache);
    Matrix grad_embeddings;
    cross_entropy_batch(head, embeddings, targets, &grad_embeddings);
    net.backward(cache, grad_embeddings);

    const auto loss_of = [&] { return cross_entropy_eval(head, net.forward(batch), targets); };
    const auto numeric = finite_diff_grad(loss_of, tape, config.epsilon);
    merge_errors(worst, tape, numeric, loss_of, config);
}

void check_triplet(std::uint64_t seed, const GradCheckConfig& config,
                   GroupErrors& worst) {
    Rng rng(seed);
    EmbeddingNet net({config.feature_dim, config.hidden_dim, config.embed_dim}, rng);

    // The triplet hinge is a kink of its own; redraw until the triple sits
    // firmly on one side.
    Matrix batch;
    double hinge = 0.0;
    for (int attempt = 0; attempt < 200; ++attempt) {
        batch = draw_clear_batch(net, 3, rng);
        const Matrix e = net.forward(batch);
        hinge = 0.5;
        for (std::size_t j = 0; j < config.embed_dim; ++j) {
            const double dp = e(0, j) - e(1, j);
            const double dn = e(0, j) - e(2, j);
            hinge += dp * dp - dn * dn;
        }
        if (std::fabs(hinge) > 2e-2) break;
    }
    if (std::fabs(hinge) <= 2e-2) return;

    ParamTape tape;
    net.collect_params(tape, "embedding");

    const auto loss_of = [&]() {
        const Matrix e = net.forward(batch);
        return triplet_loss(e.row_copy(0), e.row_copy(1), e.row_copy(2)).loss;
    };

    tape.zero_grads();
    EmbeddingCache cache;
    const Matrix embeddings = net.forward(batch, &cache);
    const TripletResult r =
        triplet_loss(embeddings.row_copy(0), embeddings.row_copy(1), embeddings.row_copy(2));
    Matrix grad(3, config.embed_dim);
    grad.set_row(0, r.grad_anchor);
    grad.set_row(1, r.grad_positive);
    grad.set_row(2, r.grad_negative);
    net.backward(cache, grad);

    const auto numeric = finite_diff_grad(loss_of, tape, config.epsilon);
    merge_errors(worst, tape, numeric, loss_of, config);
}

void check_predict_bce(std::uint64_t seed, const GradCheckConfig& config, RetrievalMode mode,
                       GroupErrors& worst) {
    Rng rng(seed);
    EmbeddingNet net({config.feature_dim, config.hidden_dim, config.embed_dim}, rng);
    PrototypeMemory memory = random_memory(config.num_scenes, config.embed_dim, rng);
    const std::size_t heads = mode == RetrievalMode::standard ? config.num_heads : 1;
    RetrievalModule module(config.embed_dim, config.key_dim, config.value_dim, heads,
                           config.num_scenes, mode, rng);
    const Matrix batch = draw_clear_batch(net, config.batch, rng);
    Matrix targets(config.batch, config.num_scenes);
    for (double& v : targets.data()) v = rng.uniform() < 0.5 ? 0.0 : 1.0;

    ParamTape tape;
    net.collect_params(tape, "embedding");
    module.collect_params(tape, "retrieval");

    const auto loss_of = [&]() {
        Matrix probs = retrieval_logits(net.forward(batch), memory, module);
        sigmoid_inplace(probs);
        return bce_matrix_loss(probs, targets);
    };

    tape.zero_grads();
    EmbeddingCache embed_cache;
    RetrievalCache retrieval_cache;
    const Matrix embeddings = net.forward(batch, &embed_cache);
    Matrix probs = retrieval_logits(embeddings, memory, module, &retrieval_cache);
    sigmoid_inplace(probs);
    const Matrix grad_embeddings =
        retrieval_backward(module, memory, retrieval_cache, bce_logit_grad(probs, targets));
    net.backward(embed_cache, grad_embeddings);

    const auto numeric = finite_diff_grad(loss_of, tape, config.epsilon);
    merge_errors(worst, tape, numeric, loss_of, config);
}

}  // namespace

GradCheckReport run_gradcheck(const GradCheckConfig& config) {
    if (config.num_seeds == 0) throw ArgumentError("gradcheck: num_seeds must be >= 1");
    GroupErrors worst_by_group;
    for (std::size_t s = 0; s < config.num_seeds; ++s) {
        const std::uint64_t seed = splitmix64(config.seed + s);
        check_cross_entropy(seed, config, worst_by_group);
        check_triplet(seed, config, worst_by_group);
        check_predict_bce(seed, config, RetrievalMode::standard, worst_by_group);
        check_predict_bce(seed, config, RetrievalMode::relevance_as_prediction, worst_by_group);
    }

    GradCheckReport report;
    report.tolerance = config.tolerance;
    for (const auto& [name, entry] : worst_by_group) {
        report.groups.push_back({name, entry.first, entry.second});
        if (entry.first > report.worst) {
            report.worst = entry.first;
            report.worst_group = name;
        }
    }
    return report;
}

}  // namespace pmnet
