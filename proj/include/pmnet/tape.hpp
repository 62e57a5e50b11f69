#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pmnet/matrix.hpp"

namespace pmnet {

/// One named parameter: a value matrix and its gradient accumulator. The
/// pointers alias storage owned by a model; the tape never owns memory.
struct ParamEntry {
    std::string id;
    Matrix* value = nullptr;
    Matrix* grad = nullptr;
};

/// Ordered view over a model's parameters. Optimizers walk it in order, so
/// the order must be stable across runs for determinism.
class ParamTape {
public:
    void add(const std::string& id, Matrix& value, Matrix& grad);

    const std::vector<ParamEntry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    void zero_grads();

    /// Total number of scalar parameters.
    std::size_t scalar_count() const;

private:
    std::vector<ParamEntry> entries_;
};

/// Central-difference gradient of `loss_fn` with respect to every scalar on
/// the tape: (f(θ+ε) − f(θ−ε)) / 2ε. Parameters are perturbed in place and
/// restored. Independent of any analytic backward pass, which is the point:
/// it is the oracle those passes are checked against.
std::vector<Matrix> finite_diff_grad(const std::function<double()>& loss_fn, ParamTape& params,
                                     double epsilon);

}  // namespace pmnet
