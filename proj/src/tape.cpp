#include "pmnet/tape.hpp"

#include <cmath>

#include "pmnet/error.hpp"

namespace pmnet {

void ParamTape::add(const std::string& id, Matrix& value, Matrix& grad) {
    if (!value.same_shape(grad)) {
        throw ShapeError("tape: gradient shape differs from value shape for '" + id + "'");
    }
    for (const auto& e : entries_) {
        if (e.id == id) throw ArgumentError("tape: duplicate parameter id '" + id + "'");
    }
    entries_.push_back({id, &value, &grad});
}

void ParamTape::zero_grads() {
    for (auto& e : entries_) e.grad->fill(0.0);
}

std::size_t ParamTape::scalar_count() const {
    std::size_t n = 0;
    for (const auto& e : entries_) n += e.value->size();
    return n;
}

std::vector<Matrix> finite_diff_grad(const std::function<double()>& loss_fn, ParamTape& params,
                                     double epsilon) {
    if (!(epsilon > 0.0)) throw ArgumentError("finite_diff_grad: epsilon must be positive");
    std::vector<Matrix> grads;
    grads.reserve(params.size());
    for (const auto& entry : params.entries()) {
        Matrix grad(entry.value->rows(), entry.value->cols());
        for (std::size_t i = 0; i < entry.value->size(); ++i) {
            double& scalar = entry.value->data()[i];
            const double saved = scalar;
            scalar = saved + epsilon;
            const double up = loss_fn();
            scalar = saved - epsilon;
            const double down = loss_fn();
            scalar = saved;
            if (!std::isfinite(up) || !std::isfinite(down)) {
                throw NumericError("finite_diff_grad: non-finite loss while perturbing '" +
                                   entry.id + "'");
            }
            grad.data()[i] = (up - down) / (2.0 * epsilon);
        }
        grads.push_back(std::move(grad));
    }
    return grads;
}

}  // namespace pmnet
