#include "pmnet/optim.hpp"

#include <cmath>

#include "pmnet/error.hpp"

namespace pmnet {

void TrainSchedule::validate() const {
    if (!(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0)) {
        throw ArgumentError("schedule: betas must lie in (0, 1)");
    }
    if (!(decay_factor > 0.0 && decay_factor < 1.0)) {
        throw ArgumentError("schedule: decay factor must lie in (0, 1)");
    }
    if (batch_size < 1) throw ArgumentError("schedule: batch size must be >= 1");
    if (!(epsilon > 0.0)) throw ArgumentError("schedule: epsilon must be positive");
    if (!(learning_rate >= 0.0)) throw ArgumentError("schedule: learning rate must be >= 0");
}

void nadam_step(ParamTape& params, OptimizerState& state, const TrainSchedule& schedule,
                double learning_rate) {
    if (state.slots_.empty()) {
        state.slots_.reserve(params.size());
        for (const auto& e : params.entries()) {
            state.slots_.push_back({Matrix(e.value->rows(), e.value->cols()),
                                    Matrix(e.value->rows(), e.value->cols())});
        }
    }
    if (state.slots_.size() != params.size()) {
        throw StateError("nadam_step: optimizer state does not match the tape");
    }

    const double b1 = schedule.beta1;
    const double b2 = schedule.beta2;
    const std::size_t t = state.step_ + 1;
    const double b1_t = std::pow(b1, static_cast<double>(t));
    const double b1_next = std::pow(b1, static_cast<double>(t + 1));
    const double b2_t = std::pow(b2, static_cast<double>(t));

    for (std::size_t p = 0; p < params.size(); ++p) {
        const ParamEntry& entry = params.entries()[p];
        OptimizerState::Slot& slot = state.slots_[p];
        if (!entry.grad->same_shape(*entry.value)) {
            throw ShapeError("nadam_step: gradient shape mismatch for '" + entry.id + "'");
        }
        for (std::size_t i = 0; i < entry.value->size(); ++i) {
            const double g = entry.grad->data()[i];
            if (!std::isfinite(g)) {
                throw NumericError("nadam_step: non-finite gradient in '" + entry.id + "'");
            }
            double& m = slot.first_moment.data()[i];
            double& v = slot.second_moment.data()[i];
            m = b1 * m + (1.0 - b1) * g;
            v = b2 * v + (1.0 - b2) * g * g;
            // Look-ahead: the next step's bias correction on m, plus the
            // current gradient's own corrected contribution.
            const double m_hat = m / (1.0 - b1_next);
            const double g_hat = g / (1.0 - b1_t);
            const double v_hat = v / (1.0 - b2_t);
            const double direction = b1 * m_hat + (1.0 - b1) * g_hat;
            entry.value->data()[i] -= learning_rate * direction / (std::sqrt(v_hat) + schedule.epsilon);
        }
    }
    state.step_ = t;
}

bool PlateauScheduler::observe(double loss) {
    if (!has_best_ || loss < best_) {
        best_ = loss;
        has_best_ = true;
        stale_epochs_ = 0;
        return false;
    }
    ++stale_epochs_;
    if (stale_epochs_ >= patience_) {
        learning_rate_ *= factor_;
        stale_epochs_ = 0;
        return true;
    }
    return false;
}

double plateau_decay(const std::vector<double>& history, const TrainSchedule& schedule) {
    if (history.empty()) throw ArgumentError("plateau_decay: empty history");
    PlateauScheduler policy(schedule.learning_rate, schedule.plateau_patience,
                            schedule.decay_factor);
    for (double loss : history) policy.observe(loss);
    return policy.learning_rate();
}

}  // namespace pmnet
