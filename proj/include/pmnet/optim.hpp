#pragma once

#include <cstdint>
#include <vector>

#include "pmnet/tape.hpp"

namespace pmnet {

/// Hyperparameters shared by both training phases. Defaults follow the common
/// Nadam recommendation (beta1 0.9, beta2 0.999, eps 1e-8), batch size 32 and
/// a sqrt(0.1) learning-rate decay after two epochs without improvement.
struct TrainSchedule {
    double learning_rate = 5e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::size_t batch_size = 32;
    std::size_t max_epochs = 100;
    std::size_t plateau_patience = 2;
    double decay_factor = 0.31622776601683794;  // sqrt(0.1)
    std::uint64_t seed = 0;

    void validate() const;
};

/// Per-parameter first and second moment estimates plus the shared step
/// counter. Slots are created lazily from the tape on the first step and must
/// keep matching it afterwards.
class OptimizerState {
public:
    std::size_t step() const { return step_; }

    friend void nadam_step(ParamTape& params, OptimizerState& state,
                           const TrainSchedule& schedule, double learning_rate);

private:
    struct Slot {
        Matrix first_moment;
        Matrix second_moment;
    };
    std::vector<Slot> slots_;
    std::size_t step_ = 0;
};

/// One Nesterov-Adam update over every tape entry: bias-corrected moment
/// estimates with the momentum look-ahead applied to the first moment.
/// Throws NumericError naming the parameter if its gradient is non-finite.
void nadam_step(ParamTape& params, OptimizerState& state, const TrainSchedule& schedule,
                double learning_rate);

inline void nadam_step(ParamTape& params, OptimizerState& state, const TrainSchedule& schedule) {
    nadam_step(params, state, schedule, schedule.learning_rate);
}

/// Stateful plateau policy: multiply the learning rate by `factor` whenever
/// `patience` consecutive observations fail to strictly improve on the best
/// loss seen so far; the staleness counter resets after each decay.
class PlateauScheduler {
public:
    PlateauScheduler(double learning_rate, std::size_t patience, double factor)
        : learning_rate_(learning_rate), patience_(patience), factor_(factor) {}

    /// Feed one epoch's validation loss; returns true if a decay fired.
    bool observe(double loss);

    double learning_rate() const { return learning_rate_; }

private:
    double learning_rate_;
    std::size_t patience_;
    double factor_;
    double best_ = 0.0;
    bool has_best_ = false;
    std::size_t stale_epochs_ = 0;
};

/// Replays a whole loss history through the plateau policy and returns the
/// resulting learning rate. Throws ArgumentError on an empty history.
double plateau_decay(const std::vector<double>& history, const TrainSchedule& schedule);

}  // namespace pmnet
