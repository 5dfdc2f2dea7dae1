#pragma once

// Fixed-step fourth-order Runge-Kutta integration of scalar delay equations
//
//     s'(t) = f(s(t), s(t - tau), I(t))
//
// The delayed argument at RK stage times is reconstructed from a ring buffer
// of past grid values by cubic Hermite interpolation. Each stored grid point
// carries both one-sided derivatives so that jumps of the drive I(t) at grid
// points (masked inputs switch exactly on the grid) do not spoil the
// interpolant. With this the scheme keeps its fourth order in dt.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "delayrc/errors.hpp"

namespace delayrc {

class HistoryBuffer {
public:
    // `lag_steps` = tau / dt, may be fractional but must be >= 2.
    HistoryBuffer(double lag_steps, double initial_value);

    double lag_steps() const noexcept { return lag_steps_; }

    // Stores grid point `step` with value and left/right derivatives.
    void push(std::int64_t step, double value, double d_left, double d_right) noexcept {
        const std::size_t slot = static_cast<std::size_t>(step) & mask_;
        value_[slot] = value;
        d_left_[slot] = d_left;
        d_right_[slot] = d_right;
    }

    // s(t_step + stage * dt - tau) for a stage offset prepared by `prepare`.
    struct Probe {
        std::int64_t offset;  // floor(stage - lag)
        double h00, h10, h01, h11;
    };

    Probe prepare(double stage, double dt) const noexcept;

    double at(std::int64_t step, const Probe& probe) const noexcept {
        const std::int64_t left = step + probe.offset;
        const std::size_t i0 = static_cast<std::size_t>(left) & mask_;
        const std::size_t i1 = static_cast<std::size_t>(left + 1) & mask_;
        return probe.h00 * value_[i0] + probe.h10 * d_right_[i0] + probe.h01 * value_[i1] +
               probe.h11 * d_left_[i1];
    }

private:
    double lag_steps_;
    std::size_t mask_;
    std::vector<double> value_;
    std::vector<double> d_left_;
    std::vector<double> d_right_;
};

inline HistoryBuffer::HistoryBuffer(double lag_steps, double initial_value) : lag_steps_(lag_steps) {
    // tau = nu * theta with theta a multiple of dt lands exactly on the grid
    const double nearest = std::round(lag_steps);
    if (std::abs(lag_steps - nearest) <= 1e-9 * nearest) lag_steps_ = nearest;
    if (!(lag_steps_ >= 2.0)) {
        throw ConfigError("delay must span at least two integration steps");
    }
    std::size_t capacity = 4;
    while (static_cast<double>(capacity) < lag_steps_ + 4.0) capacity <<= 1;
    mask_ = capacity - 1;
    value_.assign(capacity, initial_value);
    d_left_.assign(capacity, 0.0);
    d_right_.assign(capacity, 0.0);
}

inline HistoryBuffer::Probe HistoryBuffer::prepare(double stage, double dt) const noexcept {
    const double x = stage - lag_steps_;
    const double fl = std::floor(x);
    const double u = x - fl;
    const double u2 = u * u;
    const double u3 = u2 * u;
    Probe p{};
    p.offset = static_cast<std::int64_t>(fl);
    p.h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
    p.h10 = (u3 - 2.0 * u2 + u) * dt;
    p.h01 = -2.0 * u3 + 3.0 * u2;
    p.h11 = (u3 - u2) * dt;
    return p;
}

// Classical RK4 stepper for s' = rhs(s, s_delayed, input). `Rhs` is any
// callable `double(double s, double s_delayed, double input)`.
template <class Rhs>
class DdeStepper {
public:
    DdeStepper(Rhs rhs, double delay, double dt, double initial_value, double overflow_guard = 1e6)
        : rhs_(std::move(rhs)),
          dt_(dt),
          guard_(overflow_guard),
          history_(delay / dt, initial_value),
          state_(initial_value),
          p0_(history_.prepare(0.0, dt)),
          ph_(history_.prepare(0.5, dt)),
          p1_(history_.prepare(1.0, dt)) {}

    // One step with the drive sampled at the start, midpoint and end of the step.
    // The end value is the left limit, so a drive that jumps at the next grid
    // point passes the old value here and the new one as `in0` of the next call.
    void step(double in0, double in_half, double in1) {
        const double sd0 = history_.at(step_, p0_);
        const double k1 = rhs_(state_, sd0, in0);
        double d_left = k1;
        if (step_ == 0) {
            d_left = 0.0;
        } else if (in0 != last_in1_) {
            d_left = rhs_(state_, sd0, last_in1_);
        }
        history_.push(step_, state_, d_left, k1);

        const double sdh = history_.at(step_, ph_);
        const double k2 = rhs_(state_ + 0.5 * dt_ * k1, sdh, in_half);
        const double k3 = rhs_(state_ + 0.5 * dt_ * k2, sdh, in_half);
        const double sd1 = history_.at(step_, p1_);
        const double k4 = rhs_(state_ + dt_ * k3, sd1, in1);
        state_ += dt_ / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        ++step_;
        last_in1_ = in1;
        if (!(std::abs(state_) < guard_)) {
            throw InstabilityError("delay system diverged at t = " + std::to_string(time()),
                                   time());
        }
    }

    // Convenience for a drive that is constant over the step.
    void step(double in) { step(in, in, in); }

    double state() const noexcept { return state_; }
    std::int64_t steps_taken() const noexcept { return step_; }
    double time() const noexcept { return static_cast<double>(step_) * dt_; }
    double dt() const noexcept { return dt_; }

private:
    Rhs rhs_;
    double dt_;
    double guard_;
    HistoryBuffer history_;
    double state_;
    std::int64_t step_ = 0;
    double last_in1_ = 0.0;
    HistoryBuffer::Probe p0_, ph_, p1_;
};

}  // namespace delayrc
