#pragma once

// Concrete right-hand sides of the reservoir models, for use with DdeStepper.

#include <cmath>
#include <variant>

#include "delayrc/reservoir.hpp"

namespace delayrc {

struct StuartLandauRhs {
    double p, kappa, gamma, eta;
    double operator()(double s, double sd, double in) const noexcept {
        return (p + eta * in + gamma * s * s) * s + kappa * sd;
    }
};

struct MackeyGlassRhs {
    double p, alpha, exponent, eta;
    double operator()(double s, double sd, double in) const noexcept {
        const double power = exponent == 1.0 ? sd : std::pow(sd, exponent);
        return (p + eta * in) * s + alpha * sd / (1.0 + power);
    }
};

struct LinearRhs {
    double a, b, c;
    double operator()(double s, double sd, double in) const noexcept {
        return a * s + b * sd + c * in;
    }
};

inline StuartLandauRhs make_rhs(const StuartLandauParams& m) {
    return {m.p_sl, m.kappa, m.gamma_nl, m.eta};
}
inline MackeyGlassRhs make_rhs(const MackeyGlassParams& m) {
    return {m.p_mg, m.alpha, m.exponent_p, m.eta};
}
inline LinearRhs make_rhs(const LinearDdeParams& m) { return {m.a, m.b, m.c}; }

/// Calls fn(rhs) with the concrete functor of `model`.
template <class Fn>
decltype(auto) visit_rhs(const ReservoirModel& model, Fn&& fn) {
    return std::visit([&](const auto& params) -> decltype(auto) { return fn(make_rhs(params)); }, model);
}

}  // namespace delayrc
