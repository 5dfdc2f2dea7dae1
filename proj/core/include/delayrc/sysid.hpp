#pragma once

// Small-signal identification of the linearization (a, b) of a scalar delay
// system from its steady-state response to harmonic drives.
//
// For ds/dt = a s + b s(t - tau) + c I0 sin(w t) the forced response has
// amplitude |c| I0 / sqrt(F(w)) with F(w) = |i w - a - b exp(-i w tau)|^2.
// At w_R = 2 pi / tau and w_A = pi / tau the delay factor is +1 and -1, so
//     F(w_R) = w_R^2 + (a + b)^2,   F(w_A) = w_A^2 + (a - b)^2.

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "delayrc/mmf.hpp"
#include "delayrc/reservoir.hpp"

namespace delayrc {

struct ProbeConfig {
    double tau = 0.0;
    double i0 = 0.1;
    double omega_r = 0.0;  // 0 = 2 pi / tau
    double omega_a = 0.0;  // 0 = pi / tau
    int settle_periods = 0;  // 0 = max(10, ceil(5 tau omega / (2 pi)))
    int measure_periods = 20;
    double dt = 0.01;
    // Extra probes: half amplitude (linearity) and w = 3 pi / (2 tau) (sign check).
    bool consistency_checks = true;
};

/// Fills in the default frequencies for `tau`.
ProbeConfig make_probe(double tau, double i0 = 0.1);

int settle_periods_for(const ProbeConfig& probe, double omega);

struct HarmonicFit {
    double sin_coeff = 0.0;
    double cos_coeff = 0.0;
    double offset = 0.0;

    double amplitude() const;
};

/// Least-squares fit of A sin(w t) + B cos(w t) + C to samples x[j] taken at t0 + j dt.
HarmonicFit fit_harmonic(std::span<const double> samples, double t0, double dt, double omega);

struct GainMeasurement {
    double omega = 0.0;
    double amplitude_ratio = 0.0;  // |x_a| / (|c| I0)
    double f_value = 0.0;          // 1 / amplitude_ratio^2
};

/// Drives `model` from its equilibrium with I(t) = i0 sin(omega t) and measures
/// the steady-state gain. The model's own input coupling (eta) applies; `c_known`
/// is the small-signal coupling that converts I into ds/dt.
GainMeasurement measure_gain(const ReservoirModel& model, const ProbeConfig& probe, double omega,
                             double c_known);

/// Same from a recorded response: samples of s(t0 + j dt) (equilibrium
/// included or not, the fit carries an offset) under I0 sin(omega t).
GainMeasurement gain_from_trajectory(std::span<const double> samples, double t0, double dt,
                                     double omega, double i0, double c_known);

struct AbEstimate {
    double a = 0.0;
    double b = 0.0;
    std::vector<std::string> warnings;
};

/// Closed-form inversion of F at a resonant (exp(-i w tau) = 1) and an
/// anti-phase (exp(-i w tau) = -1) frequency. Assumes a < -|b|.
AbEstimate recover_ab(double f_r, double f_a, double omega_r, double omega_a);

/// Probes at both frequencies and returns (a, b, c_known). Warnings from the
/// consistency probes are attached to the result.
Linearization identify(const ReservoirModel& model, const ProbeConfig& probe, double c_known);

/// |i w - a - b exp(-i w tau)|^2
double transfer_f(double a, double b, double tau, double omega);

}  // namespace delayrc
