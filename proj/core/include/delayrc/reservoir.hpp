#pragma once

// Delay-based reservoir: model definitions, masked time-multiplexed input and
// harvesting of the centered state matrix by direct integration.

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace delayrc {

/// ds/dt = (p_sl + eta I + gamma s^2) s + kappa s(t - tau)
struct StuartLandauParams {
    double p_sl = -0.05;
    double kappa = 0.06;
    double gamma_nl = -0.1;
    double eta = 1e-3;
};

/// ds/dt = (p_mg + eta I) s + alpha s(t - tau) / (1 + s(t - tau)^exponent_p)
struct MackeyGlassParams {
    double p_mg = -0.08;
    double alpha = 0.32 / 3.0;
    double exponent_p = 1.0;
    double eta = 1e-3;
};

/// Linear delay system ds/dt = a s + b s(t - tau) + c I around s* = 0.
/// Used for the "custom" model type and as the reference for oracle tests.
struct LinearDdeParams {
    double a = -0.08;
    double b = 0.06;
    double c = 1e-3;
};

using ReservoirModel = std::variant<StuartLandauParams, MackeyGlassParams, LinearDdeParams>;

std::string model_name(const ReservoirModel& model);

/// Operating point of the reservoir (positive root for Stuart-Landau).
/// Throws ConfigError when no nontrivial equilibrium exists.
double equilibrium(const ReservoirModel& model);

/// Right-hand side f(s, s_tau, I) with I the raw masked input u * w.
double model_rhs(const ReservoirModel& model, double s, double s_delayed, double input);

struct TimingConfig {
    double T = 0.0;
    int n_v = 0;
    double theta = 0.0;
    double tau = 0.0;  // always nu * theta
    int nu = 0;
    double requested_tau = 0.0;
    std::vector<std::string> warnings;
};

/// theta = T / n_v, nu = round(tau / theta), tau := nu * theta (warns if it moved).
TimingConfig make_timing(double T, int n_v, double tau);

struct Mask {
    std::vector<double> weights;
    std::uint64_t seed = 0;
};

Mask make_mask(int n_v, std::uint64_t seed);

/// Input sequence fed to the reservoir. The first `prehistory` values form the
/// buffer phase that is fed but not recorded; recall targets reach back into it.
struct InputSequence {
    std::vector<double> values;
    std::uint64_t seed = 0;
    int prehistory = 0;

    int training_size() const noexcept { return static_cast<int>(values.size()) - prehistory; }
};

InputSequence generate_inputs(int k, std::uint64_t seed, int prehistory = 0);

/// eta * u_{floor(t/T)} * w_{floor((t mod T)/theta)} with t measured from the
/// first (prehistory) input. Throws std::out_of_range past the last input.
double input_signal(const InputSequence& inputs, const Mask& mask, const TimingConfig& timing,
                    double eta, double t);

struct StateMatrix {
    Eigen::MatrixXd entries;  // K x N_V
    bool centered = false;
};

/// Subtracts the per-node mean over all clock cycles.
StateMatrix center_states(StateMatrix raw);

struct IntegratorOptions {
    double dt = 0.01;
    // Relaxation time without input before the buffer phase; negative = 50 tau.
    double transient_time = -1.0;
    double overflow_guard = 1e6;
};

/// Largest step <= dt that divides theta into an integer number of steps.
double aligned_step(double theta, double dt);

/// Integrates the reservoir from its equilibrium history and records the
/// state at the end of every node interval, i.e. column m of row k holds
/// s(kT + (m + 1) theta) measured from the first training input. The
/// `inputs.prehistory` leading inputs are fed but not recorded. The returned
/// matrix is centered.
StateMatrix integrate_dde(const ReservoirModel& model, const TimingConfig& timing,
                          const InputSequence& inputs, const Mask& mask,
                          const IntegratorOptions& options = {});

/// Same as integrate_dde but without centering.
StateMatrix integrate_dde_raw(const ReservoirModel& model, const TimingConfig& timing,
                              const InputSequence& inputs, const Mask& mask,
                              const IntegratorOptions& options = {});

/// Deterministic per-stream seed derivation (splitmix64).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index);

}  // namespace delayrc
