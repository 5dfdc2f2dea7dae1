#include "delayrc/reservoir.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "delayrc/dde_solver.hpp"
#include "delayrc/errors.hpp"
#include "delayrc/model_rhs.hpp"

namespace delayrc {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

template <class Rhs>
Eigen::MatrixXd run_reservoir(Rhs rhs, double s_star, const TimingConfig& timing,
                              const InputSequence& inputs, const Mask& mask,
                              const IntegratorOptions& options) {
    const double dt = aligned_step(timing.theta, options.dt);
    const auto steps_per_node = static_cast<int>(std::lround(timing.theta / dt));
    const double transient =
        options.transient_time < 0.0 ? 50.0 * timing.tau : options.transient_time;
    const auto transient_steps = static_cast<std::int64_t>(std::ceil(transient / dt - 1e-9));

    DdeStepper<Rhs> stepper(rhs, timing.tau, dt, s_star, options.overflow_guard);
    for (std::int64_t i = 0; i < transient_steps; ++i) stepper.step(0.0);

    const int total = static_cast<int>(inputs.values.size());
    const int buffer = inputs.prehistory;
    const int n_v = timing.n_v;
    Eigen::MatrixXd states(total - buffer, n_v);
    for (int k = 0; k < total; ++k) {
        const double u = inputs.values[static_cast<std::size_t>(k)];
        for (int m = 0; m < n_v; ++m) {
            const double drive = u * mask.weights[static_cast<std::size_t>(m)];
            for (int sub = 0; sub < steps_per_node; ++sub) stepper.step(drive);
            if (k >= buffer) states(k - buffer, m) = stepper.state();
        }
    }
    return states;
}

void check_mask(const Mask& mask, const TimingConfig& timing) {
    if (static_cast<int>(mask.weights.size()) != timing.n_v) {
        throw ConfigError("mask length does not match the number of virtual nodes");
    }
}

}  // namespace

std::string model_name(const ReservoirModel& model) {
    return std::visit(overloaded{[](const StuartLandauParams&) { return std::string("stuart_landau"); },
                                 [](const MackeyGlassParams&) { return std::string("mackey_glass"); },
                                 [](const LinearDdeParams&) { return std::string("custom"); }},
                      model);
}

double equilibrium(const ReservoirModel& model) {
    return std::visit(
        overloaded{
            [](const StuartLandauParams& m) {
                const double sq = -(m.p_sl + m.kappa) / m.gamma_nl;
                if (!(sq > 0.0) || !std::isfinite(sq)) {
                    std::ostringstream msg;
                    msg << "Stuart-Landau: no nontrivial equilibrium, -(p_sl + kappa)/gamma = " << sq
                        << " must be positive";
                    throw ConfigError(msg.str());
                }
                return std::sqrt(sq);
            },
            [](const MackeyGlassParams& m) {
                if (m.exponent_p != 1.0) {
                    throw ConfigError("Mackey-Glass: closed-form equilibrium needs exponent_p = 1");
                }
                if (m.p_mg == 0.0) throw ConfigError("Mackey-Glass: p_mg must be nonzero");
                if (m.alpha == 0.0) {
                    throw ConfigError("Mackey-Glass: alpha = 0 gives the degenerate root s* = -1");
                }
                return -(m.p_mg + m.alpha) / m.p_mg;
            },
            [](const LinearDdeParams&) { return 0.0; }},
        model);
}

double model_rhs(const ReservoirModel& model, double s, double s_delayed, double input) {
    return visit_rhs(model, [&](const auto& rhs) { return rhs(s, s_delayed, input); });
}

TimingConfig make_timing(double T, int n_v, double tau) {
    if (!(T > 0.0)) throw ConfigError("clock cycle T must be positive");
    if (n_v < 1) throw ConfigError("number of virtual nodes must be positive");
    if (!(tau > 0.0)) throw ConfigError("delay tau must be positive");
    TimingConfig timing;
    timing.T = T;
    timing.n_v = n_v;
    timing.theta = T / n_v;
    timing.requested_tau = tau;
    const double ratio = tau / timing.theta;
    timing.nu = static_cast<int>(std::lround(ratio));
    if (timing.nu < 1) throw ConfigError("delay is shorter than half a node spacing");
    timing.tau = timing.nu * timing.theta;
    if (std::abs(ratio - timing.nu) > 1e-9 * ratio) {
        std::ostringstream msg;
        msg << "tau/theta = " << ratio << " is not an integer; using nu = " << timing.nu
            << " and tau = " << timing.tau;
        timing.warnings.push_back(msg.str());
    }
    return timing;
}

Mask make_mask(int n_v, std::uint64_t seed) {
    if (n_v < 1) throw ConfigError("mask length must be positive");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    Mask mask;
    mask.seed = seed;
    mask.weights.resize(static_cast<std::size_t>(n_v));
    for (auto& w : mask.weights) w = dist(rng);
    return mask;
}

InputSequence generate_inputs(int k, std::uint64_t seed, int prehistory) {
    if (k < 1) throw ConfigError("input sequence length must be positive");
    if (prehistory < 0) throw ConfigError("prehistory length must be nonnegative");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    InputSequence seq;
    seq.seed = seed;
    seq.prehistory = prehistory;
    seq.values.resize(static_cast<std::size_t>(k) + static_cast<std::size_t>(prehistory));
    for (auto& u : seq.values) u = dist(rng);
    return seq;
}

double input_signal(const InputSequence& inputs, const Mask& mask, const TimingConfig& timing,
                    double eta, double t) {
    if (!(t >= 0.0)) throw std::out_of_range("input_signal: negative time");
    const auto cycle = static_cast<std::size_t>(std::floor(t / timing.T));
    if (cycle >= inputs.values.size()) throw std::out_of_range("input_signal: input sequence exhausted");
    const double phase = t - static_cast<double>(cycle) * timing.T;
    auto node = static_cast<std::size_t>(std::floor(phase / timing.theta));
    if (node >= mask.weights.size()) node = mask.weights.size() - 1;
    return eta * inputs.values[cycle] * mask.weights[node];
}

StateMatrix center_states(StateMatrix raw) {
    if (raw.entries.rows() > 0) {
        const Eigen::RowVectorXd mean = raw.entries.colwise().mean();
        raw.entries.rowwise() -= mean;
    }
    raw.centered = true;
    return raw;
}

double aligned_step(double theta, double dt) {
    if (!(dt > 0.0) || !(theta > 0.0)) throw ConfigError("step and node spacing must be positive");
    const double n = std::ceil(theta / dt - 1e-9);
    return theta / std::max(1.0, n);
}

StateMatrix integrate_dde_raw(const ReservoirModel& model, const TimingConfig& timing,
                              const InputSequence& inputs, const Mask& mask,
                              const IntegratorOptions& options) {
    check_mask(mask, timing);
    if (inputs.training_size() < 1) throw ConfigError("no training inputs after the buffer");
    const double s_star = equilibrium(model);
    StateMatrix out;
    out.entries = visit_rhs(model, [&](const auto& rhs) {
        return run_reservoir(rhs, s_star, timing, inputs, mask, options);
    });
    return out;
}

StateMatrix integrate_dde(const ReservoirModel& model, const TimingConfig& timing,
                          const InputSequence& inputs, const Mask& mask,
                          const IntegratorOptions& options) {
    return center_states(integrate_dde_raw(model, timing, inputs, mask, options));
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index) {
    std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream * 0x100000001B3ULL + index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace delayrc
