#include "delayrc/sysid.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>

#include "delayrc/dde_solver.hpp"
#include "delayrc/errors.hpp"
#include "delayrc/model_rhs.hpp"

namespace delayrc {

namespace {

constexpr double kPi = std::numbers::pi;

template <class Rhs>
std::vector<double> drive_and_record(Rhs rhs, double s_star, const ProbeConfig& probe, double omega,
                                     double i0, double& t0, double& dt) {
    dt = aligned_step(probe.tau, probe.dt);
    const double period = 2.0 * kPi / omega;
    const double settle = settle_periods_for(probe, omega) * period;
    const double measure = probe.measure_periods * period;
    const auto settle_steps = static_cast<std::int64_t>(std::ceil(settle / dt));
    const auto measure_steps = static_cast<std::int64_t>(std::ceil(measure / dt));

    DdeStepper<Rhs> stepper(rhs, probe.tau, dt, s_star);
    auto drive = [&](std::int64_t k, double frac) {
        return i0 * std::sin(omega * (static_cast<double>(k) + frac) * dt);
    };
    std::int64_t k = 0;
    for (; k < settle_steps; ++k) stepper.step(drive(k, 0.0), drive(k, 0.5), drive(k + 1, 0.0));
    t0 = static_cast<double>(k) * dt;
    std::vector<double> samples;
    samples.reserve(static_cast<std::size_t>(measure_steps));
    for (std::int64_t j = 0; j < measure_steps; ++j, ++k) {
        samples.push_back(stepper.state());
        stepper.step(drive(k, 0.0), drive(k, 0.5), drive(k + 1, 0.0));
    }
    return samples;
}

std::vector<double> record_probe(const ReservoirModel& model, const ProbeConfig& probe, double omega,
                                 double i0, double& t0, double& dt) {
    const double s_star = equilibrium(model);
    return visit_rhs(model, [&](const auto& rhs) {
        return drive_and_record(rhs, s_star, probe, omega, i0, t0, dt);
    });
}

void check_probe(const ProbeConfig& probe) {
    if (!(probe.tau > 0.0)) throw ConfigError("probe: tau must be positive");
    if (!(probe.i0 > 0.0)) throw ConfigError("probe: amplitude i0 must be positive");
    if (probe.measure_periods < 1) throw ConfigError("probe: measure_periods must be at least 1");
    if (probe.settle_periods < 0) throw ConfigError("probe: settle_periods must be nonnegative");
}

}  // namespace

ProbeConfig make_probe(double tau, double i0) {
    ProbeConfig probe;
    probe.tau = tau;
    probe.i0 = i0;
    probe.omega_r = 2.0 * kPi / tau;
    probe.omega_a = kPi / tau;
    return probe;
}

int settle_periods_for(const ProbeConfig& probe, double omega) {
    if (probe.settle_periods > 0) return probe.settle_periods;
    const double period = 2.0 * kPi / omega;
    return std::max(10, static_cast<int>(std::ceil(5.0 * probe.tau / period - 1e-9)));
}

double HarmonicFit::amplitude() const { return std::hypot(sin_coeff, cos_coeff); }

HarmonicFit fit_harmonic(std::span<const double> samples, double t0, double dt, double omega) {
    if (samples.size() < 3) throw ConfigError("fit_harmonic: need at least three samples");
    Eigen::Matrix3d normal = Eigen::Matrix3d::Zero();
    Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
    for (std::size_t j = 0; j < samples.size(); ++j) {
        const double t = t0 + static_cast<double>(j) * dt;
        const Eigen::Vector3d basis(std::sin(omega * t), std::cos(omega * t), 1.0);
        normal.noalias() += basis * basis.transpose();
        rhs.noalias() += basis * samples[j];
    }
    const Eigen::LDLT<Eigen::Matrix3d> ldlt(normal);
    if (ldlt.info() != Eigen::Success || !(ldlt.rcond() > 1e-12)) {
        throw NumericalError("fit_harmonic: sample window too short to separate sin and cos");
    }
    const Eigen::Vector3d coef = ldlt.solve(rhs);
    return {coef(0), coef(1), coef(2)};
}

GainMeasurement gain_from_trajectory(std::span<const double> samples, double t0, double dt,
                                     double omega, double i0, double c_known) {
    if (c_known == 0.0) throw ConfigError("sysid: the input coupling c must be known and nonzero");
    if (!(i0 > 0.0)) throw ConfigError("sysid: probe amplitude must be positive");
    const HarmonicFit fit = fit_harmonic(samples, t0, dt, omega);
    const double amp = fit.amplitude();
    if (!(amp > 1e-13 * std::max(1.0, std::abs(fit.offset)))) {
        throw NumericalError("sysid: response amplitude below the numerical noise floor");
    }

    // A response that still drifts between the two halves has not settled.
    const std::size_t half = samples.size() / 2;
    if (half >= 3) {
        const double a1 = fit_harmonic(samples.first(half), t0, dt, omega).amplitude();
        const double a2 =
            fit_harmonic(samples.subspan(half), t0 + static_cast<double>(half) * dt, dt, omega).amplitude();
        if (std::abs(a2 - a1) > 0.05 * std::max(a1, a2)) {
            std::ostringstream msg;
            msg << "sysid: harmonic response did not settle (amplitude " << a1 << " -> " << a2
                << "); the operating point is unstable or the settle time too short";
            throw InstabilityError(msg.str(), t0 + static_cast<double>(samples.size()) * dt);
        }
    }

    GainMeasurement g;
    g.omega = omega;
    g.amplitude_ratio = amp / (std::abs(c_known) * i0);
    g.f_value = 1.0 / (g.amplitude_ratio * g.amplitude_ratio);
    return g;
}

GainMeasurement measure_gain(const ReservoirModel& model, const ProbeConfig& probe, double omega,
                             double c_known) {
    check_probe(probe);
    if (!(omega > 0.0)) throw ConfigError("sysid: probe frequency must be positive");
    if (c_known == 0.0) throw ConfigError("sysid: the input coupling c must be known and nonzero");
    double t0 = 0.0;
    double dt = 0.0;
    const auto samples = record_probe(model, probe, omega, probe.i0, t0, dt);
    return gain_from_trajectory(samples, t0, dt, omega, probe.i0, c_known);
}

AbEstimate recover_ab(double f_r, double f_a, double omega_r, double omega_a) {
    double r = f_r - omega_r * omega_r;
    double q = f_a - omega_a * omega_a;
    const double tol_r = 1e-9 * std::max(1.0, f_r);
    const double tol_q = 1e-9 * std::max(1.0, f_a);
    if (r < -tol_r || q < -tol_q) {
        std::ostringstream msg;
        msg << "sysid: inconsistent measurement, F - omega^2 = (" << r << ", " << q
            << ") must be nonnegative";
        throw NumericalError(msg.str());
    }
    r = std::max(r, 0.0);
    q = std::max(q, 0.0);
    const double s_plus = std::sqrt(r);   // |a + b|
    const double s_minus = std::sqrt(q);  // |a - b|

    AbEstimate out;
    out.a = -0.5 * (s_plus + s_minus);
    out.b = 0.5 * (s_minus - s_plus);
    const double scale = s_plus + s_minus;
    if (scale == 0.0 || std::min(s_plus, s_minus) < 1e-6 * scale) {
        out.warnings.push_back(
            "a + b or a - b is close to zero: the signs of the recovered (a, b) are ambiguous");
    }
    return out;
}

double transfer_f(double a, double b, double tau, double omega) {
    const std::complex<double> z(-a - b * std::cos(omega * tau), omega + b * std::sin(omega * tau));
    return std::norm(z);
}

Linearization identify(const ReservoirModel& model, const ProbeConfig& probe_in, double c_known) {
    ProbeConfig probe = probe_in;
    check_probe(probe);
    if (probe.omega_r <= 0.0) probe.omega_r = 2.0 * kPi / probe.tau;
    if (probe.omega_a <= 0.0) probe.omega_a = kPi / probe.tau;

    const GainMeasurement gr = measure_gain(model, probe, probe.omega_r, c_known);
    const GainMeasurement ga = measure_gain(model, probe, probe.omega_a, c_known);
    AbEstimate ab = recover_ab(gr.f_value, ga.f_value, probe.omega_r, probe.omega_a);

    if (probe.consistency_checks) {
        ProbeConfig half = probe;
        half.i0 = 0.5 * probe.i0;
        const GainMeasurement gh = measure_gain(model, half, probe.omega_r, c_known);
        const double drift = std::abs(gh.amplitude_ratio / gr.amplitude_ratio - 1.0);
        if (drift > 0.01) {
            std::ostringstream msg;
            msg << "gain changed by " << 100.0 * drift
                << "% when halving i0: the probe is outside the linear-response regime";
            ab.warnings.push_back(msg.str());
        }

        // At exp(-i w tau) = i every sign choice of (a + b, a - b) predicts a
        // different F; pick the one that matches and flag a mismatch.
        const double omega3 = 1.5 * kPi / probe.tau;
        const double f3 = measure_gain(model, probe, omega3, c_known).f_value;
        const double s_plus = -(ab.a + ab.b);
        const double s_minus = ab.b - ab.a;
        double best_err = std::abs(transfer_f(ab.a, ab.b, probe.tau, omega3) - f3);
        const double base_err = best_err;
        std::array<double, 2> best{ab.a, ab.b};
        for (const double sp : {s_plus, -s_plus}) {
            for (const double sm : {s_minus, -s_minus}) {
                const double a = -0.5 * (sp + sm);
                const double b = 0.5 * (sm - sp);
                const double err = std::abs(transfer_f(a, b, probe.tau, omega3) - f3);
                if (err < best_err) {
                    best_err = err;
                    best = {a, b};
                }
            }
        }
        if (base_err > 1e-2 * f3 && best_err < base_err) {
            std::ostringstream msg;
            msg << "response at w = 3 pi / (2 tau) contradicts a < -|b|; (a, b) = (" << best[0]
                << ", " << best[1] << ") fits better";
            ab.warnings.push_back(msg.str());
        }
    }

    Linearization lin = make_linearization(ab.a, ab.b, c_known);
    lin.warnings.insert(lin.warnings.begin(), ab.warnings.begin(), ab.warnings.end());
    return lin;
}

}  // namespace delayrc
