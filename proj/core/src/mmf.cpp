#include "delayrc/mmf.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <variant>

#include "delayrc/errors.hpp"

namespace delayrc {

namespace {

constexpr double kInvSqrt3 = 0.57735026918962576451;

void stability_note(Linearization& lin) {
    if (lin.a + lin.b >= 0.0) {
        std::ostringstream msg;
        msg << "a + b = " << lin.a + lin.b << " >= 0: equilibrium is not stable, MMF will diverge";
        lin.warnings.push_back(msg.str());
    }
}

// Builds S~ from the accumulated per-lag impulse weights. Lag d = q N_V + r
// carries slot n - r of cycle K - q to nodes n >= r and slot n - r + N_V of
// cycle K - q - 1 to nodes n < r.
Eigen::MatrixXd scatter(const std::vector<double>& impulse, const MapCoefficients& coeffs,
                        const Mask& mask, int min_rows) {
    const int n_v = coeffs.n_v;
    const auto lags = static_cast<long>(impulse.size());
    const long rows = std::max<long>(min_rows, lags == 0 ? 1 : (lags - 1 + n_v - 1) / n_v + 1);
    // Column l of `t` is row l of S~, so every update touches contiguous memory.
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n_v, rows);
    const Eigen::Map<const Eigen::VectorXd> w(mask.weights.data(), n_v);
    for (long d = 0; d < lags; ++d) {
        const double h = impulse[static_cast<std::size_t>(d)];
        if (h == 0.0) continue;
        const long q = d / n_v;
        const int r = static_cast<int>(d % n_v);
        t.col(q).tail(n_v - r) += h * w.head(n_v - r);
        if (r > 0) t.col(q + 1).head(r) += h * w.tail(r);
    }
    return (coeffs.gamma_c * kInvSqrt3) * t.transpose();
}

}  // namespace

Linearization make_linearization(double a, double b, double c) {
    Linearization lin{a, b, c, {}};
    stability_note(lin);
    return lin;
}

Linearization linearize_stuart_landau(const StuartLandauParams& params) {
    const double s_star = equilibrium(ReservoirModel{params});
    return make_linearization(-2.0 * params.p_sl - 3.0 * params.kappa, params.kappa,
                              params.eta * s_star);
}

Linearization linearize_mackey_glass(const MackeyGlassParams& params) {
    const double s_star = equilibrium(ReservoirModel{params});
    const double denom = 1.0 + s_star;
    if (denom == 0.0) throw ConfigError("Mackey-Glass: 1 + s* = 0, delayed coupling undefined");
    return make_linearization(params.p_mg, params.alpha / (denom * denom), params.eta * s_star);
}

Linearization linearize(const ReservoirModel& model) {
    if (const auto* sl = std::get_if<StuartLandauParams>(&model)) return linearize_stuart_landau(*sl);
    if (const auto* mg = std::get_if<MackeyGlassParams>(&model)) return linearize_mackey_glass(*mg);
    const auto& lin = std::get<LinearDdeParams>(model);
    return make_linearization(lin.a, lin.b, lin.c);
}

MapCoefficients map_coefficients(const Linearization& lin, double theta, int nu, int n_v) {
    if (lin.a == 0.0) throw ConfigError("linearization coefficient a must be nonzero");
    if (!(theta > 0.0)) throw ConfigError("node spacing theta must be positive");
    if (nu < 1 || n_v < 1) throw ConfigError("nu and n_v must be positive");
    MapCoefficients mc;
    const double em1 = std::expm1(lin.a * theta);  // p - 1
    mc.p = 1.0 + em1;
    mc.m = lin.b / lin.a * em1;
    mc.gamma_c = lin.c / lin.a * em1;
    mc.theta = theta;
    mc.nu = nu;
    mc.n_v = n_v;
    if (mc.p + mc.m >= 1.0) {
        std::ostringstream msg;
        msg << "map DC gain p + m = " << mc.p + mc.m << " >= 1: operating point at or beyond instability";
        mc.warnings.push_back(msg.str());
    }
    return mc;
}

double binomial_term(int i, int k, const MapCoefficients& coeffs) {
    if (i < 0 || k < 0) throw ConfigError("binomial_term: indices must be nonnegative");
    double value = 1.0;
    for (int t = 0; t < std::max(i, k); ++t) {
        if (t < i) value *= coeffs.p * static_cast<double>(k + t + 1) / static_cast<double>(t + 1);
        if (t < k) value *= coeffs.m;
    }
    return value;
}

ModifiedStateMatrix modified_state_matrix(const MapCoefficients& coeffs, const Mask& mask,
                                          const MmfOptions& options) {
    if (static_cast<int>(mask.weights.size()) != coeffs.n_v) {
        throw ConfigError("mask length does not match the number of virtual nodes");
    }
    if (!(options.epsilon_rel > 0.0) && !(options.epsilon_abs > 0.0)) {
        throw ConfigError("triangle truncation threshold must be positive");
    }
    // Row q of the triangle sums in absolute value to (p + |m|)^q, so its
    // largest term cannot fall below (p + |m|)^q / (q + 1).
    if (std::abs(coeffs.p) + std::abs(coeffs.m) >= 1.0) {
        std::ostringstream msg;
        msg << "Pascal's triangle cannot converge: |p| + |m| = " << std::abs(coeffs.p) + std::abs(coeffs.m)
            << " >= 1 (requires a < -|b|)";
        throw DivergenceError(msg.str());
    }
    const double scale = std::abs(coeffs.gamma_c) * kInvSqrt3;
    const int nu = coeffs.nu;

    // impulse[d] = sum over i + k nu = d of C(i+k, i) p^i m^k
    std::vector<double> impulse;
    std::vector<double> row{1.0};
    std::vector<double> next;

    ModifiedStateMatrix out;
    if (scale == 0.0) {
        // No input coupling: S~ vanishes identically.
        out.entries = Eigen::MatrixXd::Zero(std::max(1, options.min_rows), coeffs.n_v);
        out.epsilon = options.epsilon_abs;
        out.rows_converged = true;
        return out;
    }
    double eps = options.epsilon_abs > 0.0 ? options.epsilon_abs : options.epsilon_rel * scale;
    long next_refresh = 64;

    for (int q = 0;; ++q) {
        if (q >= options.max_row) {
            throw DivergenceError("Pascal's triangle did not converge within " +
                                  std::to_string(options.max_row) +
                                  " rows; operating point at or beyond the stability edge");
        }
        // row[i] = C(q, i) p^i m^(q-i)
        double row_max = 0.0;
        for (int i = 0; i <= q; ++i) row_max = std::max(row_max, std::abs(row[static_cast<std::size_t>(i)]));
        if (!std::isfinite(row_max) || row_max > 1e200) {
            throw DivergenceError("Pascal's triangle terms overflow; the map p + |m| exceeds 1");
        }
        if (options.epsilon_abs <= 0.0 && q >= next_refresh) {
            const Eigen::MatrixXd partial = scatter(impulse, coeffs, mask, 0);
            eps = std::max(eps, options.epsilon_rel * partial.cwiseAbs().maxCoeff());
            next_refresh *= 2;
        }
        if (row_max * scale < eps && q >= options.min_triangle_rows) {
            out.triangle_rows = q;
            out.rows_converged = true;
            break;
        }

        const std::size_t need = static_cast<std::size_t>(q) * static_cast<std::size_t>(nu) + 1;
        if (impulse.size() < need) impulse.resize(need, 0.0);
        for (int i = 0; i <= q; ++i) {
            impulse[static_cast<std::size_t>(i) + static_cast<std::size_t>(q - i) * nu] +=
                row[static_cast<std::size_t>(i)];
        }

        next.assign(static_cast<std::size_t>(q) + 2, 0.0);
        for (int i = 0; i <= q; ++i) {
            const double v = row[static_cast<std::size_t>(i)];
            next[static_cast<std::size_t>(i)] += coeffs.m * v;
            next[static_cast<std::size_t>(i) + 1] += coeffs.p * v;
        }
        row.swap(next);
    }

    out.entries = scatter(impulse, coeffs, mask, options.min_rows);
    if (options.epsilon_abs <= 0.0) {
        eps = std::max(eps, options.epsilon_rel * out.entries.cwiseAbs().maxCoeff());
    }
    out.epsilon = eps;
    return out;
}

double peak_state_response(const ModifiedStateMatrix& s_tilde) {
    if (s_tilde.entries.size() == 0) return 0.0;
    return std::sqrt(3.0) * s_tilde.entries.cwiseAbs().colwise().sum().maxCoeff();
}

double mmf_lambda(const ModifiedStateMatrix& s_tilde, double k_equiv, double rule) {
    if (!(k_equiv > 0.0)) throw ConfigError("equivalent training length must be positive");
    const double lambda = rule * peak_state_response(s_tilde) / k_equiv;
    if (!(lambda > 0.0)) throw NumericalError("MMF regularization is not positive (S~ identically zero?)");
    return lambda;
}

namespace {

// Eigenvectors V of S~^T S~ and W = S~ V. The Rayleigh quotients |W_i|^2 stand
// in for the eigenvalues in both the total and the per-row capacities, so
// the two agree to rounding.
struct GramModes {
    Eigen::MatrixXd w;
    Eigen::VectorXd mu;
};

GramModes gram_modes(const ModifiedStateMatrix& s_tilde) {
    const Eigen::MatrixXd& s = s_tilde.entries;
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(s.cols(), s.cols());
    gram.selfadjointView<Eigen::Lower>().rankUpdate(s.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram.selfadjointView<Eigen::Lower>());
    if (eig.info() != Eigen::Success) throw NumericalError("eigen-decomposition of S~^T S~ failed");
    GramModes out;
    out.w.noalias() = s * eig.eigenvectors();
    out.mu = out.w.colwise().squaredNorm().transpose();
    return out;
}

}  // namespace

double mmf_memory_capacity(const ModifiedStateMatrix& s_tilde, double lambda) {
    if (!(lambda > 0.0)) throw NumericalError("MMF regularization must be positive");
    const Eigen::ArrayXd mu = gram_modes(s_tilde).mu.array();
    return (mu / (mu + lambda)).sum();
}

CapacitySpectrum mmf_capacity_spectrum(const ModifiedStateMatrix& s_tilde, double lambda) {
    if (!(lambda > 0.0)) throw NumericalError("MMF regularization must be positive");
    const GramModes modes = gram_modes(s_tilde);
    // C_l = sum_i W_li^2 / (mu_i + lambda)
    const Eigen::VectorXd inv = (modes.mu.array() + lambda).inverse().matrix();
    const Eigen::VectorXd c = modes.w.array().square().matrix() * inv;
    CapacitySpectrum out;
    out.lambda = lambda;
    out.capacities.assign(c.data(), c.data() + c.size());
    for (double v : out.capacities) out.mc_total += v;
    return out;
}

}  // namespace delayrc
