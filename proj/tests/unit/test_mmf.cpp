#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "delayrc/analysis.hpp"
#include "delayrc/errors.hpp"
#include "delayrc/mmf.hpp"

namespace delayrc {
namespace {

// Runs the coupled map s_j = gamma_c I_j + p s_{j-1} + m s_{j-nu} with
// I_j = u_{j / N_V} w_{j mod N_V}, starting from zero history.
Eigen::MatrixXd run_map(const MapCoefficients& mc, const Mask& mask, const std::vector<double>& u) {
    const int n_v = mc.n_v;
    const auto total = static_cast<long>(u.size()) * n_v;
    std::vector<double> s(static_cast<std::size_t>(total), 0.0);
    for (long j = 0; j < total; ++j) {
        const double in = u[static_cast<std::size_t>(j / n_v)] * mask.weights[static_cast<std::size_t>(j % n_v)];
        const double prev = j >= 1 ? s[static_cast<std::size_t>(j - 1)] : 0.0;
        const double del = j >= mc.nu ? s[static_cast<std::size_t>(j - mc.nu)] : 0.0;
        s[static_cast<std::size_t>(j)] = mc.gamma_c * in + mc.p * prev + mc.m * del;
    }
    Eigen::MatrixXd out(static_cast<Eigen::Index>(u.size()), n_v);
    for (long j = 0; j < total; ++j) out(j / n_v, j % n_v) = s[static_cast<std::size_t>(j)];
    return out;
}

std::vector<double> uniform_inputs(int n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    std::vector<double> u(static_cast<std::size_t>(n));
    for (auto& x : u) x = d(rng);
    return u;
}

TEST(Linearization, StuartLandauCoefficients) {
    StuartLandauParams sl{-0.05, 0.201, -0.1, 1e-3};
    const Linearization lin = linearize(ReservoirModel{sl});
    EXPECT_NEAR(lin.a, -0.503, 1e-12);
    EXPECT_NEAR(lin.b, 0.201, 1e-15);
    EXPECT_NEAR(lin.c, 1e-3 * std::sqrt(1.51), 1e-15);
    EXPECT_TRUE(lin.warnings.empty());
}

TEST(Linearization, MackeyGlassCoefficients) {
    MackeyGlassParams mg{-0.08, 0.32 / 3.0, 1.0, 1e-3};
    const double s_star = -(mg.p_mg + mg.alpha) / mg.p_mg;
    const Linearization lin = linearize(ReservoirModel{mg});
    EXPECT_DOUBLE_EQ(lin.a, -0.08);
    EXPECT_NEAR(lin.b, mg.alpha / ((1 + s_star) * (1 + s_star)), 1e-15);
    EXPECT_NEAR(lin.c, 1e-3 * s_star, 1e-15);
}

TEST(Linearization, UnstableOperatingPointWarns) {
    EXPECT_FALSE(make_linearization(-0.1, 0.2, 1.0).warnings.empty());
    EXPECT_TRUE(make_linearization(-0.2, 0.1, 1.0).warnings.empty());
}

TEST(MapCoefficients, ClosedForm) {
    const MapCoefficients mc = map_coefficients(make_linearization(-0.5, 0.2, 0.3), 0.4, 7, 5);
    const double p = std::exp(-0.2);
    EXPECT_NEAR(mc.p, p, 1e-15);
    EXPECT_NEAR(mc.m, -(0.2 / -0.5) * (1 - p), 1e-15);
    EXPECT_NEAR(mc.gamma_c, -(0.3 / -0.5) * (1 - p), 1e-15);
    EXPECT_THROW(map_coefficients(make_linearization(0.0, 0.2, 0.3), 0.4, 7, 5), ConfigError);
}

TEST(BinomialTerm, MatchesLogGammaOracle) {
    MapCoefficients mc;
    mc.p = 0.9;
    mc.m = -0.07;
    for (int i : {0, 1, 5, 40})
        for (int k : {0, 1, 3, 12}) {
            const double logc = std::lgamma(i + k + 1.0) - std::lgamma(i + 1.0) - std::lgamma(k + 1.0);
            const double oracle = std::exp(logc) * std::pow(mc.p, i) * std::pow(mc.m, k);
            EXPECT_NEAR(binomial_term(i, k, mc), oracle, 1e-12 * std::abs(oracle) + 1e-300);
        }
}

class MmfFixture : public ::testing::Test {
protected:
    TimingConfig timing = make_timing(20.0, 10, 13.0);  // theta = 2, nu = 6 (< N_V)
    Mask mask = make_mask(10, 5);
    Linearization lin = make_linearization(-0.3, 0.12, 0.05);
    MapCoefficients mc = map_coefficients(lin, timing.theta, timing.nu, timing.n_v);
};

// The state at the end of a long run equals sqrt(3) sum_l S~_ln u_{K-l}.
TEST_F(MmfFixture, ReproducesCoupledMapStates) {
    MmfOptions opt;
    opt.epsilon_rel = 1e-14;
    const ModifiedStateMatrix st = modified_state_matrix(mc, mask, opt);
    const int n = 400;
    const auto u = uniform_inputs(n, 9);
    const Eigen::MatrixXd s = run_map(mc, mask, u);
    const double scale = s.cwiseAbs().maxCoeff();
    for (int k = n - 5; k < n; ++k)
        for (int node = 0; node < timing.n_v; ++node) {
            double pred = 0.0;
            for (Eigen::Index l = 0; l < st.entries.rows(); ++l)
                pred += std::sqrt(3.0) * st.entries(l, node) * u[static_cast<std::size_t>(k - l)];
            EXPECT_NEAR(pred, s(k, node), 1e-11 * scale);
        }
}

TEST_F(MmfFixture, LongDelayAlsoReproducesStates) {
    const TimingConfig t2 = make_timing(20.0, 10, 34.0);  // nu = 17 > N_V
    const MapCoefficients mc2 = map_coefficients(lin, t2.theta, t2.nu, t2.n_v);
    MmfOptions opt;
    opt.epsilon_rel = 1e-14;
    const ModifiedStateMatrix st = modified_state_matrix(mc2, mask, opt);
    const int n = 400;
    const auto u = uniform_inputs(n, 10);
    const Eigen::MatrixXd s = run_map(mc2, mask, u);
    const double scale = s.cwiseAbs().maxCoeff();
    for (int node = 0; node < t2.n_v; ++node) {
        double pred = 0.0;
        for (Eigen::Index l = 0; l < st.entries.rows(); ++l)
            pred += std::sqrt(3.0) * st.entries(l, node) * u[static_cast<std::size_t>(n - 1 - l)];
        EXPECT_NEAR(pred, s(n - 1, node), 1e-11 * scale);
    }
}

TEST_F(MmfFixture, NoFeedbackIsGeometric) {
    const MapCoefficients m0 = map_coefficients(make_linearization(-0.3, 0.0, 0.05), timing.theta,
                                                timing.nu, timing.n_v);
    MmfOptions opt;
    opt.epsilon_rel = 1e-15;
    const ModifiedStateMatrix st = modified_state_matrix(m0, mask, opt);
    const int n_v = timing.n_v;
    for (Eigen::Index l = 0; l < std::min<Eigen::Index>(st.entries.rows(), 4); ++l)
        for (int node = 0; node < n_v; ++node) {
            // Input of slot j in cycle K - l reaches node n after d = n - j + l N_V steps.
            double oracle = 0.0;
            for (int j = 0; j < n_v; ++j) {
                const long d = node - j + l * n_v;
                if (d >= 0) oracle += std::pow(m0.p, static_cast<double>(d)) * mask.weights[static_cast<std::size_t>(j)];
            }
            oracle *= m0.gamma_c / std::sqrt(3.0);
            EXPECT_NEAR(st.entries(l, node), oracle, 1e-14);
        }
}

TEST_F(MmfFixture, TruncationDropsOnlySmallRows) {
    MmfOptions loose;
    loose.epsilon_rel = 1e-6;
    MmfOptions tight;
    tight.epsilon_rel = 1e-15;
    const ModifiedStateMatrix a = modified_state_matrix(mc, mask, loose);
    const ModifiedStateMatrix b = modified_state_matrix(mc, mask, tight);
    EXPECT_TRUE(a.rows_converged);
    EXPECT_LT(a.triangle_rows, b.triangle_rows);
    Eigen::MatrixXd pa = Eigen::MatrixXd::Zero(b.entries.rows(), b.entries.cols());
    pa.topRows(a.entries.rows()) = a.entries;
    const double peak = b.entries.cwiseAbs().maxCoeff();
    EXPECT_LT((pa - b.entries).cwiseAbs().maxCoeff(), 10.0 * loose.epsilon_rel * timing.n_v * peak);
}

// The bound is relative to MC: rows below epsilon still count against the
// small K-scaled lambda, so the absolute change grows with the input gain.
TEST_F(MmfFixture, DoublingTriangleDepthBarelyMovesCapacity) {
    for (double c : {3e-4, 0.05}) {
        const MapCoefficients coeffs =
            map_coefficients(make_linearization(lin.a, lin.b, c), timing.theta, timing.nu, timing.n_v);
        const ModifiedStateMatrix st = modified_state_matrix(coeffs, mask);
        MmfOptions deeper;
        deeper.min_triangle_rows = 2 * st.triangle_rows;
        const ModifiedStateMatrix deep = modified_state_matrix(coeffs, mask, deeper);
        EXPECT_EQ(deep.triangle_rows, 2 * st.triangle_rows);
        const double lambda = mmf_lambda(st);
        const double base = mmf_memory_capacity(st, lambda);
        EXPECT_LT(std::abs(mmf_memory_capacity(deep, lambda) - base) / base,
                  10.0 * MmfOptions{}.epsilon_rel * timing.n_v)
            << "c = " << c;
    }
}

TEST_F(MmfFixture, InvariantUnderJointRescaling) {
    const ModifiedStateMatrix st = modified_state_matrix(mc, mask);
    const double lambda = mmf_lambda(st);
    for (double k : {1e-3, 7.0, 1e4}) {
        ModifiedStateMatrix scaled = st;
        scaled.entries *= k;
        EXPECT_NEAR(mmf_memory_capacity(scaled, k * k * lambda), mmf_memory_capacity(st, lambda), 1e-10);
    }
}

TEST_F(MmfFixture, MinRowsPadsWithZeros) {
    MmfOptions opt;
    opt.min_rows = 500;
    const ModifiedStateMatrix st = modified_state_matrix(mc, mask, opt);
    ASSERT_EQ(st.entries.rows(), 500);
    EXPECT_EQ(st.entries.row(499).cwiseAbs().maxCoeff(), 0.0);
}

TEST_F(MmfFixture, SpectrumBoundsAndTraceIdentity) {
    const ModifiedStateMatrix st = modified_state_matrix(mc, mask);
    const double lambda = mmf_lambda(st);
    const CapacitySpectrum spec = mmf_capacity_spectrum(st, lambda);
    for (double c : spec.capacities) {
        EXPECT_GE(c, 0.0);
        EXPECT_LE(c, 1.0);
    }
    EXPECT_NEAR(spec.mc_total, mmf_memory_capacity(st, lambda), 1e-10);
    EXPECT_LE(spec.mc_total, timing.n_v);
}

TEST_F(MmfFixture, VanishingRegularizationSaturatesRank) {
    const ModifiedStateMatrix st = modified_state_matrix(mc, mask);
    ASSERT_GE(st.entries.rows(), timing.n_v);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(st.entries);
    const double smin = svd.singularValues().minCoeff();
    ASSERT_GT(smin, 0.0);
    EXPECT_NEAR(mmf_memory_capacity(st, 1e-8 * smin * smin), timing.n_v, 1e-6);
    EXPECT_LT(mmf_memory_capacity(st, 1e4 * smin * smin), timing.n_v - 0.5);
}

TEST_F(MmfFixture, SingleRowHasClosedForm) {
    ModifiedStateMatrix st;
    st.entries = Eigen::RowVectorXd::LinSpaced(4, 1.0, 2.0);
    const double g = st.entries.squaredNorm();
    const double lambda = 0.3;
    EXPECT_NEAR(mmf_memory_capacity(st, lambda), g / (g + lambda), 1e-14);
    EXPECT_NEAR(mmf_capacity_spectrum(st, lambda).capacities[0], g / (g + lambda), 1e-14);
}

TEST_F(MmfFixture, LambdaRule) {
    const ModifiedStateMatrix st = modified_state_matrix(mc, mask);
    const double peak = std::sqrt(3.0) * st.entries.cwiseAbs().colwise().sum().maxCoeff();
    EXPECT_NEAR(mmf_lambda(st, 20000.0, 1e-6), 1e-6 * peak / 20000.0, 1e-25);
    EXPECT_NEAR(peak_state_response(st), peak, 1e-15);
    EXPECT_THROW(mmf_lambda(st, 0.0), ConfigError);
}

// The Gram matrix of S~ is the stationary covariance of the map states.
TEST_F(MmfFixture, GramMatchesEmpiricalCovariance) {
    const ModifiedStateMatrix st = modified_state_matrix(mc, mask);
    const int burn = 200;
    const int k = 40000;
    const auto u = uniform_inputs(k + burn, 12);
    const Eigen::MatrixXd s = run_map(mc, mask, u).bottomRows(k);
    const Eigen::MatrixXd centered = s.rowwise() - s.colwise().mean();
    const Eigen::MatrixXd cov = centered.transpose() * centered / k;
    const Eigen::MatrixXd gram = st.entries.transpose() * st.entries;
    // Sampling error of a second moment is about sqrt(2/K) relative.
    EXPECT_LT((cov - gram).cwiseAbs().maxCoeff(), 0.03 * gram.cwiseAbs().maxCoeff());
}

TEST_F(MmfFixture, SpectrumMatchesRidgeOnMapStates) {
    const ModifiedStateMatrix st = modified_state_matrix(mc, mask);
    const int burn = 200;
    const int k = 20000;
    const int prehistory = 60;
    const auto u = uniform_inputs(k + burn + prehistory, 13);
    const Eigen::MatrixXd s = run_map(mc, mask, u).bottomRows(k);
    InputSequence seq;
    seq.values.assign(u.begin() + burn, u.end());
    seq.prehistory = prehistory;
    StateMatrix sm;
    sm.entries = s;
    CapacityOptions copt;
    copt.apply_cutoff = false;
    copt.l_max = 20;
    copt.auto_extend = false;
    const CapacitySpectrum direct = memory_capacity(center_states(sm), seq, copt);
    const CapacitySpectrum mmf = mmf_capacity_spectrum(st, mmf_lambda(st, k));
    for (int l = 0; l <= 20; ++l) {
        const double cm = l < static_cast<int>(mmf.capacities.size()) ? mmf.capacities[static_cast<std::size_t>(l)] : 0.0;
        EXPECT_NEAR(direct.capacities[static_cast<std::size_t>(l)], cm, 0.02) << "l = " << l;
    }
}

TEST(MmfUniversality, DependsOnlyOnLinearization) {
    const TimingConfig timing = make_timing(80.0, 160, 80.0);
    const Mask mask = make_mask(160, 3);
    const StuartLandauParams sl = stuart_landau_for(-0.503, 0.2, -0.1, 1e-3);
    const Linearization l_sl = linearize(ReservoirModel{sl});
    const MackeyGlassParams mg = mackey_glass_for(-0.503, 0.2, l_sl.c / (0.503 / 0.2 - 1.0));
    const Linearization l_mg = linearize(ReservoirModel{mg});
    ASSERT_NEAR(l_sl.a, l_mg.a, 1e-12);
    ASSERT_NEAR(l_sl.b, l_mg.b, 1e-12);
    ASSERT_NEAR(l_sl.c, l_mg.c, 1e-15);
    const double mc_sl = mmf_spectrum(l_sl, timing, mask, 20000.0).mc_total;
    const double mc_mg = mmf_spectrum(l_mg, timing, mask, 20000.0).mc_total;
    EXPECT_NEAR(mc_sl, mc_mg, 1e-8 * mc_sl);
}

// With nu = N_V every node sees the same lag structure, so a cyclic shift of
// the mask is a relabelling of node phases within the cycle.
// A cyclic mask shift is not a symmetry: the input switches at the cycle
// boundary, so the shifted mask meets each input at a different phase. The
// change it causes must match ridge capacities on simulated map states.
TEST(MmfRotation, MaskShiftTracksMapRidge) {
    const TimingConfig timing = make_timing(20.0, 10, 20.0);
    ASSERT_EQ(timing.nu, timing.n_v);
    const MapCoefficients mc = map_coefficients(make_linearization(-0.2, 0.12, 3e-4), timing.theta,
                                                timing.nu, timing.n_v);
    const Mask mask = make_mask(10, 5);
    const int k = 50000;
    const int burn = 300;
    const int prehistory = 100;
    const auto u = uniform_inputs(k + burn + prehistory, 9);
    InputSequence seq;
    seq.values.assign(u.begin() + burn, u.end());
    seq.prehistory = prehistory;
    CapacityOptions copt;
    copt.apply_cutoff = false;
    copt.l_max = 60;
    copt.auto_extend = false;

    double mmf_base = 0.0;
    double ridge_base = 0.0;
    for (int r : {0, 1, 3, 5}) {
        Mask rotated = mask;
        std::rotate(rotated.weights.begin(), rotated.weights.begin() + r, rotated.weights.end());
        const ModifiedStateMatrix st = modified_state_matrix(mc, rotated);
        const double mmf = mmf_memory_capacity(st, mmf_lambda(st, k));
        StateMatrix sm;
        sm.entries = run_map(mc, rotated, u).bottomRows(k);
        const double ridge = memory_capacity(center_states(sm), seq, copt).mc_total;
        EXPECT_NEAR(mmf, ridge, 0.05) << "shift " << r;
        if (r == 0) {
            mmf_base = mmf;
            ridge_base = ridge;
        } else {
            EXPECT_NEAR(mmf - mmf_base, ridge - ridge_base, 0.03) << "shift " << r;
        }
    }
}

TEST(MmfErrors, DivergentAndDegenerate) {
    const Mask mask = make_mask(10, 1);
    const MapCoefficients unstable = map_coefficients(make_linearization(-0.1, 0.2, 1.0), 1.0, 12, 10);
    EXPECT_THROW(modified_state_matrix(unstable, mask), DivergenceError);
    const MapCoefficients ok = map_coefficients(make_linearization(-0.3, 0.1, 1.0), 1.0, 12, 10);
    EXPECT_THROW(modified_state_matrix(ok, make_mask(9, 1)), ConfigError);
    const MapCoefficients no_input = map_coefficients(make_linearization(-0.3, 0.1, 0.0), 1.0, 12, 10);
    const ModifiedStateMatrix zero = modified_state_matrix(no_input, mask);
    EXPECT_EQ(zero.entries.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_THROW(mmf_lambda(zero), NumericalError);
    EXPECT_THROW(mmf_memory_capacity(zero, 0.0), NumericalError);
}

}  // namespace
}  // namespace delayrc
