#include <cmath>
#include <numeric>
#include <stdexcept>

#include <gtest/gtest.h>

#include "delayrc/errors.hpp"
#include "delayrc/mmf.hpp"
#include "delayrc/reservoir.hpp"

namespace delayrc {
namespace {

TEST(Mask, LengthRangeAndDeterminism) {
    const Mask one = make_mask(1, 42);
    ASSERT_EQ(one.weights.size(), 1u);
    EXPECT_GE(one.weights[0], 0.0);
    EXPECT_LE(one.weights[0], 1.0);
    EXPECT_EQ(make_mask(100, 7).weights, make_mask(100, 7).weights);
    EXPECT_NE(make_mask(100, 7).weights, make_mask(100, 8).weights);
}

TEST(Mask, SampleMeanNearHalf) {
    const Mask m = make_mask(100000, 3);
    const double mean = std::accumulate(m.weights.begin(), m.weights.end(), 0.0) / 1e5;
    EXPECT_NEAR(mean, 0.5, 0.01);
    for (double w : m.weights) ASSERT_TRUE(w >= 0.0 && w <= 1.0);
}

TEST(Mask, RejectsEmpty) { EXPECT_THROW(make_mask(0, 1), ConfigError); }

TEST(Inputs, RangeDeterminismAndMeanSquare) {
    const InputSequence one = generate_inputs(1, 0);
    ASSERT_EQ(one.values.size(), 1u);
    EXPECT_LE(std::abs(one.values[0]), 1.0);

    const InputSequence u = generate_inputs(75000, 1);
    double sq = 0.0;
    for (double x : u.values) sq += x * x;
    EXPECT_NEAR(sq / 75000.0, 1.0 / 3.0, 0.01);
    EXPECT_EQ(u.values, generate_inputs(75000, 1).values);
}

TEST(Inputs, PrehistoryIsPrepended) {
    const InputSequence u = generate_inputs(10, 5, 4);
    EXPECT_EQ(u.values.size(), 14u);
    EXPECT_EQ(u.training_size(), 10);
    EXPECT_EQ(u.prehistory, 4);
}

TEST(InputSignal, PiecewiseConstantMaskedHold) {
    const TimingConfig timing = make_timing(4.0, 4, 4.0);
    const Mask mask{{0.1, 0.2, 0.3, 0.4}, 0};
    const InputSequence u{{0.5, -1.0}, 0, 0};
    const double eta = 2.0;
    EXPECT_DOUBLE_EQ(input_signal(u, mask, timing, eta, 0.0), eta * 0.5 * 0.1);
    EXPECT_DOUBLE_EQ(input_signal(u, mask, timing, eta, 4.0 + 2.0 + 0.5), eta * -1.0 * 0.3);
    EXPECT_DOUBLE_EQ(input_signal(u, mask, timing, eta, 3.999), eta * 0.5 * 0.4);
    EXPECT_THROW(input_signal(u, mask, timing, eta, 8.0), std::out_of_range);

    const Mask ones{{1.0, 1.0, 1.0, 1.0}, 0};
    for (double t = 0.0; t < 8.0; t += 0.37) {
        EXPECT_EQ(input_signal(u, ones, timing, 1.0, t), u.values[static_cast<std::size_t>(t / 4.0)]);
    }
}

TEST(Equilibrium, StuartLandauAndMackeyGlass) {
    EXPECT_NEAR(equilibrium(StuartLandauParams{-0.05, 0.06, -0.1, 1e-3}), std::sqrt(0.1), 1e-15);
    EXPECT_NEAR(equilibrium(MackeyGlassParams{-0.08, 0.10667, 1.0, 1e-3}), (0.10667 - 0.08) / 0.08, 1e-12);
    EXPECT_EQ(equilibrium(LinearDdeParams{}), 0.0);
}

TEST(Equilibrium, MissingBranchesAreErrors) {
    EXPECT_THROW(equilibrium(StuartLandauParams{-0.05, 0.06, 0.1, 1e-3}), ConfigError);
    EXPECT_THROW(equilibrium(MackeyGlassParams{-0.08, 0.1, 2.0, 1e-3}), ConfigError);
    EXPECT_THROW(equilibrium(MackeyGlassParams{0.0, 0.1, 1.0, 1e-3}), ConfigError);
    EXPECT_THROW(equilibrium(MackeyGlassParams{-0.08, 0.0, 1.0, 1e-3}), ConfigError);
}

TEST(Timing, ExactAndRoundedDelay) {
    const TimingConfig exact = make_timing(80.0, 160, 80.0);
    EXPECT_EQ(exact.theta, 0.5);
    EXPECT_EQ(exact.nu, 160);
    EXPECT_TRUE(exact.warnings.empty());

    const TimingConfig gap = make_timing(80.0, 160, 3.06 * 80.0);
    EXPECT_EQ(gap.nu, 490);  // 489.6 rounded
    EXPECT_DOUBLE_EQ(gap.tau, 245.0);
    EXPECT_EQ(gap.warnings.size(), 1u);

    EXPECT_THROW(make_timing(0.0, 10, 1.0), ConfigError);
    EXPECT_THROW(make_timing(10.0, 10, -1.0), ConfigError);
    EXPECT_THROW(make_timing(10.0, 10, 0.2), ConfigError);
}

TEST(AlignedStep, DividesNodeSpacing) {
    EXPECT_DOUBLE_EQ(aligned_step(0.5, 0.01), 0.01);
    const double dt = aligned_step(1.6, 0.03);
    EXPECT_LE(dt, 0.03);
    EXPECT_NEAR(1.6 / dt, std::round(1.6 / dt), 1e-9);
}

TEST(CenterStates, Examples) {
    StateMatrix raw;
    raw.entries = Eigen::MatrixXd::Constant(3, 2, 4.5);
    EXPECT_EQ(center_states(raw).entries.norm(), 0.0);

    raw.entries.resize(2, 1);
    raw.entries << 1.0, 3.0;
    const StateMatrix c = center_states(raw);
    EXPECT_TRUE(c.centered);
    EXPECT_EQ(c.entries(0, 0), -1.0);
    EXPECT_EQ(c.entries(1, 0), 1.0);
    EXPECT_EQ(center_states(c).entries, c.entries);
}

struct SmallRun {
    TimingConfig timing = make_timing(8.0, 16, 8.0);
    Mask mask = make_mask(16, 11);
    InputSequence inputs = generate_inputs(300, 12, 40);
    IntegratorOptions options{0.05, 100.0, 1e6};
};

TEST(IntegrateDde, EquilibriumIsInvariantWithoutInput) {
    SmallRun run;
    const StuartLandauParams sl{-0.05, 0.06, -0.1, 0.0};
    const StateMatrix raw = integrate_dde_raw(sl, run.timing, run.inputs, run.mask, run.options);
    const double s_star = std::sqrt(0.1);
    EXPECT_LE((raw.entries.array() - s_star).abs().maxCoeff(), 1e-10 * s_star);
    EXPECT_LE(integrate_dde(sl, run.timing, run.inputs, run.mask, run.options).entries.cwiseAbs().maxCoeff(),
              1e-12);
}

TEST(IntegrateDde, ColumnsHaveZeroMean) {
    SmallRun run;
    const StateMatrix s = integrate_dde(StuartLandauParams{}, run.timing, run.inputs, run.mask, run.options);
    EXPECT_TRUE(s.centered);
    EXPECT_EQ(s.entries.rows(), 300);
    EXPECT_EQ(s.entries.cols(), 16);
    EXPECT_LE(s.entries.colwise().mean().cwiseAbs().maxCoeff(), 1e-12 * s.entries.cwiseAbs().maxCoeff());
}

TEST(IntegrateDde, ResponseIsOfOrderEta) {
    SmallRun run;
    const StateMatrix s = integrate_dde(StuartLandauParams{}, run.timing, run.inputs, run.mask, run.options);
    const double peak = s.entries.cwiseAbs().maxCoeff();
    // c = eta s* and |d s| <= |c| / |a + b| for a unit input
    EXPECT_GT(peak, 1e-6);
    EXPECT_LT(peak, 1e-3 * std::sqrt(0.1) / 0.02);
}

TEST(IntegrateDde, LinearResponseScaling) {
    SmallRun run;
    StuartLandauParams sl;
    sl.eta = 1e-3;
    const Eigen::MatrixXd s1 = integrate_dde(sl, run.timing, run.inputs, run.mask, run.options).entries / 1e-3;
    sl.eta = 1e-4;
    const Eigen::MatrixXd s2 = integrate_dde(sl, run.timing, run.inputs, run.mask, run.options).entries / 1e-4;
    EXPECT_LT((s1 - s2).norm() / s1.norm(), 1e-2);
}

TEST(IntegrateDde, BitwiseDeterministic) {
    SmallRun run;
    const auto a = integrate_dde(StuartLandauParams{}, run.timing, run.inputs, run.mask, run.options);
    const auto b = integrate_dde(StuartLandauParams{}, run.timing, run.inputs, run.mask, run.options);
    EXPECT_EQ(a.entries, b.entries);
}

// With b = 0 the node-to-node map s_j = p s_{j-1} + gamma_c I_j is exact, so
// the recorded states can be checked against it.
TEST(IntegrateDde, DelayFreeSystemMatchesExactNodeMap) {
    SmallRun run;
    const LinearDdeParams lin{-0.3, 0.0, 0.7};
    const StateMatrix raw = integrate_dde_raw(lin, run.timing, run.inputs, run.mask, run.options);
    const double theta = run.timing.theta;
    const double p = std::exp(lin.a * theta);
    const double g = lin.c / lin.a * (p - 1.0);
    double s = 0.0;  // the transient leaves the state at rest
    for (std::size_t k = 0; k < run.inputs.values.size(); ++k) {
        for (int m = 0; m < 16; ++m) {
            s = p * s + g * run.inputs.values[k] * run.mask.weights[static_cast<std::size_t>(m)];
            const int row = static_cast<int>(k) - run.inputs.prehistory;
            if (row >= 0) ASSERT_NEAR(raw.entries(row, m), s, 1e-9) << "k = " << row << ", m = " << m;
        }
    }
}

TEST(IntegrateDde, MackeyGlassAndStuartLandauAgreeAtMatchedLinearization) {
    SmallRun run;
    const StuartLandauParams sl{-0.05, 0.06, -0.1, 1e-3};
    const Linearization lsl = linearize(sl);
    // Same a, b and c: p_MG = a, alpha = a^2 / b, eta = c / s*_MG.
    MackeyGlassParams mg{lsl.a, lsl.a * lsl.a / lsl.b, 1.0, 1.0};
    mg.eta = lsl.c / equilibrium(mg);
    const Linearization lmg = linearize(mg);
    ASSERT_NEAR(lmg.b, lsl.b, 1e-14);
    ASSERT_NEAR(lmg.c, lsl.c, 1e-17);

    const Eigen::MatrixXd a = integrate_dde(sl, run.timing, run.inputs, run.mask, run.options).entries;
    const Eigen::MatrixXd b = integrate_dde(mg, run.timing, run.inputs, run.mask, run.options).entries;
    // Differences are second order in the response amplitude.
    const double scale = a.cwiseAbs().maxCoeff();
    EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 50.0 * scale * scale + 1e-12);
    EXPECT_LT((a - b).norm() / a.norm(), 1e-2);
}

TEST(IntegrateDde, DivergenceNamesBlowUpTime) {
    SmallRun run;
    const LinearDdeParams unstable{0.05, 0.06, 1.0};
    run.options.overflow_guard = 10.0;
    try {
        (void)integrate_dde(unstable, run.timing, run.inputs, run.mask, run.options);
        FAIL() << "expected an instability";
    } catch (const InstabilityError& e) {
        EXPECT_GT(e.blowup_time(), 0.0);
        EXPECT_NE(std::string(e.what()).find("t = "), std::string::npos);
    }
}

TEST(IntegrateDde, MaskLengthMismatch) {
    SmallRun run;
    EXPECT_THROW(integrate_dde(StuartLandauParams{}, run.timing, run.inputs, make_mask(5, 1), run.options),
                 ConfigError);
}

TEST(DeriveSeed, DistinctStreams) {
    EXPECT_NE(derive_seed(1, 0, 0), derive_seed(1, 1, 0));
    EXPECT_NE(derive_seed(1, 0, 0), derive_seed(1, 0, 1));
    EXPECT_EQ(derive_seed(9, 2, 3), derive_seed(9, 2, 3));
}

}  // namespace
}  // namespace delayrc
