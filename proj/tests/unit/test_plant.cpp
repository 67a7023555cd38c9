#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "ncb/error.hpp"
#include "ncb/plant/excitation.hpp"
#include "ncb/plant/narx.hpp"
#include "ncb/plant/plant.hpp"

using namespace ncb;

TEST(LinearPlant, StepArithmetic) {
    auto p = plant_linear1(0.5, 1.0);
    EXPECT_DOUBLE_EQ(p.step(1.0), 1.0);
    EXPECT_EQ(p.jacobian_du(3.0), 1.0);
}

TEST(LinearPlant, FreeResponseDecaysGeometrically) {
    auto p = plant_linear1(0.5, 1.0);
    p.reset(2.0);
    for (int k = 1; k <= 10; ++k) EXPECT_DOUBLE_EQ(p.step(0.0), 2.0 * std::pow(0.5, k));
}

TEST(LinearPlant, ZeroGainRejected) { EXPECT_THROW(plant_linear1(0.5, 0.0), ConfigError); }

TEST(LinearPlant, Superposition) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> d(-1, 1);
    std::vector<double> u1(50), u2(50);
    for (auto& v : u1) v = d(rng);
    for (auto& v : u2) v = d(rng);
    auto run = [](const std::vector<double>& u, double y0) {
        auto p = plant_linear1(0.7, -0.3);
        p.reset(y0);
        std::vector<double> y;
        for (double v : u) y.push_back(p.step(v));
        return y;
    };
    std::vector<double> both(50);
    for (std::size_t i = 0; i < 50; ++i) both[i] = u1[i] + u2[i];
    const auto y1 = run(u1, 0.4), y2 = run(u2, 0.4), y12 = run(both, 0.4);
    const auto y0 = run(std::vector<double>(50, 0.0), 0.4);
    for (std::size_t i = 0; i < 50; ++i) EXPECT_NEAR(y12[i], y1[i] + y2[i] - y0[i], 1e-12);
}

TEST(NonlinearPlant, Examples) {
    auto p = plant_nonlinear1();
    EXPECT_EQ(p.step(0.0), 0.0);
    p.reset(1.0);
    EXPECT_DOUBLE_EQ(p.step(1.0), 1.1);
    EXPECT_DOUBLE_EQ(p.jacobian_du(2.0), 1.7);
}

TEST(NonlinearPlant, MonotoneInControlWithJacobianAboveHalf) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> d(-3, 3);
    for (int i = 0; i < 200; ++i) {
        auto p = plant_nonlinear1();
        p.reset(d(rng));
        const double u = d(rng);
        EXPECT_LT(p.peek(u), p.peek(u + 1e-3));
        EXPECT_GE(p.jacobian_du(u), 0.5);
    }
}

TEST(Plant, ReplayIsBitExact) {
    std::vector<double> u = excitation({ExcitationKind::uniform_white, 1.5, 1, 77, 300});
    std::vector<double> d = excitation({ExcitationKind::uniform_white, 0.1, 1, 78, 300});
    auto run = [&] {
        auto p = plant_nonlinear1();
        std::vector<double> y;
        for (std::size_t i = 0; i < u.size(); ++i) y.push_back(p.step(u[i], d[i]));
        return y;
    };
    EXPECT_EQ(run(), run());
}

TEST(Narx, OutputOnlyOrdering) {
    NarxEstimator est(1, 0);
    est.observe(3.0);
    est.observe(5.0);
    EXPECT_EQ(est.state(), Eigen::Vector2d(5.0, 3.0));

    NarxEstimator fresh(2, 0);
    EXPECT_EQ(fresh.state(), Eigen::Vector3d::Zero());
}

TEST(Narx, WithControlHistory) {
    NarxEstimator est(1, 1);
    est.observe(1.0);
    est.observe(2.0);
    est.observe_u(7.0);
    EXPECT_EQ(est.state(), Eigen::Vector3d(2.0, 1.0, 7.0));
}

TEST(Narx, LengthAndOrderMatchHandFedHistory) {
    for (int n = 0; n <= 3; ++n) {
        for (int q = 0; q <= 2; ++q) {
            NarxEstimator est(n, q);
            for (int t = 1; t <= 6; ++t) {
                est.observe(double(t));
                est.observe_u(10.0 * t);
            }
            const auto s = est.state();
            ASSERT_EQ(s.size(), n + 1 + q);
            for (int i = 0; i <= n; ++i) EXPECT_EQ(s[i], 6.0 - i);
            for (int j = 0; j < q; ++j) EXPECT_EQ(s[n + 1 + j], 10.0 * (6 - j));
        }
    }
}

TEST(Narx, AdvanceAgreesWithObserving) {
    NarxEstimator est(2, 2);
    for (double v : {0.1, 0.2, 0.3}) {
        est.observe(v);
        est.observe_u(-v);
    }
    const auto before = est.state();
    est.observe(0.9);
    est.observe_u(-0.7);
    EXPECT_EQ(est.advance(before, 0.9, -0.7), est.state());
}

TEST(PhaseState, BackwardDifferences) {
    TappedDelayLined line(3);
    for (int i = 0; i < 3; ++i) line.push(4.5);
    const auto c = phase_state(line, 1);
    EXPECT_EQ(c, Eigen::Vector2d(4.5, 0.0));

    TappedDelayLined two(2);
    two.push(1.0);
    two.push(3.0);
    EXPECT_EQ(phase_state(two, 1), Eigen::Vector2d(3.0, 2.0));

    // Oracle: y'' = y(k) - 2 y(k-1) + y(k-2) = 4 - 4 + 1.
    TappedDelayLined three(3);
    for (double v : {1.0, 2.0, 4.0}) three.push(v);
    EXPECT_EQ(phase_state(three, 2), Eigen::Vector3d(4.0, 2.0, 1.0));
}

TEST(PhaseState, InsufficientHistoryRejected) {
    TappedDelayLined line(3);
    line.push(1.0);
    EXPECT_THROW(phase_state(line, 2), ShapeError);
}

TEST(Excitation, DeterministicPerSeed) {
    const ExcitationSpec spec{ExcitationKind::random_steps, 0.8, 4, 9, 100};
    EXPECT_EQ(excitation(spec), excitation(spec));
    for (double v : excitation(spec)) EXPECT_LE(std::abs(v), 0.8);
}

TEST(Excitation, ZeroAmplitudeIsSilent) {
    for (double v : excitation({ExcitationKind::uniform_white, 0.0, 1, 1, 20})) EXPECT_EQ(v, 0.0);
}

TEST(Excitation, RandomStepSegments) {
    const auto seq = excitation({ExcitationKind::random_steps, 1.0, 5, 3, 12});
    ASSERT_EQ(seq.size(), 12u);
    std::vector<std::size_t> sizes{1};
    for (std::size_t i = 1; i < seq.size(); ++i) {
        if (seq[i] == seq[i - 1])
            ++sizes.back();
        else
            sizes.push_back(1);
    }
    EXPECT_EQ(sizes, (std::vector<std::size_t>{5, 5, 2}));
}
