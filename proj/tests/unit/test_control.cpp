#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ncb/control/pid.hpp"
#include "ncb/control/reference_model.hpp"
#include "ncb/error.hpp"

using namespace ncb;

TEST(Pid, FormulaExamples) {
    const auto first = pid_step({2.0, 0.5, 0.1}, {}, 1.0);
    EXPECT_DOUBLE_EQ(first.u, 2.6);
    EXPECT_EQ(first.state.e_prev, 1.0);
    EXPECT_EQ(first.state.e_prev2, 0.0);
    EXPECT_EQ(first.state.u_prev, 2.6);

    EXPECT_EQ(pid_step({2.0, 0.5, 0.1}, {}, 0.0).u, 0.0);

    const PidState s{0.3, -0.2, 1.25};
    EXPECT_EQ(pid_step({0, 0, 0}, s, 7.0).u, 1.25);
}

TEST(Pid, NonFiniteErrorRejected) {
    EXPECT_THROW(pid_step({1, 1, 1}, {}, std::nan("")), ConfigError);
}

TEST(Pid, ConstantErrorAddsIntegralActionOnly) {
    const PidGains g{0.7, 0.2, 0.05};
    PidState s{};
    for (int i = 0; i < 3; ++i) s = pid_step(g, s, 0.5).state;
    const double before = s.u_prev;
    const auto next = pid_step(g, s, 0.5);
    EXPECT_NEAR(next.u - before, 0.2 * 0.5, 1e-15);
}

TEST(DuDk, Examples) {
    EXPECT_EQ(du_dK(1.0, 0.5, 0.0), Eigen::Vector3d(0.5, 1.0, 0.0));
    EXPECT_EQ(du_dK(0.0, 0.0, 0.0), Eigen::Vector3d::Zero());
    EXPECT_EQ(du_dK(2.5, 2.5, 2.5), Eigen::Vector3d(0.0, 2.5, 0.0));
}

// The law is linear in K, so central differences are exact up to rounding.
TEST(DuDk, MatchesDifferencesOfPidStep) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> d(-2, 2);
    for (int i = 0; i < 50; ++i) {
        const PidState s{d(rng), d(rng), d(rng)};
        const double e = d(rng);
        const Eigen::Vector3d k(d(rng), d(rng), d(rng));
        const Eigen::Vector3d analytic = du_dK(e, s.e_prev, s.e_prev2);
        for (int j = 0; j < 3; ++j) {
            const double h = 0.5;
            Eigen::Vector3d up = k, down = k;
            up[j] += h;
            down[j] -= h;
            const double fd = (pid_step(PidGains::from(up), s, e).u - pid_step(PidGains::from(down), s, e).u) / (2 * h);
            EXPECT_NEAR(fd, analytic[j], 1e-12);
        }
    }
}

TEST(ReferenceModel, Examples) {
    ReferenceModel pass(1.0);
    EXPECT_EQ(pass.step(0.8), 0.8);
    ReferenceModel half(0.5);
    EXPECT_EQ(half.step(1.0), 0.5);
    EXPECT_EQ(half.step(1.0), 0.75);
    EXPECT_EQ(half.step(1.0), 0.875);
}

TEST(ReferenceModel, GeometricConvergence) {
    const double tau = 0.3, r = -1.2;
    ReferenceModel m(tau);
    for (int k = 1; k <= 40; ++k) EXPECT_NEAR(m.step(r), r * (1.0 - std::pow(1.0 - tau, k)), 1e-12);
}

TEST(ReferenceModel, BoundedByRunningMaxOfInput) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> d(-3, 3), t(0.01, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        ReferenceModel m(t(rng));
        double running = 0.0;
        for (int k = 0; k < 100; ++k) {
            const double r = d(rng);
            running = std::max(running, std::abs(r));
            EXPECT_LE(std::abs(m.step(r)), running + 1e-12);
        }
    }
}

TEST(ReferenceModel, TauOutsideRangeRejected) {
    EXPECT_THROW(ReferenceModel(0.0), ConfigError);
    EXPECT_THROW(ReferenceModel(1.5), ConfigError);
}
