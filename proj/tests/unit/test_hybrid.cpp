#include <gtest/gtest.h>

#include <cmath>

#include "ncb/error.hpp"
#include "ncb/schemes/hybrid.hpp"

using namespace ncb;

namespace {

Mlpd linear_row(const Eigen::RowVectorXd& w, double b = 0.0) {
    DenseLayer<double> l;
    l.weights = w;
    l.bias = Eigen::VectorXd::Constant(1, b);
    return Mlpd({l});
}

// Always answers with a fixed control.
class ConstantController final : public Controller {
public:
    explicit ConstantController(double u) : u_(u) {}
    double act(double r_next, const Eigen::VectorXd&) override {
        seen.push_back(r_next);
        return u_;
    }
    void reset() override { seen.clear(); }
    std::vector<double> seen;

private:
    double u_;
};

Region unit_box() { return Region(Eigen::Vector2d::Zero(), Eigen::Vector2d::Ones()); }

// Exact emulators of y(k+1) = 0.5 y(k) + u(k).
FilterAssembly exact_filter() {
    return {ForwardEmulator::trusted(linear_row(Eigen::RowVector3d(1.0, 0.5, 0.0))),
            linear_row(Eigen::RowVector3d(1.0, -0.5, 0.0))};
}

double mean_abs(const std::vector<double>& v, std::size_t from, std::size_t to) {
    double s = 0.0;
    for (std::size_t i = from; i < to; ++i) s += std::abs(v[i]);
    return s / double(to - from);
}

}  // namespace

TEST(Region, Membership) {
    EXPECT_TRUE(region_contains(unit_box(), Eigen::Vector2d::Zero()));
    EXPECT_FALSE(region_contains(unit_box(), Eigen::Vector2d(1.0, 0.0)));
    EXPECT_FALSE(region_contains(unit_box(), Eigen::Vector2d(0.2, -1.5)));
    EXPECT_THROW(region_contains(unit_box(), Eigen::Vector3d::Zero()), ShapeError);
    EXPECT_THROW(Region(Eigen::Vector2d::Zero(), Eigen::Vector2d(1.0, 0.0)), ConfigError);
}

TEST(HybridStep, Examples) {
    const Region box = unit_box();
    const Eigen::Vector2d inside(0.5, 0.5), outside(2.0, 0.0);
    EXPECT_EQ(hybrid_step(HybridMode::sum_after_nn_trained_on_closed_loop, 1.0, 0.5, nullptr, inside), 1.5);
    EXPECT_EQ(hybrid_step(HybridMode::sum_after_pid_tuned_on_closed_loop, 1.0, 0.5, nullptr, inside), 1.5);
    EXPECT_EQ(hybrid_step(HybridMode::region_switch, 1.0, 0.5, &box, inside), 0.5);
    EXPECT_EQ(hybrid_step(HybridMode::region_switch, 1.0, 0.5, &box, outside), 1.0);
    EXPECT_THROW(hybrid_step(HybridMode::region_switch, 1.0, 0.5, nullptr, inside), ConfigError);
}

TEST(HybridStep, SumModesCommute) {
    for (auto mode : {HybridMode::sum_after_nn_trained_on_closed_loop, HybridMode::sum_after_pid_tuned_on_closed_loop})
        EXPECT_EQ(hybrid_step(mode, 0.3, -1.1, nullptr, Eigen::Vector2d::Zero()),
                  hybrid_step(mode, -1.1, 0.3, nullptr, Eigen::Vector2d::Zero()));
}

TEST(HybridController, SilentNetworkReducesToPid) {
    const PidGains gains{0.4, 0.3, 0.05};
    HybridController hybrid(HybridMode::sum_after_nn_trained_on_closed_loop, gains,
                            std::make_unique<ConstantController>(0.0));
    PidController pid(gains);
    auto pa = plant_linear1(0.5, 1.0), pb = pa;
    NarxEstimator ea(1, 0), eb(1, 0);
    for (int k = 0; k < 30; ++k) {
        const double ua = hybrid.act(0.7, ea.state()), ub = pid.act(0.7, eb.state());
        ASSERT_EQ(ua, ub);
        ea.observe(pa.step(ua));
        eb.observe(pb.step(ub));
    }
}

TEST(HybridController, SwitchModeRequiresRegion) {
    EXPECT_THROW(HybridController(HybridMode::region_switch, {}, std::make_unique<ConstantController>(0.0)),
                 ConfigError);
    EXPECT_THROW(HybridController(HybridMode::sum_after_nn_trained_on_closed_loop, {}, nullptr), ConfigError);
}

TEST(NeuroPid, ZeroErrorAndHistoryGiveNoUpdate) {
    NeuroPidAssembly a{Mlpd::random({3, 8, 3}, {Activation::tanh, Activation::linear}, 1), {}, 0.1, true};
    const auto h = parameter_hash(a.net);
    auto plant = plant_linear1(0.5, 1.0);
    NarxEstimator est(1, 0);
    const auto tick = neuro_pid_step(a, plant, est, 0.0, JacobianMode::analytic);
    EXPECT_EQ(tick.du_dk, Eigen::Vector3d::Zero());
    EXPECT_EQ(tick.u, 0.0);
    EXPECT_EQ(parameter_hash(a.net), h);
}

TEST(NeuroPid, RateZeroStillProducesGains) {
    NeuroPidAssembly a{Mlpd::random({3, 8, 3}, {Activation::tanh, Activation::linear}, 1), {}, 0.0, true};
    const auto h = parameter_hash(a.net);
    auto plant = plant_linear1(0.5, 1.0);
    NarxEstimator est(1, 0);
    for (int k = 0; k < 20; ++k) {
        const auto tick = neuro_pid_step(a, plant, est, 0.5, JacobianMode::analytic);
        EXPECT_TRUE(tick.gains.vector().allFinite());
    }
    EXPECT_EQ(parameter_hash(a.net), h);
}

// Gradient through the gains against a central difference of the one-tick loss.
TEST(NeuroPid, GainGradientMatchesDifferences) {
    auto plant = plant_nonlinear1();
    plant.reset(0.3);
    NarxEstimator est(1, 0);
    est.observe(0.1);
    est.observe(0.3);
    const PidState history{0.2, -0.1, 0.4};
    const double r = 0.6;
    const Eigen::Vector3d K(0.5, 0.2, 0.1);

    auto loss = [&](const Eigen::Vector3d& k) {
        auto p = plant;
        const double u = pid_step(PidGains::from(k), history, r - 0.3).u;
        const double e = r - p.step(u);
        return 0.5 * e * e;
    };
    DenseLayer<double> l{Eigen::MatrixXd::Zero(3, 1), K, Activation::linear};
    NeuroPidAssembly a{Mlpd({l}), history, 1.0, false};
    auto p = plant;
    NarxEstimator e2 = est;
    neuro_pid_step(a, p, e2, r, JacobianMode::analytic);
    // With zero weights and unit rate the bias moved by exactly -dL/dK.
    const Eigen::Vector3d step = K - a.net.layers()[0].bias;
    for (int j = 0; j < 3; ++j) {
        Eigen::Vector3d up = K, down = K;
        up[j] += 1e-6;
        down[j] -= 1e-6;
        EXPECT_NEAR(step[j], (loss(up) - loss(down)) / 2e-6, 1e-7) << "gain " << j;
    }
}

TEST(NeuroPid, OnlineTuningReducesError) {
    NeuroPidAssembly a{Mlpd::random({3, 8, 3}, {Activation::tanh, Activation::linear}, 4), {}, 0.05, true};
    auto plant = plant_linear1(0.5, 1.0);
    NarxEstimator est(1, 0);
    std::vector<double> e;
    for (int k = 0; k < 500; ++k) e.push_back(neuro_pid_step(a, plant, est, 0.5, JacobianMode::analytic).e);
    EXPECT_LT(mean_abs(e, 450, 500), mean_abs(e, 0, 50));
}

TEST(Filter, QuiescentWithPerfectEmulator) {
    FilterAssembly f = exact_filter();
    auto plant = plant_linear1(0.5, 1.0);
    NarxEstimator est(1, 0);
    for (double u : {0.3, -0.2, 0.7, 0.0}) {
        const auto tick = filter_step(f, u, plant, est);
        EXPECT_NEAR(tick.e_dist, 0.0, 1e-15);
        EXPECT_NEAR(tick.u_corr_next, 0.0, 1e-15);
        EXPECT_NEAR(tick.u_fin, u, 1e-15);
    }
}

TEST(Filter, FirstTickAppliesControllerOutput) {
    FilterAssembly f = exact_filter();
    auto plant = plant_linear1(0.5, 1.0);
    NarxEstimator est(1, 0);
    const auto tick = filter_step(f, 0.4, plant, est, 0.2);
    EXPECT_EQ(tick.u_fin, 0.4);
    EXPECT_NEAR(tick.e_dist, 0.2, 1e-15);
    EXPECT_NEAR(tick.u_corr_next, -0.2, 1e-15);
}

TEST(Filter, RefusesMissingEmulators) {
    auto plant = plant_linear1(0.5, 1.0);
    NarxEstimator est(1, 0);
    FilterAssembly unready = exact_filter();
    unready.forward.validation_mse = 1.0;
    EXPECT_THROW(filter_step(unready, 0.1, plant, est), NotReadyError);
    FilterAssembly no_inverse = exact_filter();
    no_inverse.inverse = Mlpd{};
    EXPECT_THROW(filter_step(no_inverse, 0.1, plant, est), NotReadyError);
}

// Constant additive disturbance on the plant, exact inverse controller: the
// filter removes the steady offset that the controller alone leaves.
TEST(Filter, CancelsConstantDisturbance) {
    const double r = 0.5, d = 0.2;
    auto run = [&](bool filtered) {
        auto plant = plant_linear1(0.5, 1.0);
        NarxEstimator est(1, 0);
        FilterAssembly f = exact_filter();
        const Mlpd ctl = linear_row(Eigen::RowVector3d(1.0, -0.5, 0.0));
        std::vector<double> e;
        for (int k = 0; k < 200; ++k) {
            const double u = ctl(concat(r, est.state()))[0];
            double y;
            if (filtered) {
                y = filter_step(f, u, plant, est, d).y;
            } else {
                y = plant.step(u, d);
                est.observe(y);
            }
            e.push_back(r - y);
        }
        return mean_abs(e, 150, 200);
    };
    const double without = run(false), with = run(true);
    EXPECT_NEAR(without, d, 1e-12);
    EXPECT_LT(with, 1e-12);
}

TEST(ReferenceWrap, UnitTauIsPassThrough) {
    auto inner = std::make_unique<ConstantController>(0.25);
    auto* seen = inner.get();
    auto wrapped = wrap_with_reference(ReferenceModel(1.0), std::move(inner));
    for (double r : {0.3, -0.4, 1.2}) EXPECT_EQ(wrapped->act(r, Eigen::Vector2d::Zero()), 0.25);
    EXPECT_EQ(seen->seen, (std::vector<double>{0.3, -0.4, 1.2}));
}

TEST(ReferenceWrap, InnerSeesGeometricApproach) {
    auto inner = std::make_unique<ConstantController>(0.0);
    auto* seen = inner.get();
    auto wrapped = wrap_with_reference(ReferenceModel(0.5), std::move(inner));
    for (int k = 0; k < 3; ++k) wrapped->act(1.0, Eigen::Vector2d::Zero());
    EXPECT_EQ(seen->seen, (std::vector<double>{0.5, 0.75, 0.875}));
    wrapped->reset();
    wrapped->act(1.0, Eigen::Vector2d::Zero());
    EXPECT_EQ(seen->seen, (std::vector<double>{0.5}));
}
