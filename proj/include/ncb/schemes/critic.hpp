#pragma once

// Heuristic dynamic programming: a critic estimating the discounted future
// squared tracking error, trained by temporal differences, and an actor
// trained by backpropagating the critic's sensitivity to the control.

#include <Eigen/Dense>

#include <span>

#include "ncb/harness/episode_log.hpp"
#include "ncb/nn/mlp.hpp"
#include "ncb/plant/narx.hpp"
#include "ncb/plant/plant.hpp"
#include "ncb/schemes/controller.hpp"

namespace ncb {

struct CriticNet {
    Mlpd net;  // z = [r(k+1), u(k), S(k)] -> J_hat(k)
    double gamma = 0.9;
    double rate_critic = 0.1;   // alpha1
    double rate_actor = 0.01;   // alpha2

    static constexpr Eigen::Index u_slot = 1;

    double value(const Eigen::VectorXd& z) const { return net(z)[0]; }
};

Eigen::VectorXd critic_input(double r_next, double u, const Eigen::VectorXd& state);

// delta = cost + gamma * J_next - J
double td_error(double cost, double J_next, double J, double gamma);

// w <- w + alpha1 * delta * dJ/dw
void critic_update(CriticNet& critic, const Eigen::VectorXd& z, double delta);

// Descends J_hat through the control: dJ/du at z's u-slot, then into the actor
// through its input x. The critic is read only.
void actor_update(Mlpd& actor, const CriticNet& critic, const Eigen::VectorXd& x, const Eigen::VectorXd& z,
                  double rate, Eigen::Index u_slot = CriticNet::u_slot);

// Optional probing noise added to the applied control, uniform in
// [-amplitude, amplitude]. The critic learns from the applied control; the
// actor update evaluates the critic at the actor's own output.
struct HdpExploration {
    double amplitude = 0.0;
    std::uint64_t seed = 0;
};

// Runs `ticks` ticks with online critic then actor updates each tick.
// setpoints[k-1] is r(k+1) for tick k; the last value repeats if short.
// disturbances[k-1], when present, is added to the plant at tick k.
// Columns: J_hat, delta. Aborts with DivergenceError on any non-finite value
// or a parameter above 1e6 in magnitude.
EpisodeLog hdp_episode(Mlpd& actor, CriticNet& critic, Plant& plant, NarxEstimator& est,
                       std::span<const double> setpoints, long ticks, HdpExploration exploration = {},
                       std::span<const double> disturbances = {});

}  // namespace ncb
