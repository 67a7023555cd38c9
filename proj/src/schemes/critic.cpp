#include "ncb/schemes/critic.hpp"

#include <cmath>
#include <random>
#include <string>

#include "ncb/error.hpp"

namespace ncb {

namespace {

constexpr double kParameterLimit = 1e6;

void guard(const Mlpd& net, const char* which, long tick) {
    const double m = max_abs_parameter(net);
    if (!std::isfinite(m) || m > kParameterLimit)
        throw DivergenceError(std::string(which) + " parameters diverged", tick);
}

void guard(double v, const char* which, long tick) {
    if (!std::isfinite(v)) throw DivergenceError(std::string("non-finite ") + which, tick);
}

double setpoint_at(std::span<const double> setpoints, long index) {
    if (setpoints.empty()) return 0.0;
    return setpoints[std::size_t(std::min<long>(index, long(setpoints.size()) - 1))];
}

}  // namespace

Eigen::VectorXd critic_input(double r_next, double u, const Eigen::VectorXd& state) {
    Eigen::VectorXd z(state.size() + 2);
    z << r_next, u, state;
    return z;
}

double td_error(double cost, double J_next, double J, double gamma) { return cost + gamma * J_next - J; }

void critic_update(CriticNet& critic, const Eigen::VectorXd& z, double delta) {
    const auto fwd = forward(critic.net, z);
    // 0.5 * delta^2 with the bootstrap target held fixed has gradient -delta * dJ/dw.
    const auto grads = backward_weights(critic.net, fwd.cache, Eigen::VectorXd::Constant(1, -delta));
    sgd_step(critic.net, grads, critic.rate_critic);
}

void actor_update(Mlpd& actor, const CriticNet& critic, const Eigen::VectorXd& x, const Eigen::VectorXd& z,
                  double rate, Eigen::Index u_slot) {
    if (u_slot < 0 || u_slot >= z.size())
        throw ShapeError("critic u-slot " + std::to_string(u_slot) + " outside input of length " +
                         std::to_string(z.size()));
    const auto critic_fwd = forward(critic.net, z);
    const double dJ_du = backward_inputs(critic.net, critic_fwd.cache, Eigen::VectorXd::Constant(1, 1.0))[u_slot];
    const auto actor_fwd = forward(actor, x);
    sgd_step(actor, backward_weights(actor, actor_fwd.cache, Eigen::VectorXd::Constant(1, dJ_du)), rate);
}

EpisodeLog hdp_episode(Mlpd& actor, CriticNet& critic, Plant& plant, NarxEstimator& est,
                       std::span<const double> setpoints, long ticks, HdpExploration exploration,
                       std::span<const double> disturbances) {
    if (!(exploration.amplitude >= 0.0)) throw ConfigError("exploration amplitude must be >= 0");
    std::mt19937_64 rng(exploration.seed);
    std::uniform_real_distribution<double> probe(-1.0, 1.0);
    if (!(critic.gamma > 0.0 && critic.gamma <= 1.0)) throw ConfigError("gamma must lie in (0, 1]");
    EpisodeLog log({"J_hat", "delta"});
    for (long k = 1; k <= ticks; ++k) {
        const Eigen::VectorXd s = est.state();
        const double r = setpoint_at(setpoints, k - 1);
        const Eigen::VectorXd x = concat(r, s);
        const double u_actor = actor(x)[0];
        const double u = exploration.amplitude > 0.0 ? u_actor + exploration.amplitude * probe(rng) : u_actor;
        const Eigen::VectorXd z = critic_input(r, u, s);
        const double J = critic.value(z);

        const double d = std::size_t(k - 1) < disturbances.size() ? disturbances[std::size_t(k - 1)] : 0.0;
        const double y = plant.step(u, d);
        guard(u, "control", k);
        guard(y, "plant output", k);
        est.observe(y);
        est.observe_u(u);
        const double e = r - y;

        const Eigen::VectorXd s_next = est.state();
        const double r_next = setpoint_at(setpoints, k);
        const double u_next = actor(concat(r_next, s_next))[0];
        const double J_next = critic.value(critic_input(r_next, u_next, s_next));

        const double delta = td_error(e * e, J_next, J, critic.gamma);
        guard(delta, "TD error", k);
        critic_update(critic, z, delta);
        actor_update(actor, critic, x, critic_input(r, u_actor, s), critic.rate_actor);
        guard(critic.net, "critic", k);
        guard(actor, "actor", k);

        EpisodeRow row;
        row.k = k;
        row.r = r;
        row.u = u;
        row.y = y;
        row.e = e;
        row.extra = {J, delta};
        log.add(std::move(row));
    }
    return log;
}

}  // namespace ncb
