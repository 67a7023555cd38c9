#include "ncb/schemes/inverse.hpp"

#include <cmath>
#include <string>

#include "ncb/error.hpp"

namespace ncb {

namespace {

void require_finite(double v, const char* what, long tick) {
    if (!std::isfinite(v)) throw DivergenceError(std::string("non-finite ") + what, tick);
}

Eigen::VectorXd scalar(double v) { return Eigen::VectorXd::Constant(1, v); }

}  // namespace

TrainingSet collect_mimic(Plant& plant, const PidGains& gains, std::span<const double> setpoints,
                          NarxEstimator& est) {
    TrainingSet set;
    PidController pid(gains);
    for (std::size_t i = 0; i < setpoints.size(); ++i) {
        const Eigen::VectorXd s = est.state();
        const double r_next = setpoints[i];
        const double u = pid.act(r_next, s);
        const double y = plant.step(u);
        require_finite(u, "control in PID run", long(i) + 1);
        require_finite(y, "output in PID run", long(i) + 1);
        est.observe(y);
        est.observe_u(u);
        set.add(concat(r_next, s), scalar(u));
    }
    return set;
}

TrainingSet collect_inverse(Plant& plant, const ExcitationSpec& exc, NarxEstimator& est) {
    TrainingSet set;
    for (double u : excitation(exc)) {
        const Eigen::VectorXd prior = est.state();
        const double y = plant.step(u);
        est.observe(y);
        est.observe_u(u);
        set.add(concat(y, prior), scalar(u));
    }
    return set;
}

TrainingSet collect_forward(Plant& plant, const ExcitationSpec& exc, NarxEstimator& est) {
    TrainingSet set;
    for (double u : excitation(exc)) {
        const Eigen::VectorXd prior = est.state();
        const double y = plant.step(u);
        est.observe(y);
        est.observe_u(u);
        set.add(concat(u, prior), scalar(y));
    }
    return set;
}

InverseController::InverseController(Mlpd net, InverseMode mode, Eigen::Index width)
    : net_(std::move(net)), mode_(mode), width_(width),
      history_(mode == InverseMode::open_loop ? std::size_t(width - 1) : 0) {
    if (net_.depth() == 0) throw ShapeError("inverse controller needs a trained network");
    if (net_.output_dim() != 1) throw ShapeError("inverse controller network must have one output");
    if (net_.input_dim() != width)
        throw ShapeError(std::string(mode == InverseMode::closed_loop ? "closed" : "open") +
                         "-loop inverse controller expects input width " + std::to_string(width) +
                         ", network takes " + std::to_string(net_.input_dim()));
}

InverseController InverseController::closed_loop(Mlpd net, Eigen::Index state_width) {
    return InverseController(std::move(net), InverseMode::closed_loop, state_width + 1);
}

InverseController InverseController::open_loop(Mlpd net, int order) {
    if (order < 1) throw ConfigError("open-loop inverse control needs order >= 1");
    return InverseController(std::move(net), InverseMode::open_loop, order + 1);
}

Eigen::VectorXd InverseController::input(double r_next, const Eigen::VectorXd& state) const {
    if (mode_ == InverseMode::closed_loop) {
        if (state.size() + 1 != width_)
            throw ShapeError("closed-loop inverse controller got a state of length " +
                             std::to_string(state.size()));
        return concat(r_next, state);
    }
    return concat(r_next, history_.vector());
}

double InverseController::act(double r_next, const Eigen::VectorXd& state) {
    const double u = net_(input(r_next, state))[0];
    if (mode_ == InverseMode::open_loop) history_.push(r_next);
    return u;
}

double PidController::act(double r_next, const Eigen::VectorXd& state) {
    if (state.size() == 0) throw ShapeError("PID controller needs y(k) as the first state entry");
    const auto out = pid_step(gains_, state_, r_next - state[0]);
    state_ = out.state;
    return out.u;
}

void ForwardEmulator::require_ready(const char* who) const {
    if (!ready())
        throw NotReadyError(std::string(who) + ": forward emulator not ready (held-out MSE " +
                            std::to_string(validation_mse) + ", threshold " + std::to_string(threshold) + ")");
}

ForwardEmulator ForwardEmulator::trusted(Mlpd net) {
    ForwardEmulator emu;
    emu.net = std::move(net);
    emu.validation_mse = 0.0;
    return emu;
}

ForwardEmulator train_forward_emulator(Mlpd net, const Plant& plant, const NarxEstimator& layout,
                                       const ExcitationSpec& train, const ExcitationSpec& validation,
                                       const EmulatorTraining& opts, double threshold) {
    auto train_plant = plant.clone();
    train_plant->reset();
    NarxEstimator est(layout.output_order(), layout.control_order());
    const TrainingSet train_set = collect_forward(*train_plant, train, est);
    train_supervised(net, train_set, opts.epochs, opts.rate, opts.seed);

    auto check_plant = plant.clone();
    check_plant->reset();
    NarxEstimator check_est(layout.output_order(), layout.control_order());
    const TrainingSet held_out = collect_forward(*check_plant, validation, check_est);

    ForwardEmulator emu;
    emu.validation_mse = mean_squared_error(net, held_out);
    emu.net = std::move(net);
    emu.threshold = threshold;
    return emu;
}

OnlineStep specialized_step(Mlpd& net, Plant& plant, NarxEstimator& est, double r_next, double rate,
                            JacobianMode mode, double disturbance) {
    const Eigen::VectorXd s = est.state();
    const auto fwd = forward(net, concat(r_next, s));
    OnlineStep out;
    out.u = fwd.output[0];
    double jac = plant.jacobian_du(out.u);
    if (mode == JacobianMode::sign_only) jac = jac > 0.0 ? 1.0 : (jac < 0.0 ? -1.0 : 0.0);
    out.y = plant.step(out.u, disturbance);
    est.observe(out.y);
    est.observe_u(out.u);
    out.e = r_next - out.y;
    if (jac == 0.0) {
        out.update_skipped = true;
        out.gradients = zero_gradients(net);
        return out;
    }
    out.dL_du = -out.e * jac;
    out.gradients = backward_weights(net, fwd.cache, scalar(out.dL_du));
    sgd_step(net, out.gradients, rate);
    return out;
}

OnlineStep bpte_train_step(Mlpd& ctl, const ForwardEmulator& emu, Plant& plant, NarxEstimator& est,
                           double r_next, double rate, double disturbance) {
    emu.require_ready("bpte_train_step");
    const Eigen::VectorXd s = est.state();
    const auto fwd = forward(ctl, concat(r_next, s));
    OnlineStep out;
    out.u = fwd.output[0];
    const auto predicted = forward(emu.net, concat(out.u, s));
    out.y = plant.step(out.u, disturbance);
    est.observe(out.y);
    est.observe_u(out.u);
    out.e = r_next - out.y;
    out.emulator_error = predicted.output[0] - out.y;
    // The emulator output stands in for y(k+1); 0.5 e^2 has gradient -e there.
    out.dL_du = backward_inputs(emu.net, predicted.cache, scalar(-out.e))[0];
    out.gradients = backward_weights(ctl, fwd.cache, scalar(out.dL_du));
    sgd_step(ctl, out.gradients, rate);
    return out;
}

}  // namespace ncb
