#include "ncb/schemes/hybrid.hpp"

#include <cmath>
#include <string>

#include "ncb/error.hpp"

namespace ncb {

Region::Region(Eigen::VectorXd c, Eigen::VectorXd h) : center(std::move(c)), half_width(std::move(h)) {
    if (center.size() != half_width.size()) throw ShapeError("region center and half-width differ in length");
    if ((half_width.array() <= 0.0).any()) throw ConfigError("region half-widths must be positive");
}

bool region_contains(const Region& region, const Eigen::VectorXd& s) {
    if (s.size() != region.center.size())
        throw ShapeError("region has dimension " + std::to_string(region.center.size()) + ", state has " +
                         std::to_string(s.size()));
    return ((s - region.center).cwiseAbs().array() < region.half_width.array()).all();
}

double hybrid_step(HybridMode mode, double u_pid, double u_nn, const Region* region, const Eigen::VectorXd& s) {
    if (mode != HybridMode::region_switch) return u_pid + u_nn;
    if (region == nullptr) throw ConfigError("region-switch hybrid control needs a region");
    return region_contains(*region, s) ? u_nn : u_pid;
}

HybridController::HybridController(HybridMode mode, PidGains gains, std::unique_ptr<Controller> nn,
                                   std::optional<Region> region)
    : mode_(mode), pid_(gains), nn_(std::move(nn)), region_(std::move(region)) {
    if (!nn_) throw ConfigError("hybrid control needs a network controller");
    if (mode_ == HybridMode::region_switch && !region_) throw ConfigError("region-switch hybrid control needs a region");
}

double HybridController::act(double r_next, const Eigen::VectorXd& state) {
    last_pid_ = pid_.act(r_next, state);
    last_nn_ = nn_->act(r_next, state);
    return hybrid_step(mode_, last_pid_, last_nn_, region_ ? &*region_ : nullptr, state);
}

void HybridController::reset() {
    pid_.reset();
    nn_->reset();
}

Eigen::VectorXd NeuroPidAssembly::input(double r_next, const Eigen::VectorXd& s) const {
    return state_input ? concat(r_next, s) : Eigen::VectorXd::Constant(1, r_next);
}

NeuroPidTick neuro_pid_step(NeuroPidAssembly& assembly, Plant& plant, NarxEstimator& est, double r_next,
                            JacobianMode mode, double disturbance, long tick) {
    if (assembly.net.output_dim() != 3) throw ShapeError("neuro-PID network must emit three gains");
    const Eigen::VectorXd s = est.state();
    const auto fwd = forward(assembly.net, assembly.input(r_next, s));
    NeuroPidTick out;
    out.gains = PidGains::from(fwd.output.head<3>());

    const double e_feedback = r_next - s[0];
    if (!std::isfinite(e_feedback)) throw DivergenceError("non-finite feedback error", tick);
    out.du_dk = du_dK(e_feedback, assembly.pid_state.e_prev, assembly.pid_state.e_prev2);
    const auto pid = pid_step(out.gains, assembly.pid_state, e_feedback);
    out.u = pid.u;

    double jac = plant.jacobian_du(out.u);
    if (mode == JacobianMode::sign_only) jac = jac > 0.0 ? 1.0 : (jac < 0.0 ? -1.0 : 0.0);
    out.y = plant.step(out.u, disturbance);
    if (!std::isfinite(out.u) || !std::isfinite(out.y)) throw DivergenceError("neuro-PID loop diverged", tick);
    est.observe(out.y);
    est.observe_u(out.u);
    assembly.pid_state = pid.state;
    out.e = r_next - out.y;

    const Eigen::VectorXd dL_dK = (-out.e * jac) * out.du_dk;
    sgd_step(assembly.net, backward_weights(assembly.net, fwd.cache, dL_dK), assembly.rate);
    if (!std::isfinite(max_abs_parameter(assembly.net))) throw DivergenceError("neuro-PID network diverged", tick);
    return out;
}

FilterTick filter_step(FilterAssembly& assembly, double u_ctl, Plant& plant, NarxEstimator& est, double disturbance) {
    assembly.forward.require_ready("filter_step");
    const Eigen::VectorXd s = est.state();
    if (assembly.inverse.depth() == 0 || assembly.inverse.input_dim() != s.size() + 1)
        throw NotReadyError("filter_step: inverse emulator missing or shaped for a different state");

    FilterTick out;
    out.u_fin = u_ctl + assembly.u_corr;
    out.y_hat = assembly.forward.predict(out.u_fin, s);
    out.y = plant.step(out.u_fin, disturbance);
    est.observe(out.y);
    est.observe_u(out.u_fin);
    out.e_dist = out.y - out.y_hat;

    const double shifted = assembly.inverse(concat(-out.e_dist, s))[0];
    const double nominal = assembly.inverse(concat(0.0, s))[0];
    out.u_corr_next = shifted - nominal;
    assembly.u_corr = out.u_corr_next;
    return out;
}

ReferenceWrappedController::ReferenceWrappedController(ReferenceModel model, std::unique_ptr<Controller> inner)
    : model_(model), initial_(model.current()), inner_(std::move(inner)) {
    if (!inner_) throw ConfigError("reference wrapping needs an inner controller");
}

double ReferenceWrappedController::act(double r_next, const Eigen::VectorXd& state) {
    return inner_->act(reference_step(model_, r_next), state);
}

void ReferenceWrappedController::reset() {
    model_.reset(initial_);
    inner_->reset();
}

std::unique_ptr<ReferenceWrappedController> wrap_with_reference(ReferenceModel model,
                                                                 std::unique_ptr<Controller> inner) {
    return std::make_unique<ReferenceWrappedController>(model, std::move(inner));
}

}  // namespace ncb
