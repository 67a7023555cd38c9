#pragma once

// Networks working alongside conventional control: PID gain scheduling by a
// network, parallel PID + network wiring, disturbance filtering with a pair of
// emulators, and reference-model shaping of the setpoint.

#include <Eigen/Dense>

#include <memory>
#include <optional>

#include "ncb/control/pid.hpp"
#include "ncb/control/reference_model.hpp"
#include "ncb/nn/mlp.hpp"
#include "ncb/plant/narx.hpp"
#include "ncb/plant/plant.hpp"
#include "ncb/schemes/controller.hpp"
#include "ncb/schemes/inverse.hpp"

namespace ncb {

// Open axis-aligned box (center - half_width, center + half_width).
struct Region {
    Eigen::VectorXd center;
    Eigen::VectorXd half_width;

    Region(Eigen::VectorXd c, Eigen::VectorXd h);
};

bool region_contains(const Region& region, const Eigen::VectorXd& s);

enum class HybridMode {
    sum_after_nn_trained_on_closed_loop,   // PID first, network trained on the PID-closed loop
    sum_after_pid_tuned_on_closed_loop,    // network first, PID tuned on the network-closed loop
    region_switch,                         // network inside the region, PID outside
};

double hybrid_step(HybridMode mode, double u_pid, double u_nn, const Region* region, const Eigen::VectorXd& s);

// Runs a PID and a network controller side by side on the same setpoint. Both
// are queried every tick so the PID history stays current in switch mode.
class HybridController final : public Controller {
public:
    HybridController(HybridMode mode, PidGains gains, std::unique_ptr<Controller> nn,
                     std::optional<Region> region = std::nullopt);

    double act(double r_next, const Eigen::VectorXd& state) override;
    void reset() override;

    double last_pid() const { return last_pid_; }
    double last_nn() const { return last_nn_; }

private:
    HybridMode mode_;
    PidController pid_;
    std::unique_ptr<Controller> nn_;
    std::optional<Region> region_;
    double last_pid_ = 0.0;
    double last_nn_ = 0.0;
};

struct NeuroPidAssembly {
    Mlpd net;  // [r(k+1)] or [r(k+1), S(k)] -> [K1, K2, K3]
    PidState pid_state;
    double rate = 0.01;
    bool state_input = true;

    Eigen::VectorXd input(double r_next, const Eigen::VectorXd& s) const;
};

struct NeuroPidTick {
    PidGains gains;
    double u = 0.0;
    double y = 0.0;
    double e = 0.0;  // r(k+1) - y(k+1)
    Eigen::Vector3d du_dk = Eigen::Vector3d::Zero();
};

// The network proposes gains, the PID law acts on e = r(k+1) - y(k), the
// plant steps, and the network descends 0.5 e^2 along
// e * dy/du * du/dK * dK/dw.
NeuroPidTick neuro_pid_step(NeuroPidAssembly& assembly, Plant& plant, NarxEstimator& est, double r_next,
                            JacobianMode mode, double disturbance = 0.0, long tick = 0);

struct FilterAssembly {
    ForwardEmulator forward;
    Mlpd inverse;  // same input layout as the generalized inverse: [y_target, S]
    double u_corr = 0.0;
};

struct FilterTick {
    double u_fin = 0.0;
    double y = 0.0;
    double y_hat = 0.0;
    double e_dist = 0.0;  // y - y_hat
    double u_corr_next = 0.0;
};

// Applies u_ctl plus the correction carried from the previous tick, compares
// the plant with the forward emulator under the same input, and asks the
// inverse emulator for the control shift that cancels the deviation:
//   u_corr(k+1) = inv([-e_dist, S]) - inv([0, S]).
FilterTick filter_step(FilterAssembly& assembly, double u_ctl, Plant& plant, NarxEstimator& est,
                       double disturbance = 0.0);

// Feeds the inner controller the reference-model output instead of the raw setpoint.
class ReferenceWrappedController final : public Controller {
public:
    ReferenceWrappedController(ReferenceModel model, std::unique_ptr<Controller> inner);

    double act(double r_next, const Eigen::VectorXd& state) override;
    void reset() override;

    double last_reference() const { return model_.current(); }
    Controller& inner() { return *inner_; }

private:
    ReferenceModel model_;
    double initial_;
    std::unique_ptr<Controller> inner_;
};

std::unique_ptr<ReferenceWrappedController> wrap_with_reference(ReferenceModel model,
                                                                 std::unique_ptr<Controller> inner);

}  // namespace ncb
