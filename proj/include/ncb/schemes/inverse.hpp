#pragma once

// Supervised and online inverse-model schemes: mimicking a conventional
// controller, generalized (offline) inverse training, specialized (online)
// inverse training through the plant Jacobian, and training through a frozen
// forward emulator.

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <span>

#include "ncb/control/pid.hpp"
#include "ncb/nn/mlp.hpp"
#include "ncb/nn/tapped_delay_line.hpp"
#include "ncb/plant/excitation.hpp"
#include "ncb/plant/narx.hpp"
#include "ncb/plant/plant.hpp"
#include "ncb/schemes/controller.hpp"
#include "ncb/schemes/training_set.hpp"

namespace ncb {

// Runs the PID on the setpoint sequence (setpoints[i] is the target for the
// tick after i) and records P_i = [r(i+1), S(i)], T_i = u(i).
TrainingSet collect_mimic(Plant& plant, const PidGains& gains, std::span<const double> setpoints,
                          NarxEstimator& est);

// Drives the plant with the excitation and records effect-and-prior-state
// against cause: P_i = [y(i), S(i-1)], T_i = u that produced y(i).
TrainingSet collect_inverse(Plant& plant, const ExcitationSpec& exc, NarxEstimator& est);

// One-step predictor data: P_i = [u, S(i-1)], T_i = y(i).
TrainingSet collect_forward(Plant& plant, const ExcitationSpec& exc, NarxEstimator& est);

enum class InverseMode { closed_loop, open_loop };

// Inverse controller fed either [r(k+1), S(k)] (closed loop) or the setpoint
// history [r(k+1), r(k), ..., r(k-N+1)] (open loop).
class InverseController final : public Controller {
public:
    static InverseController closed_loop(Mlpd net, Eigen::Index state_width);
    static InverseController open_loop(Mlpd net, int order);

    Eigen::VectorXd input(double r_next, const Eigen::VectorXd& state) const;

    // Open loop ignores `state` and shifts r_next into its setpoint history.
    double act(double r_next, const Eigen::VectorXd& state) override;
    void reset() override { history_.clear(); }

    InverseMode mode() const { return mode_; }
    const Mlpd& net() const { return net_; }
    Mlpd& net() { return net_; }

private:
    InverseController(Mlpd net, InverseMode mode, Eigen::Index width);

    Mlpd net_;
    InverseMode mode_;
    Eigen::Index width_;
    TappedDelayLined history_;
};

// Conventional PID on e = r(k+1) - y(k), where y(k) is the first state entry.
class PidController final : public Controller {
public:
    explicit PidController(PidGains gains) : gains_(gains) {}

    double act(double r_next, const Eigen::VectorXd& state) override;
    void reset() override { state_ = {}; }

    const PidGains& gains() const { return gains_; }
    void set_gains(const PidGains& g) { gains_ = g; }
    const PidState& state() const { return state_; }

private:
    PidGains gains_;
    PidState state_;
};

// Learned one-step predictor [u(k), S(k)] -> y(k+1), gated by its held-out error.
struct ForwardEmulator {
    Mlpd net;
    double validation_mse = std::numeric_limits<double>::infinity();
    double threshold = 1e-3;

    bool ready() const { return net.depth() > 0 && validation_mse < threshold; }
    void require_ready(const char* who) const;

    double predict(double u, const Eigen::VectorXd& state) const { return net(concat(u, state))[0]; }

    // An emulator known to be exact by construction skips validation.
    static ForwardEmulator trusted(Mlpd net);
};

struct EmulatorTraining {
    int epochs = 60;
    double rate = 0.02;
    std::uint64_t seed = 0;
};

// Fits `net` on excitation data from a clone of `plant`, then validates on a
// second excitation run. The returned emulator carries the held-out MSE.
ForwardEmulator train_forward_emulator(Mlpd net, const Plant& plant, const NarxEstimator& layout,
                                       const ExcitationSpec& train, const ExcitationSpec& validation,
                                       const EmulatorTraining& opts, double threshold = 1e-3);

enum class JacobianMode { analytic, sign_only };

struct OnlineStep {
    double u = 0.0;
    double y = 0.0;
    double e = 0.0;              // r(k+1) - y(k+1)
    double dL_du = 0.0;          // gradient of 0.5 e^2 w.r.t. the control
    double emulator_error = 0.0; // y_hat(k+1) - y(k+1), emulator-based steps only
    bool update_skipped = false; // analytic Jacobian was exactly zero
    Gradientsd gradients;        // controller parameter gradients applied this tick
};

// Acts on [r(k+1), S(k)], steps the plant, then descends 0.5 e^2 through the
// plant Jacobian (or its sign) and the controller.
OnlineStep specialized_step(Mlpd& net, Plant& plant, NarxEstimator& est, double r_next, double rate,
                            JacobianMode mode, double disturbance = 0.0);

// As specialized_step, but dL/du comes from backpropagating the tracking error
// through the frozen emulator's inputs. Only the controller changes.
OnlineStep bpte_train_step(Mlpd& ctl, const ForwardEmulator& emu, Plant& plant, NarxEstimator& est,
                           double r_next, double rate, double disturbance = 0.0);

}  // namespace ncb
