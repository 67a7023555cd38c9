#include "ncb/harness/runner.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <random>

#include "ncb/control/reference_model.hpp"
#include "ncb/error.hpp"
#include "ncb/schemes/critic.hpp"
#include "ncb/schemes/hybrid.hpp"
#include "ncb/schemes/inverse.hpp"
#include "ncb/schemes/modular.hpp"
#include "ncb/schemes/predictive.hpp"

namespace ncb {

namespace {

constexpr double kOutputLimit = 1e6;

std::unique_ptr<Plant> make_plant(const PlantConfig& p) {
    if (p.kind == "nonlinear1") return std::make_unique<NonlinearPlant>();
    return std::make_unique<LinearPlant>(p.a, p.b);
}

Mlpd make_net(Eigen::Index in, const std::vector<int>& hidden, int out, std::uint64_t seed, double scale) {
    std::vector<int> dims{int(in)};
    std::vector<Activation> acts;
    for (int h : hidden) {
        dims.push_back(h);
        acts.push_back(Activation::tanh);
    }
    dims.push_back(out);
    acts.push_back(Activation::linear);
    return Mlpd::random(dims, acts, seed, scale);
}

struct TickOut {
    double u = 0.0;
    double y = 0.0;
    std::vector<double> extra;
};

class Run {
public:
    Run(const ExperimentConfig& cfg, std::uint64_t seed) : cfg_(cfg), p_(cfg.params), seed_(seed) {
        const long horizon = cfg.ticks + std::max(p_.mpc.horizon, 1);
        std::optional<ReferenceModel> model;
        if (cfg.reference_tau) model.emplace(*cfg.reference_tau);
        for (long k = 1; k <= horizon; ++k) {
            const double r = setpoint_at(cfg, k);
            raw_.push_back(r);
            effective_.push_back(model ? model->step(r) : r);
        }
        std::mt19937_64 rng(derive_seed(seed, "disturbance"));
        std::uniform_real_distribution<double> noise(-1.0, 1.0);
        for (long k = 1; k <= cfg.ticks; ++k) {
            double d = 0.0;
            if (cfg.disturbance) {
                const double draw = noise(rng);
                if (k >= cfg.disturbance->start_tick)
                    d = cfg.disturbance->kind == DisturbanceKind::step ? cfg.disturbance->magnitude
                                                                       : cfg.disturbance->magnitude * draw;
            }
            disturbance_.push_back(d);
        }
        plant_ = make_plant(cfg.plant);
        est_ = NarxEstimator(p_.narx_order, p_.control_order);
        if (cfg.ticks > 0 && cfg.setpoint_schedule.empty())
            result_.warnings.push_back("setpoint schedule is empty; every target is 0");
    }

    RunResult execute() {
        result_.config = cfg_;
        result_.config.seed = seed_;
        result_.seed = seed_;
        try {
            if (cfg_.ticks > 0) dispatch();
        } catch (const DivergenceError& e) {
            result_.divergence_tick = e.tick();
            result_.divergence_message = e.what();
        }
        result_.log = std::move(log_);
        result_.report = compute_metrics(result_.log, result_.divergence_tick.has_value());
        return std::move(result_);
    }

private:
    std::uint64_t seed_for(const std::string& purpose) const { return derive_seed(seed_, purpose); }

    ExcitationSpec excitation_spec(const std::string& purpose, bool validation) const {
        const auto& t = p_.training;
        return {t.kind, t.amplitude, t.hold_ticks, seed_for(purpose + (validation ? "/validation" : "/train")),
                validation ? t.validation_samples : t.samples};
    }

    void artifact(const std::string& name, const Mlpd& net) { result_.artifacts[name] = hex_hash(parameter_hash(net)); }

    void begin_log(std::vector<std::string> extra) { log_ = EpisodeLog(std::move(extra), cfg_.reference_tau.has_value()); }

    void record(long k, const TickOut& t) {
        if (!std::isfinite(t.u) || !std::isfinite(t.y) || std::abs(t.y) > kOutputLimit)
            throw DivergenceError("plant output left the bounded range", k);
        EpisodeRow row;
        row.k = k;
        row.r = raw_[std::size_t(k - 1)];
        if (cfg_.reference_tau) row.r_prime = effective_[std::size_t(k - 1)];
        row.u = t.u;
        row.y = t.y;
        row.e = row.r - row.y;
        row.extra = t.extra;
        log_.add(std::move(row));
    }

    // Calls tick(k, target, disturbance) for every row and logs the result.
    void drive(const std::function<TickOut(long, double, double)>& tick) {
        for (long k = 1; k <= cfg_.ticks; ++k)
            record(k, tick(k, effective_[std::size_t(k - 1)], disturbance_[std::size_t(k - 1)]));
    }

    double apply(double u, double d) {
        const double y = plant_->step(u, d);
        est_.observe(y);
        est_.observe_u(u);
        return y;
    }

    // Inverse model [y(k+1), S(k)] -> u(k) from excitation of a fresh plant.
    Mlpd train_inverse(const PlantConfig& plant_cfg, const std::string& name, int output_order, int control_order) {
        auto plant = make_plant(plant_cfg);
        NarxEstimator layout(output_order, control_order);
        const auto set = collect_inverse(*plant, excitation_spec(name, false), layout);
        Mlpd net = make_net(set.input_width(), p_.hidden, 1, seed_for(name + "/init"), p_.init_scale);
        const auto curve = train_supervised(net, set, p_.training.epochs, p_.training.rate, seed_for(name + "/shuffle"));
        if (!curve.empty()) result_.training[name + ".final_mse"] = curve.back();

        auto val_plant = make_plant(plant_cfg);
        NarxEstimator val_layout(output_order, control_order);
        result_.training[name + ".validation_mse"] =
            mean_squared_error(net, collect_inverse(*val_plant, excitation_spec(name, true), val_layout));
        return net;
    }

    ForwardEmulator train_emulator(const PlantConfig& plant_cfg, const std::string& name) {
        auto plant = make_plant(plant_cfg);
        NarxEstimator layout(p_.narx_order, p_.control_order);
        ForwardEmulator emu = train_forward_emulator(
            make_net(layout.width() + 1, p_.hidden, 1, seed_for(name + "/init"), p_.init_scale), *plant, layout,
            excitation_spec(name, false), excitation_spec(name, true),
            {p_.training.epochs, p_.training.rate, seed_for(name + "/shuffle")}, p_.emulator_threshold);
        result_.training[name + ".validation_mse"] = emu.validation_mse;
        if (!emu.ready()) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "%s: held-out mse %.6g is not below the threshold %.6g", name.c_str(),
                          emu.validation_mse, emu.threshold);
            throw NotReadyError(std::string(buf) + "; raise training.epochs or training.samples");
        }
        return emu;
    }

    void dispatch() {
        switch (cfg_.scheme) {
            case SchemeKind::mimic: return mimic();
            case SchemeKind::generalized_inverse: return generalized();
            case SchemeKind::specialized_inverse: return specialized();
            case SchemeKind::bpte: return bpte();
            case SchemeKind::predictive: return predictive();
            case SchemeKind::hdp: return hdp();
            case SchemeKind::multimodule: return multimodule();
            case SchemeKind::neuro_pid: return neuro_pid();
            case SchemeKind::hybrid_parallel: return hybrid();
            case SchemeKind::disturbance_filter: return filter();
        }
    }

    void mimic() {
        auto teacher_plant = make_plant(cfg_.plant);
        NarxEstimator teacher_est(p_.narx_order, p_.control_order);
        const std::span<const double> targets(effective_.data(), std::size_t(cfg_.ticks));
        const auto set = collect_mimic(*teacher_plant, p_.pid, targets, teacher_est);
        Mlpd net = make_net(set.input_width(), p_.hidden, 1, seed_for("controller/init"), p_.init_scale);
        const auto curve = train_supervised(net, set, p_.training.epochs, p_.training.rate, seed_for("controller/shuffle"));
        if (!curve.empty()) result_.training["controller.final_mse"] = curve.back();
        artifact("controller", net);

        auto ctl = InverseController::closed_loop(std::move(net), est_.width());
        PidController shadow(p_.pid);
        begin_log({"u_pid"});
        drive([&](long, double r, double d) {
            const Eigen::VectorXd s = est_.state();
            const double u_pid = shadow.act(r, s);
            const double u = ctl.act(r, s);
            return TickOut{u, apply(u, d), {u_pid}};
        });
    }

    void generalized() {
        const bool open = p_.inverse_mode == InverseMode::open_loop;
        Mlpd net = open ? train_inverse(cfg_.plant, "controller", p_.narx_order - 1, 0)
                        : train_inverse(cfg_.plant, "controller", p_.narx_order, p_.control_order);
        artifact("controller", net);
        auto ctl = open ? InverseController::open_loop(std::move(net), p_.narx_order)
                        : InverseController::closed_loop(std::move(net), est_.width());
        begin_log({});
        drive([&](long, double r, double d) {
            const double u = ctl.act(r, est_.state());
            return TickOut{u, apply(u, d), {}};
        });
    }

    void specialized() {
        Mlpd net = make_net(est_.width() + 1, p_.hidden, 1, seed_for("controller/init"), p_.init_scale);
        begin_log({"dL_du"});
        try {
            drive([&](long, double r, double d) {
                const auto step = specialized_step(net, *plant_, est_, r, p_.online_rate, p_.jacobian, d);
                return TickOut{step.u, step.y, {step.dL_du}};
            });
        } catch (...) {
            artifact("controller", net);
            throw;
        }
        artifact("controller", net);
    }

    void bpte() {
        const ForwardEmulator emu = train_emulator(cfg_.plant, "emulator");
        artifact("emulator", emu.net);
        Mlpd net = make_net(est_.width() + 1, p_.hidden, 1, seed_for("controller/init"), p_.init_scale);
        begin_log({"y_hat", "emulator_error"});
        try {
            drive([&](long, double r, double d) {
                const auto step = bpte_train_step(net, emu, *plant_, est_, r, p_.online_rate, d);
                return TickOut{step.u, step.y, {step.y + step.emulator_error, step.emulator_error}};
            });
        } catch (...) {
            artifact("controller", net);
            throw;
        }
        artifact("controller", net);
    }

    void predictive() {
        const ForwardEmulator emu = train_emulator(cfg_.plant, "emulator");
        artifact("emulator", emu.net);
        const auto L = std::size_t(p_.mpc.horizon);
        double u_prev = 0.0;
        begin_log({"Q_mpc", "y_hat"});
        drive([&](long k, double, double d) {
            const std::span<const double> traj(effective_.data() + (k - 1), L);
            const Eigen::VectorXd s = est_.state();
            const auto plan = mpc_plan(emu, est_, s, traj, u_prev, p_.mpc);
            u_prev = plan.u_apply;
            const double y_hat = emu.predict(plan.u_apply, s);
            return TickOut{plan.u_apply, apply(plan.u_apply, d), {plan.cost, y_hat}};
        });
    }

    void hdp() {
        Mlpd actor = make_net(est_.width() + 1, p_.hidden, 1, seed_for("actor/init"), p_.init_scale);
        CriticNet critic;
        critic.net = make_net(est_.width() + 2, p_.critic_hidden, 1, seed_for("critic/init"), p_.init_scale);
        critic.gamma = p_.gamma;
        critic.rate_critic = p_.rate_critic;
        critic.rate_actor = p_.rate_actor;
        begin_log({"J_hat", "delta"});
        EpisodeLog inner;
        try {
            inner = hdp_episode(actor, critic, *plant_, est_, std::span<const double>(effective_.data(), std::size_t(cfg_.ticks)),
                                cfg_.ticks, {p_.exploration, seed_for("exploration")}, disturbance_);
        } catch (...) {
            artifact("actor", actor);
            artifact("critic", critic.net);
            throw;
        }
        artifact("actor", actor);
        artifact("critic", critic.net);
        for (const auto& row : inner.rows()) record(row.k, {row.u, row.y, row.extra});
    }

    void multimodule() {
        std::vector<ModuleConfig> configs = p_.modules;
        if (configs.empty()) configs = {{"linear1", {"linear1", 0.5, 1.0}}, {"nonlinear1", {"nonlinear1", 0.5, 1.0}}};
        std::vector<PairedModule> modules;
        std::vector<std::string> columns;
        for (const auto& mc : configs) {
            const std::string base = "module/" + mc.id;
            PairedModule m;
            m.id = mc.id;
            m.forward = train_emulator(mc.plant, base + "/forward");
            m.inverse = train_inverse(mc.plant, base + "/inverse", p_.narx_order, p_.control_order);
            artifact(base + "/forward", m.forward.net);
            artifact(base + "/inverse", m.inverse);
            modules.push_back(std::move(m));
            columns.push_back("lambda_" + mc.id);
        }
        MultiModuleMemory memory;
        begin_log(columns);
        drive([&](long, double r, double d) {
            const auto t = multimodule_step(modules, memory, r, est_, *plant_, p_.sigma, p_.blend, d);
            return TickOut{t.u, t.y, std::vector<double>(t.weights.lambda.begin(), t.weights.lambda.end())};
        });
    }

    NeuroPidAssembly neuro_pid_assembly() {
        const Eigen::Index in = p_.neuro_pid_state_input ? est_.width() + 1 : 1;
        NeuroPidAssembly a{make_net(in, p_.hidden, 3, seed_for("gain_net/init"), p_.init_scale), {}, p_.online_rate,
                           p_.neuro_pid_state_input};
        // Start from the configured PID so tuning refines a working loop.
        a.net.layers().back().bias = p_.pid.vector();
        return a;
    }

    void neuro_pid() {
        NeuroPidAssembly a = neuro_pid_assembly();
        begin_log({"K1", "K2", "K3"});
        try {
            drive([&](long k, double r, double d) {
                const auto t = neuro_pid_step(a, *plant_, est_, r, p_.jacobian, d, k);
                return TickOut{t.u, t.y, {t.gains.proportional, t.gains.integral, t.gains.derivative}};
            });
        } catch (...) {
            artifact("gain_net", a.net);
            throw;
        }
        artifact("gain_net", a.net);
    }

    double jacobian(const Plant& plant, double u) const {
        const double j = plant.jacobian_du(u);
        if (p_.jacobian == JacobianMode::sign_only) return j > 0.0 ? 1.0 : (j < 0.0 ? -1.0 : 0.0);
        return j;
    }

    // PID plus an online-trained network; the network sees du/du_nn = 1.
    struct PidPlusLearningNet {
        Mlpd net;
        PidController pid;
    };

    TickOut pid_plus_learning_net(PidPlusLearningNet& h, Plant& plant, NarxEstimator& est, double r, double d) {
        const Eigen::VectorXd s = est.state();
        const double u_pid = h.pid.act(r, s);
        const auto fwd = forward(h.net, concat(r, s));
        const double u_nn = fwd.output[0];
        const double u = u_pid + u_nn;
        const double jac = jacobian(plant, u);
        const double y = plant.step(u, d);
        est.observe(y);
        est.observe_u(u);
        const double e = r - y;
        sgd_step(h.net, backward_weights(h.net, fwd.cache, Eigen::VectorXd::Constant(1, -e * jac)), p_.online_rate);
        return {u, y, {u_pid, u_nn}};
    }

    // Fixed network plus a PID whose gains descend 0.5 e^2 online.
    struct NetPlusTunedPid {
        InverseController net;
        PidGains gains;
        PidState state;
    };

    TickOut net_plus_tuned_pid(NetPlusTunedPid& h, Plant& plant, NarxEstimator& est, double r, double d) {
        const Eigen::VectorXd s = est.state();
        const double e_fb = r - s[0];
        const Eigen::Vector3d grad_u = du_dK(e_fb, h.state.e_prev, h.state.e_prev2);
        const auto pid = pid_step(h.gains, h.state, e_fb);
        const double u_nn = h.net.act(r, s);
        const double u = pid.u + u_nn;
        const double jac = jacobian(plant, u);
        const double y = plant.step(u, d);
        est.observe(y);
        est.observe_u(u);
        h.state = pid.state;
        const double e = r - y;
        h.gains = PidGains::from(h.gains.vector() + p_.online_rate * e * jac * grad_u);
        return {u, y, {pid.u, u_nn, h.gains.proportional, h.gains.integral, h.gains.derivative}};
    }

    // Closed-loop practice on a separate plant before the logged run.
    template <class Tick>
    void pretrain(Tick&& tick) {
        if (p_.pretrain_ticks == 0) return;
        auto plant = make_plant(cfg_.plant);
        NarxEstimator est(p_.narx_order, p_.control_order);
        for (long i = 0; i < p_.pretrain_ticks; ++i) {
            const auto t = tick(*plant, est, effective_[std::size_t(i % cfg_.ticks)]);
            if (!std::isfinite(t.y) || std::abs(t.y) > kOutputLimit)
                throw DivergenceError("closed-loop pretraining diverged at practice tick " + std::to_string(i + 1), 0);
        }
    }

    void hybrid() {
        switch (p_.hybrid_mode) {
            case HybridMode::sum_after_nn_trained_on_closed_loop: {
                PidPlusLearningNet h{make_net(est_.width() + 1, p_.hidden, 1, seed_for("controller/init"), p_.init_scale),
                                     PidController(p_.pid)};
                pretrain([&](Plant& plant, NarxEstimator& est, double r) {
                    return pid_plus_learning_net(h, plant, est, r, 0.0);
                });
                h.pid.reset();
                begin_log({"u_pid", "u_nn"});
                drive([&](long, double r, double d) { return pid_plus_learning_net(h, *plant_, est_, r, d); });
                artifact("controller", h.net);
                return;
            }
            case HybridMode::sum_after_pid_tuned_on_closed_loop: {
                Mlpd net = train_inverse(cfg_.plant, "controller", p_.narx_order, p_.control_order);
                artifact("controller", net);
                NetPlusTunedPid h{InverseController::closed_loop(std::move(net), est_.width()), p_.pid, {}};
                pretrain([&](Plant& plant, NarxEstimator& est, double r) {
                    return net_plus_tuned_pid(h, plant, est, r, 0.0);
                });
                h.state = {};
                begin_log({"u_pid", "u_nn", "K1", "K2", "K3"});
                drive([&](long, double r, double d) { return net_plus_tuned_pid(h, *plant_, est_, r, d); });
                return;
            }
            case HybridMode::region_switch: {
                const Eigen::Index w = est_.width();
                Region region(Eigen::VectorXd::Zero(w), Eigen::VectorXd::Ones(w));
                if (p_.region) {
                    if (Eigen::Index(p_.region->center.size()) != w || Eigen::Index(p_.region->half_width.size()) != w)
                        throw ConfigError("scheme_params.region: center and half_width need " + std::to_string(w) +
                                          " entries to match the NARX state");
                    region = Region(Eigen::Map<const Eigen::VectorXd>(p_.region->center.data(), w),
                                    Eigen::Map<const Eigen::VectorXd>(p_.region->half_width.data(), w));
                }
                Mlpd net = train_inverse(cfg_.plant, "controller", p_.narx_order, p_.control_order);
                artifact("controller", net);
                HybridController ctl(HybridMode::region_switch, p_.pid,
                                     std::make_unique<InverseController>(InverseController::closed_loop(std::move(net), w)),
                                     region);
                begin_log({"u_pid", "u_nn"});
                drive([&](long, double r, double d) {
                    const double u = ctl.act(r, est_.state());
                    return TickOut{u, apply(u, d), {ctl.last_pid(), ctl.last_nn()}};
                });
                return;
            }
        }
    }

    void filter() {
        Mlpd inverse = train_inverse(cfg_.plant, "controller", p_.narx_order, p_.control_order);
        const ForwardEmulator emu = train_emulator(cfg_.plant, "emulator");
        artifact("controller", inverse);
        artifact("emulator", emu.net);
        FilterAssembly assembly{emu, inverse};
        auto ctl = InverseController::closed_loop(std::move(inverse), est_.width());
        begin_log({"y_hat", "e_dist", "u_corr"});
        drive([&](long, double r, double d) {
            const double u_ctl = ctl.act(r, est_.state());
            const auto t = filter_step(assembly, u_ctl, *plant_, est_, d);
            return TickOut{t.u_fin, t.y, {t.y_hat, t.e_dist, t.u_fin - u_ctl}};
        });
    }

    const ExperimentConfig& cfg_;
    const SchemeParams& p_;
    std::uint64_t seed_;
    std::vector<double> raw_, effective_, disturbance_;
    std::unique_ptr<Plant> plant_;
    NarxEstimator est_;
    EpisodeLog log_;
    RunResult result_;
};

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, const std::string& purpose) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : purpose) {
        h ^= c;
        h *= 1099511628211ull;
    }
    // splitmix64 finaliser
    std::uint64_t z = base ^ h;
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

std::string hex_hash(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

RunResult run_episode(const ExperimentConfig& cfg, std::uint64_t seed) { return Run(cfg, seed).execute(); }

}  // namespace ncb
