#include "ncb/harness/config.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "ncb/error.hpp"

namespace ncb {

using nlohmann::json;

namespace {

constexpr std::array<SchemeInfo, 10> kCatalog{{
    {SchemeKind::mimic, "mimic", "network trained to reproduce a PID controller's actions, then put in its place"},
    {SchemeKind::generalized_inverse, "generalized_inverse",
     "inverse plant model learned offline from excitation data, used as the controller"},
    {SchemeKind::specialized_inverse, "specialized_inverse",
     "controller trained online on the tracking error through the plant Jacobian"},
    {SchemeKind::bpte, "bpte", "controller trained online by backpropagating the error through a frozen forward emulator"},
    {SchemeKind::predictive, "predictive", "receding-horizon optimisation of future controls over a forward emulator"},
    {SchemeKind::hdp, "hdp", "adaptive critic: critic learns discounted squared error, actor descends the critic"},
    {SchemeKind::multimodule, "multimodule", "paired forward/inverse modules blended by prediction-error responsibilities"},
    {SchemeKind::neuro_pid, "neuro_pid", "network that schedules PID gains online"},
    {SchemeKind::hybrid_parallel, "hybrid_parallel", "PID and network controller in parallel or switched by region"},
    {SchemeKind::disturbance_filter, "disturbance_filter",
     "inverse controller plus a forward/inverse emulator pair cancelling disturbances"},
}};

template <class E>
struct EnumName {
    E value;
    const char* name;
};

constexpr std::array<EnumName<JacobianMode>, 2> kJacobian{{{JacobianMode::analytic, "analytic"},
                                                           {JacobianMode::sign_only, "sign_only"}}};
constexpr std::array<EnumName<InverseMode>, 2> kInverse{{{InverseMode::closed_loop, "closed_loop"},
                                                         {InverseMode::open_loop, "open_loop"}}};
constexpr std::array<EnumName<BlendMode>, 2> kBlend{{{BlendMode::weighted, "weighted"},
                                                     {BlendMode::winner_take_all, "winner_take_all"}}};
constexpr std::array<EnumName<HybridMode>, 3> kHybrid{{
    {HybridMode::sum_after_nn_trained_on_closed_loop, "sum_after_nn_trained_on_closed_loop"},
    {HybridMode::sum_after_pid_tuned_on_closed_loop, "sum_after_pid_tuned_on_closed_loop"},
    {HybridMode::region_switch, "region_switch"},
}};
constexpr std::array<EnumName<ExcitationKind>, 2> kExcitation{{{ExcitationKind::uniform_white, "uniform_white"},
                                                               {ExcitationKind::random_steps, "random_steps"}}};
constexpr std::array<EnumName<DisturbanceKind>, 2> kDisturbance{{{DisturbanceKind::step, "step"},
                                                                 {DisturbanceKind::uniform_noise, "uniform_noise"}}};

template <class E, std::size_t N>
const char* name_of(const std::array<EnumName<E>, N>& table, E v) {
    for (const auto& e : table)
        if (e.value == v) return e.name;
    return "?";
}

template <class E, std::size_t N>
E value_of(const std::array<EnumName<E>, N>& table, const std::string& s, const std::string& path) {
    for (const auto& e : table)
        if (s == e.name) return e.value;
    std::string allowed;
    for (const auto& e : table) allowed += std::string(allowed.empty() ? "" : ", ") + e.name;
    throw ConfigError(path + ": unknown value '" + s + "' (expected one of " + allowed + ")");
}

// Reads one JSON object, remembering which keys were consumed so that
// leftovers can be rejected.
class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(where() + ": expected an object");
    }

    bool has(const char* key) const { return j_.contains(key); }

    const json& raw(const char* key) {
        used_.insert(key);
        return j_.at(key);
    }

    std::string sub(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

    void read(const char* key, double& out) {
        if (!has(key)) return;
        const auto& v = raw(key);
        if (!v.is_number()) throw ConfigError(sub(key) + ": expected a number");
        out = v.get<double>();
    }

    void read(const char* key, int& out) {
        long wide = out;
        read(key, wide);
        if (wide < std::numeric_limits<int>::min() || wide > std::numeric_limits<int>::max())
            throw ConfigError(sub(key) + ": out of range");
        out = int(wide);
    }

    void read(const char* key, long& out) {
        if (!has(key)) return;
        const auto& v = raw(key);
        if (!v.is_number_integer()) throw ConfigError(sub(key) + ": expected an integer");
        out = v.get<long>();
    }

    void read(const char* key, bool& out) {
        if (!has(key)) return;
        const auto& v = raw(key);
        if (!v.is_boolean()) throw ConfigError(sub(key) + ": expected true or false");
        out = v.get<bool>();
    }

    void read(const char* key, std::string& out) {
        if (!has(key)) return;
        const auto& v = raw(key);
        if (!v.is_string()) throw ConfigError(sub(key) + ": expected a string");
        out = v.get<std::string>();
    }

    template <class T>
    void read(const char* key, std::vector<T>& out) {
        if (!has(key)) return;
        const auto& v = raw(key);
        if (!v.is_array()) throw ConfigError(sub(key) + ": expected an array");
        out.clear();
        for (const auto& item : v) {
            if constexpr (std::is_integral_v<T>) {
                if (!item.is_number_integer()) throw ConfigError(sub(key) + ": expected integers");
            } else {
                if (!item.is_number()) throw ConfigError(sub(key) + ": expected numbers");
            }
            out.push_back(item.get<T>());
        }
    }

    template <class E, std::size_t N>
    void read(const char* key, E& out, const std::array<EnumName<E>, N>& table) {
        std::string s;
        read(key, s);
        if (!s.empty()) out = value_of(table, s, sub(key));
    }

    void finish() const {
        for (const auto& [key, _] : j_.items())
            if (!used_.count(key)) throw ConfigError(where() + ": unknown key '" + key + "'");
    }

private:
    std::string where() const { return path_.empty() ? "config" : path_; }

    const json& j_;
    std::string path_;
    std::set<std::string> used_;
};

PlantConfig read_plant(const json& j, const std::string& path) {
    Reader r(j, path);
    PlantConfig p;
    r.read("kind", p.kind);
    r.read("a", p.a);
    r.read("b", p.b);
    r.finish();
    if (p.kind != "linear1" && p.kind != "nonlinear1")
        throw ConfigError(path + ".kind: unknown plant '" + p.kind + "' (expected linear1 or nonlinear1)");
    if (p.kind == "linear1" && p.b == 0.0) throw ConfigError(path + ".b: must be non-zero");
    return p;
}

TrainingConfig read_training(const json& j, const std::string& path) {
    Reader r(j, path);
    TrainingConfig t;
    r.read("samples", t.samples);
    r.read("validation_samples", t.validation_samples);
    r.read("epochs", t.epochs);
    r.read("rate", t.rate);
    r.read("amplitude", t.amplitude);
    r.read("hold_ticks", t.hold_ticks);
    r.read("kind", t.kind, kExcitation);
    r.finish();
    if (t.samples < 1 || t.validation_samples < 1) throw ConfigError(path + ": sample counts must be positive");
    if (t.epochs < 0 || t.rate < 0.0) throw ConfigError(path + ": epochs and rate must be non-negative");
    if (t.hold_ticks < 1) throw ConfigError(path + ".hold_ticks: must be positive");
    if (t.amplitude < 0.0) throw ConfigError(path + ".amplitude: must be non-negative");
    return t;
}

MpcConfig read_mpc(const json& j, const std::string& path) {
    Reader r(j, path);
    MpcConfig m;
    r.read("L1", m.first_error);
    r.read("L2", m.horizon);
    r.read("rho", m.move_weight);
    r.read("candidates", m.candidates_per_step);
    r.read("u_min", m.u_min);
    r.read("u_max", m.u_max);
    r.read("refine_iters", m.refine_iters);
    r.finish();
    try {
        m.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return m;
}

SchemeParams read_params(const json& j, const std::string& path) {
    Reader r(j, path);
    SchemeParams p;
    r.read("narx_order", p.narx_order);
    r.read("control_order", p.control_order);
    r.read("hidden", p.hidden);
    r.read("critic_hidden", p.critic_hidden);
    r.read("init_scale", p.init_scale);
    if (r.has("training")) p.training = read_training(r.raw("training"), r.sub("training"));
    r.read("online_rate", p.online_rate);
    r.read("jacobian", p.jacobian, kJacobian);
    if (r.has("pid")) {
        Reader g(r.raw("pid"), r.sub("pid"));
        g.read("k1", p.pid.proportional);
        g.read("k2", p.pid.integral);
        g.read("k3", p.pid.derivative);
        g.finish();
    }
    r.read("emulator_threshold", p.emulator_threshold);
    r.read("inverse_mode", p.inverse_mode, kInverse);
    if (r.has("mpc")) p.mpc = read_mpc(r.raw("mpc"), r.sub("mpc"));
    r.read("gamma", p.gamma);
    r.read("rate_critic", p.rate_critic);
    r.read("rate_actor", p.rate_actor);
    r.read("exploration", p.exploration);
    r.read("sigma", p.sigma);
    r.read("blend", p.blend, kBlend);
    if (r.has("modules")) {
        const auto& arr = r.raw("modules");
        if (!arr.is_array()) throw ConfigError(r.sub("modules") + ": expected an array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string at = r.sub("modules") + "[" + std::to_string(i) + "]";
            Reader m(arr[i], at);
            ModuleConfig mc;
            m.read("id", mc.id);
            if (!m.has("plant")) throw ConfigError(at + ": missing 'plant'");
            mc.plant = read_plant(m.raw("plant"), at + ".plant");
            m.finish();
            if (mc.id.empty()) mc.id = "m" + std::to_string(i);
            p.modules.push_back(mc);
        }
    }
    r.read("hybrid_mode", p.hybrid_mode, kHybrid);
    if (r.has("region")) {
        Reader g(r.raw("region"), r.sub("region"));
        RegionConfig rc;
        g.read("center", rc.center);
        g.read("half_width", rc.half_width);
        g.finish();
        p.region = rc;
    }
    r.read("pretrain_ticks", p.pretrain_ticks);
    r.read("neuro_pid_state_input", p.neuro_pid_state_input);
    r.finish();

    if (p.narx_order < 0 || p.control_order < 0) throw ConfigError(path + ": NARX orders must be non-negative");
    if (p.inverse_mode == InverseMode::open_loop && p.narx_order < 1)
        throw ConfigError(path + ".narx_order: open-loop inverse control needs an order of at least 1");
    for (int h : p.hidden)
        if (h < 1) throw ConfigError(path + ".hidden: layer widths must be positive");
    for (int h : p.critic_hidden)
        if (h < 1) throw ConfigError(path + ".critic_hidden: layer widths must be positive");
    if (!(p.gamma > 0.0 && p.gamma <= 1.0)) throw ConfigError(path + ".gamma: must lie in (0, 1]");
    if (!(p.sigma > 0.0)) throw ConfigError(path + ".sigma: must be positive");
    if (p.exploration < 0.0) throw ConfigError(path + ".exploration: must be non-negative");
    if (p.pretrain_ticks < 0) throw ConfigError(path + ".pretrain_ticks: must be non-negative");
    if (!(p.emulator_threshold > 0.0)) throw ConfigError(path + ".emulator_threshold: must be positive");
    return p;
}

json plant_json(const PlantConfig& p) {
    json j{{"kind", p.kind}};
    if (p.kind == "linear1") {
        j["a"] = p.a;
        j["b"] = p.b;
    }
    return j;
}

}  // namespace

std::span<const SchemeInfo> scheme_catalog() { return kCatalog; }

std::string to_string(SchemeKind kind) {
    for (const auto& s : kCatalog)
        if (s.kind == kind) return s.name;
    return "?";
}

SchemeKind scheme_from_string(const std::string& name) {
    for (const auto& s : kCatalog)
        if (name == s.name) return s.kind;
    throw ConfigError("unknown scheme '" + name + "' (see list-schemes)");
}

ExperimentConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    Reader r(j, "");
    ExperimentConfig cfg;
    if (!r.has("plant")) throw ConfigError("config: missing 'plant'");
    cfg.plant = read_plant(r.raw("plant"), "plant");
    if (!r.has("scheme")) throw ConfigError("config: missing 'scheme'");
    std::string scheme;
    r.read("scheme", scheme);
    cfg.scheme = scheme_from_string(scheme);
    if (r.has("scheme_params")) cfg.params = read_params(r.raw("scheme_params"), "scheme_params");
    r.read("ticks", cfg.ticks);
    if (cfg.ticks < 0) throw ConfigError("ticks: must be non-negative");

    if (r.has("setpoint_schedule")) {
        const auto& arr = r.raw("setpoint_schedule");
        if (!arr.is_array()) throw ConfigError("setpoint_schedule: expected an array of [tick, value] pairs");
        long last = std::numeric_limits<long>::min();
        for (const auto& item : arr) {
            if (!item.is_array() || item.size() != 2 || !item[0].is_number_integer() || !item[1].is_number())
                throw ConfigError("setpoint_schedule: each entry must be [integer tick, number]");
            const long t = item[0].get<long>();
            if (t <= last) throw ConfigError("setpoint_schedule: ticks must increase");
            last = t;
            cfg.setpoint_schedule.emplace_back(t, item[1].get<double>());
        }
    }

    if (r.has("disturbance")) {
        Reader d(r.raw("disturbance"), "disturbance");
        DisturbanceConfig dc;
        if (!d.has("kind")) throw ConfigError("disturbance: missing 'kind'");
        d.read("kind", dc.kind, kDisturbance);
        d.read("magnitude", dc.magnitude);
        d.read("start_tick", dc.start_tick);
        d.finish();
        if (dc.kind == DisturbanceKind::uniform_noise && dc.magnitude < 0.0)
            throw ConfigError("disturbance.magnitude: noise amplitude must be non-negative");
        cfg.disturbance = dc;
    }

    if (r.has("reference_model")) {
        Reader m(r.raw("reference_model"), "reference_model");
        double tau = 1.0;
        if (!m.has("tau")) throw ConfigError("reference_model: missing 'tau'");
        m.read("tau", tau);
        m.finish();
        if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("reference_model.tau: must lie in (0, 1]");
        cfg.reference_tau = tau;
    }

    if (r.has("seed")) {
        const auto& v = r.raw("seed");
        if (!v.is_number_unsigned()) throw ConfigError("seed: expected a non-negative integer");
        cfg.seed = v.get<std::uint64_t>();
    }
    r.finish();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    try {
        return parse_config(text.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

std::string config_to_json(const ExperimentConfig& cfg, int indent) {
    const auto& p = cfg.params;
    json params{
        {"narx_order", p.narx_order},
        {"control_order", p.control_order},
        {"hidden", p.hidden},
        {"critic_hidden", p.critic_hidden},
        {"init_scale", p.init_scale},
        {"training",
         {{"samples", p.training.samples},
          {"validation_samples", p.training.validation_samples},
          {"epochs", p.training.epochs},
          {"rate", p.training.rate},
          {"amplitude", p.training.amplitude},
          {"hold_ticks", p.training.hold_ticks},
          {"kind", name_of(kExcitation, p.training.kind)}}},
        {"online_rate", p.online_rate},
        {"jacobian", name_of(kJacobian, p.jacobian)},
        {"pid", {{"k1", p.pid.proportional}, {"k2", p.pid.integral}, {"k3", p.pid.derivative}}},
        {"emulator_threshold", p.emulator_threshold},
        {"inverse_mode", name_of(kInverse, p.inverse_mode)},
        {"mpc",
         {{"L1", p.mpc.first_error},
          {"L2", p.mpc.horizon},
          {"rho", p.mpc.move_weight},
          {"candidates", p.mpc.candidates_per_step},
          {"u_min", p.mpc.u_min},
          {"u_max", p.mpc.u_max},
          {"refine_iters", p.mpc.refine_iters}}},
        {"gamma", p.gamma},
        {"rate_critic", p.rate_critic},
        {"rate_actor", p.rate_actor},
        {"exploration", p.exploration},
        {"sigma", p.sigma},
        {"blend", name_of(kBlend, p.blend)},
        {"hybrid_mode", name_of(kHybrid, p.hybrid_mode)},
        {"pretrain_ticks", p.pretrain_ticks},
        {"neuro_pid_state_input", p.neuro_pid_state_input},
    };
    json modules = json::array();
    for (const auto& m : p.modules) modules.push_back({{"id", m.id}, {"plant", plant_json(m.plant)}});
    params["modules"] = modules;
    if (p.region) params["region"] = {{"center", p.region->center}, {"half_width", p.region->half_width}};

    json schedule = json::array();
    for (const auto& [t, v] : cfg.setpoint_schedule) schedule.push_back({t, v});
    json j{{"plant", plant_json(cfg.plant)},
           {"scheme", to_string(cfg.scheme)},
           {"scheme_params", params},
           {"setpoint_schedule", schedule},
           {"ticks", cfg.ticks}};
    if (cfg.disturbance)
        j["disturbance"] = {{"kind", name_of(kDisturbance, cfg.disturbance->kind)},
                            {"magnitude", cfg.disturbance->magnitude},
                            {"start_tick", cfg.disturbance->start_tick}};
    if (cfg.reference_tau) j["reference_model"] = {{"tau", *cfg.reference_tau}};
    if (cfg.seed) j["seed"] = *cfg.seed;
    return j.dump(indent);
}

double setpoint_at(const ExperimentConfig& cfg, long k) {
    double r = 0.0;
    for (const auto& [t, v] : cfg.setpoint_schedule) {
        if (t > k) break;
        r = v;
    }
    return r;
}

std::uint64_t resolve_seed(std::optional<std::uint64_t> cli, const ExperimentConfig& cfg) {
    if (cli) return *cli;
    if (cfg.seed) return *cfg.seed;
    if (const char* env = std::getenv(seed_env_var); env != nullptr && *env != '\0') {
        char* end = nullptr;
        errno = 0;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (errno != 0 || end == env || *end != '\0' || env[0] == '-')
            throw ConfigError(std::string(seed_env_var) + " must be a non-negative integer, got '" + env + "'");
        return v;
    }
    return default_seed;
}

}  // namespace ncb
