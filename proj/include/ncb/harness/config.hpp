#pragma once

// Experiment configuration. The on-disk format is JSON; every object rejects
// keys it does not know. Omitted keys take the defaults below.

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ncb/control/pid.hpp"
#include "ncb/plant/excitation.hpp"
#include "ncb/schemes/hybrid.hpp"
#include "ncb/schemes/inverse.hpp"
#include "ncb/schemes/modular.hpp"
#include "ncb/schemes/predictive.hpp"

namespace ncb {

enum class SchemeKind {
    mimic,
    generalized_inverse,
    specialized_inverse,
    bpte,
    predictive,
    hdp,
    multimodule,
    neuro_pid,
    hybrid_parallel,
    disturbance_filter,
};

struct SchemeInfo {
    SchemeKind kind;
    const char* name;
    const char* description;
};

std::span<const SchemeInfo> scheme_catalog();
std::string to_string(SchemeKind kind);
SchemeKind scheme_from_string(const std::string& name);

struct PlantConfig {
    std::string kind = "linear1";  // linear1 | nonlinear1
    double a = 0.5;
    double b = 1.0;
};

enum class DisturbanceKind { step, uniform_noise };

struct DisturbanceConfig {
    DisturbanceKind kind = DisturbanceKind::step;
    double magnitude = 0.0;
    long start_tick = 1;
};

// Offline identification: excitation length, epochs and rate for every
// network trained before the control run.
struct TrainingConfig {
    int samples = 2000;
    int validation_samples = 500;
    int epochs = 60;
    double rate = 0.02;
    double amplitude = 1.0;
    int hold_ticks = 3;
    ExcitationKind kind = ExcitationKind::random_steps;
};

struct ModuleConfig {
    std::string id;
    PlantConfig plant;
};

struct RegionConfig {
    std::vector<double> center;
    std::vector<double> half_width;
};

// A superset of every scheme's knobs so one file can drive `compare`.
struct SchemeParams {
    int narx_order = 1;     // N
    int control_order = 0;  // Q
    std::vector<int> hidden{8};
    std::vector<int> critic_hidden{12};
    double init_scale = 0.3;
    TrainingConfig training;

    double online_rate = 0.05;
    JacobianMode jacobian = JacobianMode::analytic;
    PidGains pid{0.3, 0.4, 0.0};
    double emulator_threshold = 1e-3;
    InverseMode inverse_mode = InverseMode::closed_loop;

    MpcConfig mpc;

    double gamma = 0.9;
    double rate_critic = 0.1;
    double rate_actor = 0.01;
    double exploration = 0.2;

    double sigma = 0.5;
    BlendMode blend = BlendMode::weighted;
    std::vector<ModuleConfig> modules;  // empty: one linear1 and one nonlinear1 module

    HybridMode hybrid_mode = HybridMode::sum_after_nn_trained_on_closed_loop;
    std::optional<RegionConfig> region;
    long pretrain_ticks = 500;

    bool neuro_pid_state_input = true;
};

struct ExperimentConfig {
    PlantConfig plant;
    SchemeKind scheme = SchemeKind::generalized_inverse;
    SchemeParams params;
    // (tick, value): row k targets the value of the last entry with tick <= k,
    // or 0 before the first entry.
    std::vector<std::pair<long, double>> setpoint_schedule;
    long ticks = 200;
    std::optional<DisturbanceConfig> disturbance;
    std::optional<double> reference_tau;
    std::optional<std::uint64_t> seed;
};

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

// Every field, defaults filled in, as compact JSON with sorted keys.
std::string config_to_json(const ExperimentConfig& cfg, int indent = -1);

double setpoint_at(const ExperimentConfig& cfg, long k);

constexpr std::uint64_t default_seed = 0;
constexpr const char* seed_env_var = "NCB_SEED";

// --seed beats the config's seed, which beats NCB_SEED, which beats the default.
std::uint64_t resolve_seed(std::optional<std::uint64_t> cli, const ExperimentConfig& cfg);

}  // namespace ncb
