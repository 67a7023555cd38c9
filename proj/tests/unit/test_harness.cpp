#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ncb/error.hpp"
#include "ncb/harness/config.hpp"
#include "ncb/harness/export.hpp"
#include "ncb/harness/metrics.hpp"
#include "ncb/harness/runner.hpp"

using namespace ncb;

namespace {

const char* kBase = R"({
  "plant": {"kind": "linear1", "a": 0.5, "b": 1.0},
  "scheme": "mimic",
  "ticks": 60,
  "setpoint_schedule": [[0, 0.5], [30, -0.5]]
})";

ExperimentConfig base_config(SchemeKind kind = SchemeKind::mimic, long ticks = 60) {
    auto cfg = parse_config(kBase);
    cfg.scheme = kind;
    cfg.ticks = ticks;
    cfg.params.training.samples = 600;
    cfg.params.training.validation_samples = 200;
    cfg.params.training.epochs = 30;
    return cfg;
}

EpisodeLog log_of(std::initializer_list<std::pair<double, double>> ry) {
    EpisodeLog log;
    long k = 1;
    for (auto [r, y] : ry) log.add({k++, r, std::nan(""), 0.0, y, r - y, {}});
    return log;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

std::string message_of(const std::string& json) {
    try {
        parse_config(json);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

struct EnvGuard {
    explicit EnvGuard(const char* value) {
        if (value) setenv(seed_env_var, value, 1);
        else unsetenv(seed_env_var);
    }
    ~EnvGuard() { unsetenv(seed_env_var); }
};

}  // namespace

TEST(Config, DefaultsFillOmittedKeys) {
    const auto cfg = parse_config(R"({"plant": {"kind": "linear1"}, "scheme": "hdp"})");
    EXPECT_EQ(cfg.scheme, SchemeKind::hdp);
    EXPECT_EQ(cfg.plant.kind, "linear1");
    EXPECT_EQ(cfg.ticks, 200);
    EXPECT_DOUBLE_EQ(cfg.params.gamma, 0.9);
    EXPECT_FALSE(cfg.disturbance.has_value());
    EXPECT_FALSE(cfg.seed.has_value());
}

TEST(Config, SchemeIsRequired) {
    EXPECT_THROW(parse_config(R"({"plant": {"kind": "linear1"}})"), ConfigError);
}

TEST(Config, UnknownKeysAreRejectedAtEveryLevel) {
    EXPECT_NE(message_of(R"({"plant": {"kind": "linear1"}, "scheme": "mimic", "tikcs": 5})").find("tikcs"), std::string::npos);
    EXPECT_NE(message_of(R"({"scheme": "mimic", "plant": {"kind": "linear1", "gain_c": 1}})").find("gain_c"),
              std::string::npos);
    EXPECT_NE(message_of(R"({"plant": {"kind": "linear1"}, "scheme": "mimic", "scheme_params": {"pid": {"k4": 1}}})").find("k4"),
              std::string::npos);
    EXPECT_NE(message_of(R"({"plant": {"kind": "linear1"}, "scheme": "mimic", "scheme_params": {"mpc": {"horizon": 2}}})").find("horizon"),
              std::string::npos);
}

TEST(Config, BadValuesAreRejected) {
    EXPECT_THROW(parse_config(R"({"plant": {"kind": "linear1"}, "scheme": "nonsense"})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"plant": {"kind": "linear1"}, "scheme": "mimic", "ticks": -1})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"plant": {"kind": "linear1"}, "scheme": "mimic", "ticks": "many"})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"scheme": "mimic", "plant": {"kind": "cubic"}})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"plant": {"kind": "linear1"}, "scheme": "mimic", )"), ConfigError);
}

TEST(Config, MissingFileNamesThePath) {
    try {
        load_config("/nonexistent/dir/exp.json");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("/nonexistent/dir/exp.json"), std::string::npos);
    }
}

TEST(Config, JsonRoundTrip) {
    auto cfg = base_config(SchemeKind::predictive);
    cfg.disturbance = DisturbanceConfig{DisturbanceKind::uniform_noise, 0.1, 5};
    cfg.reference_tau = 0.5;
    cfg.seed = 42;
    cfg.params.modules = {{"lin", {"linear1", 0.2, 2.0}}};
    cfg.params.region = RegionConfig{{0.0, 0.1}, {1.0, 2.0}};
    const std::string text = config_to_json(cfg);
    EXPECT_EQ(config_to_json(parse_config(text)), text);
}

TEST(Config, SetpointSchedule) {
    const auto cfg = base_config();
    EXPECT_DOUBLE_EQ(setpoint_at(cfg, 1), 0.5);
    EXPECT_DOUBLE_EQ(setpoint_at(cfg, 29), 0.5);
    EXPECT_DOUBLE_EQ(setpoint_at(cfg, 30), -0.5);
    auto late = cfg;
    late.setpoint_schedule = {{10, 1.0}};
    EXPECT_DOUBLE_EQ(setpoint_at(late, 9), 0.0);
    EXPECT_DOUBLE_EQ(setpoint_at(late, 10), 1.0);
}

TEST(Config, SchemeCatalogHasTenRoundTrippingNames) {
    const auto cat = scheme_catalog();
    ASSERT_EQ(cat.size(), 10u);
    for (const auto& s : cat) EXPECT_EQ(scheme_from_string(s.name), s.kind);
}

TEST(Seed, Precedence) {
    auto cfg = base_config();
    {
        EnvGuard env(nullptr);
        EXPECT_EQ(resolve_seed(std::nullopt, cfg), default_seed);
    }
    {
        EnvGuard env("17");
        EXPECT_EQ(resolve_seed(std::nullopt, cfg), 17u);
        cfg.seed = 5;
        EXPECT_EQ(resolve_seed(std::nullopt, cfg), 5u);
        EXPECT_EQ(resolve_seed(9, cfg), 9u);
    }
    {
        EnvGuard env("not-a-number");
        cfg.seed.reset();
        EXPECT_THROW(resolve_seed(std::nullopt, cfg), ConfigError);
    }
}

TEST(Seed, DerivedSeedsDifferByPurpose) {
    EXPECT_NE(derive_seed(1, "controller"), derive_seed(1, "excitation"));
    EXPECT_NE(derive_seed(1, "controller"), derive_seed(2, "controller"));
    EXPECT_EQ(derive_seed(7, "x"), derive_seed(7, "x"));
}

TEST(Metrics, IaeExamples) {
    EXPECT_DOUBLE_EQ(iae(log_of({{1, 1}, {0.5, 0.5}})), 0.0);
    EXPECT_DOUBLE_EQ(iae(log_of({{1, 0}, {1, 1}})), 1.0);
    EXPECT_DOUBLE_EQ(iae(EpisodeLog{}), 0.0);
}

TEST(Metrics, IaeIsQuadraticInTheErrors) {
    const auto a = log_of({{0.3, 0.1}, {-0.2, 0.4}, {1.0, 0.7}});
    const auto b = log_of({{0.9, 0.3}, {-0.6, 1.2}, {3.0, 2.1}});
    EXPECT_NEAR(iae(b), 9.0 * iae(a), 1e-14);
}

TEST(Metrics, Report) {
    EpisodeLog log;
    for (long k = 1; k <= 20; ++k) log.add({k, 1.0, std::nan(""), (k == 3 ? -2.5 : 0.1), 1.0 - 1.0 / k, 1.0 / k, {}});
    const auto m = compute_metrics(log);
    EXPECT_DOUBLE_EQ(m.max_abs_u, 2.5);
    EXPECT_NEAR(m.final_window_mean_abs_e, (1.0 / 19 + 1.0 / 20) / 2, 1e-15);
    EXPECT_FALSE(m.diverged);
    EXPECT_GE(m.iae, 0.0);
}

TEST(Export, EmptyLogIsHeaderOnly) {
    std::ostringstream os;
    write_log_csv(os, EpisodeLog({"lambda_a"}));
    EXPECT_EQ(os.str(), "k,r,u,y,e,lambda_a\n");
}

TEST(Export, CsvRoundTripIsExact) {
    EpisodeLog log({"J_hat", "delta"}, true);
    log.add({1, 0.1, 0.05, 1.0 / 3.0, 0.7, 0.1 - 0.7, {1e-300, -2.0 / 7.0}});
    log.add({2, -0.5, -0.25, 6.02214076e23, -0.125, -0.375, {0.0, 3.141592653589793}});
    std::ostringstream os;
    write_log_csv(os, log);
    std::istringstream is(os.str());
    const auto back = read_log_csv(is);
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back.extra_columns(), log.extra_columns());
    EXPECT_TRUE(back.has_reference());
    for (std::size_t i = 0; i < 2; ++i) {
        const auto &a = log.rows()[i], &b = back.rows()[i];
        EXPECT_EQ(a.k, b.k);
        EXPECT_EQ(a.r, b.r);
        EXPECT_EQ(a.r_prime, b.r_prime);
        EXPECT_EQ(a.u, b.u);
        EXPECT_EQ(a.y, b.y);
        EXPECT_EQ(a.e, b.e);
        EXPECT_EQ(a.extra, b.extra);
    }
}

TEST(Export, UnwritablePrefixReportsThePath) {
    RunResult r;
    r.config = base_config();
    try {
        export_run(r, "/nonexistent/dir/out");
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("/nonexistent/dir/out"), std::string::npos);
    }
}

TEST(Runner, ZeroTicksGivesEmptyLog) {
    const auto r = run_episode(base_config(SchemeKind::mimic, 0), 1);
    EXPECT_TRUE(r.log.empty());
    EXPECT_EQ(r.report.iae, 0.0);
    EXPECT_FALSE(r.report.diverged);
}

TEST(Runner, SameSeedGivesBitIdenticalLogs) {
    for (auto kind : {SchemeKind::mimic, SchemeKind::hdp, SchemeKind::specialized_inverse}) {
        const auto cfg = base_config(kind);
        const auto a = run_episode(cfg, 3), b = run_episode(cfg, 3);
        std::ostringstream sa, sb;
        write_log_csv(sa, a.log);
        write_log_csv(sb, b.log);
        EXPECT_EQ(sa.str(), sb.str()) << to_string(kind);
        EXPECT_EQ(meta_json(a), meta_json(b)) << to_string(kind);
    }
}

TEST(Runner, SeedChangesTheRun) {
    const auto cfg = base_config(SchemeKind::generalized_inverse);
    EXPECT_NE(run_episode(cfg, 1).artifacts.at("controller"), run_episode(cfg, 2).artifacts.at("controller"));
}

TEST(Runner, RowsTickFromOneAndIaeMatchesTheCsv) {
    const auto r = run_episode(base_config(SchemeKind::generalized_inverse), 1);
    ASSERT_EQ(r.log.size(), 60u);
    for (std::size_t i = 0; i < r.log.size(); ++i) EXPECT_EQ(r.log.rows()[i].k, static_cast<long>(i + 1));

    std::ostringstream os;
    write_log_csv(os, r.log);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    double sum = 0.0;
    while (std::getline(is, line)) {
        std::stringstream ls(line);
        std::string cell;
        for (int c = 0; c < 5; ++c) std::getline(ls, cell, ',');
        const double e = std::stod(cell);
        sum += e * e;
    }
    EXPECT_NEAR(sum, r.report.iae, 1e-12 * (1.0 + sum));
}

TEST(Runner, MimicWithStabilizingPidStaysBounded) {
    auto cfg = base_config(SchemeKind::mimic, 200);
    // |a - (K1 + K2) b| = |0.5 - 0.7| < 1 on linear1.
    ASSERT_LT(std::abs(cfg.plant.a - (cfg.params.pid.proportional + cfg.params.pid.integral) * cfg.plant.b), 1.0);
    const auto r = run_episode(cfg, 1);
    EXPECT_FALSE(r.report.diverged);
    EXPECT_EQ(r.log.size(), 200u);
}

TEST(Runner, EveryDefaultSchemeRuns) {
    for (const auto& s : scheme_catalog()) {
        auto cfg = parse_config(kBase);
        cfg.scheme = s.kind;
        cfg.ticks = 40;
        if (s.kind == SchemeKind::disturbance_filter) cfg.disturbance = DisturbanceConfig{DisturbanceKind::step, 0.2, 10};
        const auto r = run_episode(cfg, 1);
        EXPECT_FALSE(r.report.diverged) << s.name;
        EXPECT_EQ(r.log.size(), 40u) << s.name;
        EXPECT_FALSE(r.artifacts.empty()) << s.name;
    }
}

TEST(Runner, DivergenceIsReportedNotThrown) {
    auto cfg = base_config(SchemeKind::specialized_inverse, 300);
    cfg.plant = {"linear1", 1.5, 1.0};
    cfg.params.online_rate = 0.0;
    cfg.params.training.epochs = 0;
    cfg.params.init_scale = 0.0;
    cfg.disturbance = DisturbanceConfig{DisturbanceKind::step, 0.2, 1};
    const auto r = run_episode(cfg, 1);
    EXPECT_TRUE(r.report.diverged);
    ASSERT_TRUE(r.divergence_tick.has_value());
    EXPECT_LT(r.log.size(), 300u);
    EXPECT_FALSE(r.divergence_message.empty());
}

TEST(Runner, ExportIsByteIdenticalAcrossRuns) {
    const auto dir = std::filesystem::temp_directory_path() / "ncb_export_test";
    std::filesystem::create_directories(dir);
    const auto cfg = base_config(SchemeKind::neuro_pid);
    export_run(run_episode(cfg, 4), (dir / "a").string());
    export_run(run_episode(cfg, 4), (dir / "b").string());
    EXPECT_EQ(slurp(dir / "a.csv"), slurp(dir / "b.csv"));
    EXPECT_EQ(slurp(dir / "a.meta.json"), slurp(dir / "b.meta.json"));
    EXPECT_EQ(slurp(dir / "a.meta.json").find("time"), std::string::npos);
    std::filesystem::remove_all(dir);
}
