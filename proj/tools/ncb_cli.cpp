// ncb: run, compare and check neurocontrol experiments.
//
// Exit codes: 0 success, 1 configuration or usage error (including an
// emulator that failed its readiness gate, or a failing gradient check),
// 2 divergence during `run`.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "ncb/error.hpp"
#include "ncb/harness/config.hpp"
#include "ncb/harness/export.hpp"
#include "ncb/harness/runner.hpp"
#include "ncb/nn/gradcheck.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kDiverged = 2;

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

void print_metrics(const ncb::RunResult& r) {
    std::printf("scheme      %s\n", ncb::to_string(r.config.scheme).c_str());
    std::printf("seed        %llu\n", static_cast<unsigned long long>(r.seed));
    std::printf("rows        %zu\n", r.log.size());
    std::printf("iae         %.10g\n", r.report.iae);
    std::printf("final |e|   %.10g\n", r.report.final_window_mean_abs_e);
    std::printf("max |u|     %.10g\n", r.report.max_abs_u);
    std::printf("diverged    %s\n", r.report.diverged ? "yes" : "no");
    for (const auto& w : r.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
    if (r.divergence_tick)
        std::fprintf(stderr, "diverged at tick %ld: %s\n", *r.divergence_tick, r.divergence_message.c_str());
}

int cmd_run(const std::string& path, const std::string& out, std::optional<std::uint64_t> seed) {
    const auto cfg = ncb::load_config(path);
    const auto result = ncb::run_episode(cfg, ncb::resolve_seed(seed, cfg));
    const std::string prefix = out.empty() ? std::filesystem::path(path).stem().string() : out;
    ncb::export_run(result, prefix);
    print_metrics(result);
    std::printf("wrote       %s.csv %s.meta.json\n", prefix.c_str(), prefix.c_str());
    return result.report.diverged ? kDiverged : kOk;
}

int cmd_compare(const std::string& path, const std::string& schemes, std::optional<std::uint64_t> seed) {
    const auto cfg = ncb::load_config(path);
    const auto names = split_list(schemes);
    if (names.empty()) throw ncb::ConfigError("--schemes needs at least one scheme name");
    std::vector<ncb::SchemeKind> kinds;
    for (const auto& n : names) kinds.push_back(ncb::scheme_from_string(n));
    const std::uint64_t s = ncb::resolve_seed(seed, cfg);

    std::printf("%-20s %16s %16s %16s  %s\n", "scheme", "iae", "final_mean_abs_e", "max_abs_u", "status");
    std::fflush(stdout);
    for (auto kind : kinds) {
        auto c = cfg;
        c.scheme = kind;
        const std::string name = ncb::to_string(kind);
        try {
            const auto r = ncb::run_episode(c, s);
            std::printf("%-20s %16.8g %16.8g %16.8g  %s\n", name.c_str(), r.report.iae, r.report.final_window_mean_abs_e,
                        r.report.max_abs_u, r.report.diverged ? "diverged" : "ok");
        } catch (const ncb::NotReadyError& e) {
            std::printf("%-20s %16s %16s %16s  not-ready\n", name.c_str(), "-", "-", "-");
            std::fprintf(stderr, "%s: %s\n", name.c_str(), e.what());
        }
        std::fflush(stdout);
    }
    return kOk;
}

int cmd_gradcheck(int cases, std::uint64_t seed) {
    const auto report = ncb::run_gradcheck(cases, seed);
    for (const auto& c : report.cases) {
        std::string dims;
        for (int d : c.dims) dims += (dims.empty() ? "" : "-") + std::to_string(d);
        std::printf("%-16s weights %.3e inputs %.3e %s\n", dims.c_str(), c.max_weight_rel_error, c.max_input_rel_error,
                    c.passed ? "ok" : "FAIL");
    }
    std::printf("%zu cases, tolerance %.1e: %s\n", report.cases.size(), report.tolerance,
                report.passed() ? "passed" : "FAILED");
    return report.passed() ? kOk : kConfigError;
}

int cmd_list() {
    for (const auto& s : ncb::scheme_catalog()) std::printf("%-20s %s\n", s.name, s.description);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Neurocontrol benchmark: train and evaluate neural control schemes on simulated plants"};
    app.require_subcommand(1);

    std::string config, out, schemes;
    std::optional<std::uint64_t> seed;
    int cases = 20;
    std::uint64_t check_seed = 1;

    auto* run = app.add_subcommand("run", "run one experiment and export <prefix>.csv and <prefix>.meta.json");
    run->add_option("config", config, "experiment config (JSON)")->required();
    run->add_option("--out", out, "output prefix (default: config file name without extension)");
    run->add_option("--seed", seed, "seed; overrides the config and NCB_SEED");

    auto* compare = app.add_subcommand("compare", "run the same experiment under several schemes");
    compare->add_option("config", config, "experiment config (JSON)")->required();
    compare->add_option("--schemes", schemes, "comma-separated scheme names")->required();
    compare->add_option("--seed", seed, "seed; overrides the config and NCB_SEED");

    auto* grad = app.add_subcommand("gradcheck", "check backpropagation against finite differences");
    grad->add_option("--cases", cases, "number of random networks")->check(CLI::PositiveNumber);
    grad->add_option("--seed", check_seed, "seed for the random networks");

    auto* list = app.add_subcommand("list-schemes", "list the control schemes");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return kConfigError;
    }

    try {
        if (run->parsed()) return cmd_run(config, out, seed);
        if (compare->parsed()) return cmd_compare(config, schemes, seed);
        if (grad->parsed()) return cmd_gradcheck(cases, check_seed);
        if (list->parsed()) return cmd_list();
    } catch (const ncb::DivergenceError& e) {
        std::cerr << "error: " << e.what() << " (tick " << e.tick() << ")\n";
        return kDiverged;
    } catch (const ncb::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfigError;
    }
    return kConfigError;
}
