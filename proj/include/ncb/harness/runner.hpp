#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ncb/harness/config.hpp"
#include "ncb/harness/episode_log.hpp"
#include "ncb/harness/metrics.hpp"

namespace ncb {

struct RunResult {
    ExperimentConfig config;
    std::uint64_t seed = 0;
    EpisodeLog log;
    MetricsReport report;
    // Parameter hashes of every network the run produced, after the run.
    std::map<std::string, std::string> artifacts;
    // Offline training figures: final losses, held-out errors.
    std::map<std::string, double> training;
    std::vector<std::string> warnings;
    std::optional<long> divergence_tick;
    std::string divergence_message;
};

// Runs the scheme's whole procedure: offline phases first, then the logged
// control run. Divergence is caught and reported with the log truncated at
// the last good tick; configuration and readiness problems throw.
RunResult run_episode(const ExperimentConfig& cfg, std::uint64_t seed);

// Per-purpose seed derived from the run seed.
std::uint64_t derive_seed(std::uint64_t base, const std::string& purpose);

std::string hex_hash(std::uint64_t h);

}  // namespace ncb
