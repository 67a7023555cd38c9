#pragma once

#include <iosfwd>
#include <string>

#include "ncb/harness/episode_log.hpp"
#include "ncb/harness/runner.hpp"

namespace ncb {

// Header k,r,u,y,e[,r_prime][,diagnostics...], then one line per tick with
// 17 significant digits.
void write_log_csv(std::ostream& os, const EpisodeLog& log);
EpisodeLog read_log_csv(std::istream& is);

// Config echo, seed, metrics, training figures, artifact hashes, warnings and
// divergence details. No timestamps.
std::string meta_json(const RunResult& result);

// Writes <prefix>.csv and <prefix>.meta.json.
void export_run(const RunResult& result, const std::string& prefix);

}  // namespace ncb
