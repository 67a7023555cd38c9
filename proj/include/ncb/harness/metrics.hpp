#pragma once

#include "ncb/harness/episode_log.hpp"

namespace ncb {

struct MetricsReport {
    double iae = 0.0;  // sum of squared tracking errors
    double final_window_mean_abs_e = 0.0;  // over the last max(1, n/10) rows
    double max_abs_u = 0.0;
    bool diverged = false;
};

double iae(const EpisodeLog& log);

MetricsReport compute_metrics(const EpisodeLog& log, bool diverged = false);

}  // namespace ncb
