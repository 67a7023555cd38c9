#include "ncb/harness/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace ncb {

double iae(const EpisodeLog& log) {
    double s = 0.0;
    for (const auto& row : log.rows()) s += row.e * row.e;
    return s;
}

MetricsReport compute_metrics(const EpisodeLog& log, bool diverged) {
    MetricsReport m;
    m.diverged = diverged;
    m.iae = iae(log);
    const auto& rows = log.rows();
    if (rows.empty()) return m;
    const std::size_t window = std::max<std::size_t>(1, rows.size() / 10);
    double tail = 0.0;
    for (std::size_t i = rows.size() - window; i < rows.size(); ++i) tail += std::abs(rows[i].e);
    m.final_window_mean_abs_e = tail / double(window);
    for (const auto& row : rows) m.max_abs_u = std::max(m.max_abs_u, std::abs(row.u));
    return m;
}

}  // namespace ncb
