#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace ncb {

struct EpisodeRow {
    long k = 0;
    double r = 0.0;  // target for the tick's outcome, r(k+1)
    double r_prime = std::numeric_limits<double>::quiet_NaN();
    double u = 0.0;
    double y = 0.0;  // outcome y(k+1)
    double e = 0.0;  // r - y
    std::vector<double> extra;
};

// One row per tick. Scheme diagnostics live in named extra columns.
class EpisodeLog {
public:
    EpisodeLog() = default;
    explicit EpisodeLog(std::vector<std::string> extra_columns, bool has_reference = false)
        : extra_columns_(std::move(extra_columns)), has_reference_(has_reference) {}

    void add(EpisodeRow row);

    const std::vector<EpisodeRow>& rows() const { return rows_; }
    const std::vector<std::string>& extra_columns() const { return extra_columns_; }
    bool has_reference() const { return has_reference_; }
    std::size_t size() const { return rows_.size(); }
    bool empty() const { return rows_.empty(); }

    // Index of a named extra column, or -1.
    int column(const std::string& name) const;

    // All values of r, r_prime, u, y, e or a named extra column, in tick order.
    std::vector<double> values(const std::string& name) const;

private:
    std::vector<std::string> extra_columns_;
    bool has_reference_ = false;
    std::vector<EpisodeRow> rows_;
};

}  // namespace ncb
