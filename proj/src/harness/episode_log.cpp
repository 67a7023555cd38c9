#include "ncb/harness/episode_log.hpp"

#include <algorithm>

#include "ncb/error.hpp"

namespace ncb {

void EpisodeLog::add(EpisodeRow row) {
    if (row.extra.size() != extra_columns_.size())
        throw ShapeError("episode row has " + std::to_string(row.extra.size()) + " diagnostics, log has " +
                         std::to_string(extra_columns_.size()) + " columns");
    if (!rows_.empty() && row.k <= rows_.back().k) throw ShapeError("episode rows must have increasing k");
    rows_.push_back(std::move(row));
}

int EpisodeLog::column(const std::string& name) const {
    const auto it = std::find(extra_columns_.begin(), extra_columns_.end(), name);
    return it == extra_columns_.end() ? -1 : int(it - extra_columns_.begin());
}

std::vector<double> EpisodeLog::values(const std::string& name) const {
    double EpisodeRow::*field = nullptr;
    if (name == "r") field = &EpisodeRow::r;
    else if (name == "r_prime") field = &EpisodeRow::r_prime;
    else if (name == "u") field = &EpisodeRow::u;
    else if (name == "y") field = &EpisodeRow::y;
    else if (name == "e") field = &EpisodeRow::e;
    const int extra = field ? -1 : column(name);
    if (!field && extra < 0) throw ShapeError("episode log has no column '" + name + "'");
    std::vector<double> out;
    out.reserve(rows_.size());
    for (const auto& row : rows_) out.push_back(field ? row.*field : row.extra[std::size_t(extra)]);
    return out;
}

}  // namespace ncb
