#include "ncb/plant/narx.hpp"

#include <string>

#include "ncb/error.hpp"

namespace ncb {

NarxEstimator::NarxEstimator(int output_order, int control_order)
    : output_order_(output_order),
      control_order_(control_order),
      y_line_(output_order >= 0 ? std::size_t(output_order) + 1 : 1),
      u_line_(control_order >= 0 ? std::size_t(control_order) : 0) {
    if (output_order < 0 || control_order < 0)
        throw ConfigError("narx orders must be non-negative");
}

Eigen::VectorXd NarxEstimator::state() const {
    Eigen::VectorXd s(width());
    s.head(output_order_ + 1) = y_line_.vector();
    if (control_order_ > 0) s.tail(control_order_) = u_line_.vector();
    return s;
}

Eigen::VectorXd NarxEstimator::advance(const Eigen::VectorXd& state, double y_next, double u) const {
    if (state.size() != width())
        throw ShapeError("state has length " + std::to_string(state.size()) + ", estimator expects " +
                         std::to_string(width()));
    Eigen::VectorXd next(width());
    const int ny = output_order_ + 1;
    next[0] = y_next;
    next.segment(1, ny - 1) = state.segment(0, ny - 1);
    if (control_order_ > 0) {
        next[ny] = u;
        next.segment(ny + 1, control_order_ - 1) = state.segment(ny, control_order_ - 1);
    }
    return next;
}

Eigen::VectorXd phase_state(const TappedDelayLined& y_line, int order) {
    if (order < 0) throw ConfigError("phase state order must be non-negative");
    const auto needed = std::size_t(order) + 1;
    if (y_line.depth() < needed || y_line.pushes() < needed)
        throw ShapeError("phase state of order " + std::to_string(order) + " needs " + std::to_string(needed) +
                         " observations, have " + std::to_string(y_line.pushes()));
    // Row j of the difference table holds the j-th backward differences.
    Eigen::VectorXd diffs(order + 1);
    for (int i = 0; i <= order; ++i) diffs[i] = y_line[std::size_t(i)];
    Eigen::VectorXd s(order + 1);
    s[0] = diffs[0];
    for (int j = 1; j <= order; ++j) {
        for (int i = 0; i <= order - j; ++i) diffs[i] = diffs[i] - diffs[i + 1];
        s[j] = diffs[0];
    }
    return s;
}

}  // namespace ncb
