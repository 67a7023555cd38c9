#pragma once

#include <Eigen/Dense>

#include "ncb/nn/tapped_delay_line.hpp"

namespace ncb {

// State estimate from delayed observations:
//   [y(k), y(k-1), ..., y(k-N), u(k-1), ..., u(k-Q)]
// Q = 0 gives the output-only form used by default.
class NarxEstimator {
public:
    explicit NarxEstimator(int output_order = 1, int control_order = 0);

    void observe(double y) { y_line_.push(y); }
    void observe_u(double u) {
        if (control_order_ > 0) u_line_.push(u);
    }

    Eigen::VectorXd state() const;
    Eigen::Index width() const { return Eigen::Index(output_order_ + 1 + control_order_); }

    int output_order() const { return output_order_; }
    int control_order() const { return control_order_; }
    const TappedDelayLined& output_line() const { return y_line_; }

    void reset() {
        y_line_.clear();
        u_line_.clear();
    }

    // Shift a state vector of this layout by one tick, as if y_next had been
    // observed after applying u.
    Eigen::VectorXd advance(const Eigen::VectorXd& state, double y_next, double u) const;

private:
    int output_order_;
    int control_order_;
    TappedDelayLined y_line_;
    TappedDelayLined u_line_;
};

// [y, y', ..., y^(N)] by backward differences over the newest N+1 samples.
Eigen::VectorXd phase_state(const TappedDelayLined& y_line, int order);

}  // namespace ncb
