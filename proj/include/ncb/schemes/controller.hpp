#pragma once

#include <Eigen/Dense>

#include <memory>

namespace ncb {

// [head, tail...]
inline Eigen::VectorXd concat(double head, const Eigen::VectorXd& tail) {
    Eigen::VectorXd v(tail.size() + 1);
    v << head, tail;
    return v;
}

// Maps (next setpoint, state estimate) to a control value. Stateful
// controllers keep their own history between calls.
class Controller {
public:
    virtual ~Controller() = default;
    virtual double act(double r_next, const Eigen::VectorXd& state) = 0;
    virtual void reset() {}
};

}  // namespace ncb
