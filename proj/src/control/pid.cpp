#include "ncb/control/pid.hpp"

#include <cmath>

#include "ncb/error.hpp"

namespace ncb {

PidOutput pid_step(const PidGains& gains, const PidState& state, double e) {
    if (!std::isfinite(e)) throw ConfigError("pid_step: non-finite error input");
    const Eigen::Vector3d sensitivity = du_dK(e, state.e_prev, state.e_prev2);
    const double u = state.u_prev + gains.vector().dot(sensitivity);
    return {u, PidState{e, state.e_prev, u}};
}

Eigen::Vector3d du_dK(double e, double e_prev, double e_prev2) {
    return {e - e_prev, e, e - 2.0 * e_prev + e_prev2};
}

}  // namespace ncb
