#pragma once

#include <Eigen/Dense>

#include <array>

namespace ncb {

struct PidGains {
    double proportional = 0.0;  // K1
    double integral = 0.0;      // K2
    double derivative = 0.0;    // K3

    Eigen::Vector3d vector() const { return {proportional, integral, derivative}; }
    static PidGains from(const Eigen::Vector3d& k) { return {k[0], k[1], k[2]}; }
};

struct PidState {
    double e_prev = 0.0;   // e(k-1)
    double e_prev2 = 0.0;  // e(k-2)
    double u_prev = 0.0;   // u(k-1)
};

struct PidOutput {
    double u;
    PidState state;
};

// Incremental (velocity-form) discrete PID:
//   u(k) = u(k-1) + K1 (e - e1) + K2 e + K3 (e - 2 e1 + e2)
PidOutput pid_step(const PidGains& gains, const PidState& state, double e);

// du(k)/dK for the law above, holding u(k-1) fixed.
Eigen::Vector3d du_dK(double e, double e_prev, double e_prev2);

}  // namespace ncb
