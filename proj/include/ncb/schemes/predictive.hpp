#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

#include "ncb/plant/narx.hpp"
#include "ncb/schemes/inverse.hpp"

namespace ncb {

struct MpcConfig {
    int first_error = 1;  // L1
    int horizon = 3;      // L2, also the length of every sequence below
    double move_weight = 0.0;  // rho
    int candidates_per_step = 9;
    double u_min = -2.0;
    double u_max = 2.0;
    int refine_iters = 8;
    // Full enumeration of the initial grid is used as the starting point when
    // candidates_per_step^horizon does not exceed this.
    std::size_t enumeration_budget = 4096;

    void validate() const;
};

// Q = sum_{i=L1..L2} e(k+i)^2 + rho * sum_{i=0..L2-1} (u(k+i) - u(k+i-1))^2.
// Entry j of r_traj / y_pred refers to tick k+1+j, entry j of u_seq to k+j.
double mpc_cost(std::span<const double> r_traj, std::span<const double> y_pred,
                std::span<const double> u_seq, double u_prev, const MpcConfig& cfg);

// Emulator predictions y(k+1..k+L2) for the control sequence, starting from
// state `s` laid out as `layout` describes.
std::vector<double> rollout(const ForwardEmulator& emu, const NarxEstimator& layout,
                            const Eigen::VectorXd& s, std::span<const double> u_seq);

struct MpcPlan {
    double u_apply = 0.0;
    std::vector<double> strategy;
    double cost = 0.0;
};

// Derivative-free search over control sequences: start from u_prev held
// constant, take the best sequence of the initial uniform grid (enumerated when
// small, coordinate descent otherwise), then refine coordinate-wise with the
// grid span halved around the incumbent each sweep. Ties go to the
// lexicographically smaller sequence.
MpcPlan mpc_plan(const ForwardEmulator& emu, const NarxEstimator& layout, const Eigen::VectorXd& s,
                 std::span<const double> r_traj, double u_prev, const MpcConfig& cfg);

// Spacing of the last refinement grid; the planner's resolution.
double mpc_final_cell(const MpcConfig& cfg);

}  // namespace ncb
