#pragma once

// Multiple paired forward/inverse models with soft responsibility weighting.

#include <Eigen/Dense>

#include <span>
#include <string>
#include <vector>

#include "ncb/nn/mlp.hpp"
#include "ncb/plant/narx.hpp"
#include "ncb/plant/plant.hpp"
#include "ncb/schemes/inverse.hpp"

namespace ncb {

struct PairedModule {
    ForwardEmulator forward;
    Mlpd inverse;  // [r(k+1), S(k)] -> u(k)
    std::string id;
};

struct ResponsibilityWeights {
    Eigen::VectorXd lambda;
    double sigma = 0.5;
};

enum class BlendMode { weighted, winner_take_all };

// e_l = y(k) - y_hat_l(k), each forward model fed [u(k-1), S(k-1)].
Eigen::VectorXd module_errors(std::span<const PairedModule> modules, double u_prev,
                              const Eigen::VectorXd& s_prev, double y_actual);

// lambda_l = exp(-e_l^2 / sigma^2) / sum_j exp(-e_j^2 / sigma^2)
ResponsibilityWeights responsibilities(const Eigen::VectorXd& errors, double sigma);

// Weighted sum, or the control of the largest weight (lowest index on ties).
double blend(const ResponsibilityWeights& weights, const Eigen::VectorXd& controls, BlendMode mode);

// Carries u(k-1) and S(k-1) between ticks. Until the first tick has run, all
// modules share responsibility equally.
struct MultiModuleMemory {
    bool primed = false;
    double u_prev = 0.0;
    Eigen::VectorXd s_prev;
};

struct MultiModuleTick {
    double u = 0.0;
    double y = 0.0;
    ResponsibilityWeights weights;
    Eigen::VectorXd controls;
};

// Phase one re-estimates responsibilities from how well each forward model
// predicted the current output; phase two blends every inverse model's answer
// to [r(k+1), S(k)] and applies it.
MultiModuleTick multimodule_step(std::span<const PairedModule> modules, MultiModuleMemory& memory,
                                 double r_next, NarxEstimator& est, Plant& plant, double sigma,
                                 BlendMode mode, double disturbance = 0.0);

}  // namespace ncb
