#include "ncb/schemes/modular.hpp"

#include <cmath>

#include "ncb/error.hpp"

namespace ncb {

Eigen::VectorXd module_errors(std::span<const PairedModule> modules, double u_prev,
                              const Eigen::VectorXd& s_prev, double y_actual) {
    Eigen::VectorXd e(static_cast<Eigen::Index>(modules.size()));
    for (std::size_t l = 0; l < modules.size(); ++l)
        e[Eigen::Index(l)] = y_actual - modules[l].forward.predict(u_prev, s_prev);
    return e;
}

ResponsibilityWeights responsibilities(const Eigen::VectorXd& errors, double sigma) {
    if (!(sigma > 0.0)) throw ConfigError("responsibility scale sigma must be positive");
    if (errors.size() == 0) throw ShapeError("responsibilities need at least one module");
    const Eigen::ArrayXd exponent = -errors.array().square() / (sigma * sigma);
    // Shifting by the max leaves the ratio unchanged and keeps exp() in range.
    const Eigen::ArrayXd w = (exponent - exponent.maxCoeff()).exp();
    return {(w / w.sum()).matrix(), sigma};
}

double blend(const ResponsibilityWeights& weights, const Eigen::VectorXd& controls, BlendMode mode) {
    if (weights.lambda.size() != controls.size() || controls.size() == 0)
        throw ShapeError("blend: " + std::to_string(weights.lambda.size()) + " weights for " +
                         std::to_string(controls.size()) + " controls");
    if (mode == BlendMode::weighted) return weights.lambda.dot(controls);
    Eigen::Index winner = 0;
    for (Eigen::Index i = 1; i < controls.size(); ++i)
        if (weights.lambda[i] > weights.lambda[winner]) winner = i;
    return controls[winner];
}

MultiModuleTick multimodule_step(std::span<const PairedModule> modules, MultiModuleMemory& memory,
                                 double r_next, NarxEstimator& est, Plant& plant, double sigma,
                                 BlendMode mode, double disturbance) {
    if (modules.empty()) throw ShapeError("multi-module control needs at least one module");
    const Eigen::VectorXd s = est.state();
    MultiModuleTick tick;
    if (memory.primed) {
        tick.weights = responsibilities(module_errors(modules, memory.u_prev, memory.s_prev, s[0]), sigma);
    } else {
        tick.weights.lambda = Eigen::VectorXd::Constant(Eigen::Index(modules.size()), 1.0 / double(modules.size()));
        tick.weights.sigma = sigma;
    }

    const Eigen::VectorXd x = concat(r_next, s);
    tick.controls.resize(Eigen::Index(modules.size()));
    for (std::size_t l = 0; l < modules.size(); ++l) tick.controls[Eigen::Index(l)] = modules[l].inverse(x)[0];
    tick.u = blend(tick.weights, tick.controls, mode);

    tick.y = plant.step(tick.u, disturbance);
    est.observe(tick.y);
    est.observe_u(tick.u);
    memory = {true, tick.u, s};
    return tick;
}

}  // namespace ncb
