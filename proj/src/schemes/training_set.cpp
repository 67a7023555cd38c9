#include "ncb/schemes/training_set.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <random>
#include <string>

#include "ncb/error.hpp"

namespace ncb {

void TrainingSet::add(Eigen::VectorXd input, Eigen::VectorXd target) {
    if (!empty() && (input.size() != input_width() || target.size() != target_width()))
        throw ShapeError("training pair widths (" + std::to_string(input.size()) + ", " +
                         std::to_string(target.size()) + ") differ from the set's (" +
                         std::to_string(input_width()) + ", " + std::to_string(target_width()) + ")");
    inputs_.push_back(std::move(input));
    targets_.push_back(std::move(target));
}

void TrainingSet::write_csv(std::ostream& os) const {
    for (Eigen::Index i = 0; i < input_width(); ++i) os << (i ? "," : "") << 'p' << i;
    for (Eigen::Index i = 0; i < target_width(); ++i) os << ",t" << i;
    os << '\n';
    char buf[32];
    for (std::size_t r = 0; r < size(); ++r) {
        bool first = true;
        for (const auto* v : {&inputs_[r], &targets_[r]}) {
            for (Eigen::Index i = 0; i < v->size(); ++i) {
                std::snprintf(buf, sizeof buf, "%.17g", (*v)[i]);
                os << (first ? "" : ",") << buf;
                first = false;
            }
        }
        os << '\n';
    }
}

double mean_squared_error(const Mlpd& net, const TrainingSet& set) {
    if (set.empty()) return 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < set.size(); ++i) total += (set.target(i) - net(set.input(i))).squaredNorm();
    return total / double(set.size());
}

std::vector<double> train_supervised(Mlpd& net, const TrainingSet& set, int epochs, double rate,
                                     std::uint64_t seed) {
    if (epochs < 0) throw ConfigError("epochs must be non-negative");
    if (rate < 0.0) throw ConfigError("learning rate must be non-negative");
    if (epochs == 0) return {};
    if (set.empty()) throw ShapeError("cannot train on an empty set");
    if (set.input_width() != net.input_dim() || set.target_width() != net.output_dim())
        throw ShapeError("training set widths do not match the network");

    std::vector<std::size_t> order(set.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    std::vector<double> curve;
    curve.reserve(std::size_t(epochs));
    for (int epoch = 0; epoch < epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t i : order) {
            const auto fwd = forward(net, set.input(i));
            const Eigen::VectorXd dL_dy = fwd.output - set.target(i);
            sgd_step(net, backward_weights(net, fwd.cache, dL_dy), rate);
        }
        curve.push_back(mean_squared_error(net, set));
    }
    return curve;
}

}  // namespace ncb
