#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "ncb/nn/mlp.hpp"

namespace ncb {

// Ordered supervised pairs {P_i, T_i}.
class TrainingSet {
public:
    void add(Eigen::VectorXd input, Eigen::VectorXd target);

    std::size_t size() const { return inputs_.size(); }
    bool empty() const { return inputs_.empty(); }
    Eigen::Index input_width() const { return empty() ? 0 : inputs_.front().size(); }
    Eigen::Index target_width() const { return empty() ? 0 : targets_.front().size(); }

    const Eigen::VectorXd& input(std::size_t i) const { return inputs_[i]; }
    const Eigen::VectorXd& target(std::size_t i) const { return targets_[i]; }

    // Header "p0,...,t0,..." then one row per pair, 17 significant digits.
    void write_csv(std::ostream& os) const;

private:
    std::vector<Eigen::VectorXd> inputs_;
    std::vector<Eigen::VectorXd> targets_;
};

// Per-sample steepest descent on 0.5*|T - net(P)|^2 with a seeded reshuffle
// every epoch. Returns the mean squared error over the set after each epoch.
std::vector<double> train_supervised(Mlpd& net, const TrainingSet& set, int epochs, double rate,
                                     std::uint64_t seed);

// Mean over pairs of |T - net(P)|^2.
double mean_squared_error(const Mlpd& net, const TrainingSet& set);

}  // namespace ncb
