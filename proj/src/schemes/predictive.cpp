#include "ncb/schemes/predictive.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ncb/error.hpp"

namespace ncb {

void MpcConfig::validate() const {
    if (first_error < 0) throw ConfigError("mpc: L1 must be >= 0");
    if (horizon < 1 || horizon < first_error) throw ConfigError("mpc: L2 must be >= max(L1, 1)");
    if (move_weight < 0.0) throw ConfigError("mpc: rho must be >= 0");
    if (candidates_per_step < 3) throw ConfigError("mpc: need at least 3 candidates per step");
    if (!(u_min < u_max)) throw ConfigError("mpc: u_min must be below u_max");
    if (refine_iters < 0) throw ConfigError("mpc: refine_iters must be >= 0");
}

double mpc_cost(std::span<const double> r_traj, std::span<const double> y_pred,
                std::span<const double> u_seq, double u_prev, const MpcConfig& cfg) {
    const auto L = std::size_t(cfg.horizon);
    if (r_traj.size() != L || y_pred.size() != L || u_seq.size() != L)
        throw ShapeError("mpc_cost: trajectories must all have length L2 = " + std::to_string(L));
    double q = 0.0;
    // e(k) itself cannot be influenced by the plan, so i starts at 1 at the earliest.
    for (std::size_t i = std::size_t(std::max(cfg.first_error, 1)); i <= L; ++i) {
        const double e = r_traj[i - 1] - y_pred[i - 1];
        q += e * e;
    }
    if (cfg.move_weight != 0.0) {
        double moves = 0.0;
        double before = u_prev;
        for (double u : u_seq) {
            moves += (u - before) * (u - before);
            before = u;
        }
        q += cfg.move_weight * moves;
    }
    return q;
}

std::vector<double> rollout(const ForwardEmulator& emu, const NarxEstimator& layout,
                            const Eigen::VectorXd& s, std::span<const double> u_seq) {
    std::vector<double> y(u_seq.size());
    Eigen::VectorXd state = s;
    for (std::size_t i = 0; i < u_seq.size(); ++i) {
        y[i] = emu.predict(u_seq[i], state);
        if (i + 1 < u_seq.size()) state = layout.advance(state, y[i], u_seq[i]);
    }
    return y;
}

double mpc_final_cell(const MpcConfig& cfg) {
    return (cfg.u_max - cfg.u_min) / std::ldexp(1.0, cfg.refine_iters) / double(cfg.candidates_per_step - 1);
}

namespace {

class Search {
public:
    Search(const ForwardEmulator& emu, const NarxEstimator& layout, const Eigen::VectorXd& s,
           std::span<const double> r_traj, double u_prev, const MpcConfig& cfg)
        : emu_(emu), layout_(layout), s_(s), r_(r_traj), u_prev_(u_prev), cfg_(cfg) {}

    double cost(const std::vector<double>& seq) const {
        const auto y = rollout(emu_, layout_, s_, seq);
        return mpc_cost(r_, y, seq, u_prev_, cfg_);
    }

    // Lower cost wins; equal cost goes to the lexicographically smaller sequence.
    bool offer(const std::vector<double>& seq) {
        const double q = cost(seq);
        if (best_.empty() || q < best_cost_ || (q == best_cost_ && seq < best_)) {
            best_ = seq;
            best_cost_ = q;
            return true;
        }
        return false;
    }

    // Try every candidate level at one position, holding the others.
    bool sweep_position(std::size_t i, const std::vector<double>& levels) {
        bool improved = false;
        std::vector<double> trial = best_;
        for (double v : levels) {
            trial = best_;
            trial[i] = v;
            improved |= offer(trial);
        }
        return improved;
    }

    const std::vector<double>& best() const { return best_; }
    double best_cost() const { return best_cost_; }

private:
    const ForwardEmulator& emu_;
    const NarxEstimator& layout_;
    const Eigen::VectorXd& s_;
    std::span<const double> r_;
    double u_prev_;
    const MpcConfig& cfg_;
    std::vector<double> best_;
    double best_cost_ = 0.0;
};

std::vector<double> uniform_levels(double lo, double hi, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) v[std::size_t(j)] = lo + (hi - lo) * double(j) / double(n - 1);
    return v;
}

bool enumerable(const MpcConfig& cfg) {
    double count = 1.0;
    for (int i = 0; i < cfg.horizon; ++i) count *= double(cfg.candidates_per_step);
    return count <= double(cfg.enumeration_budget);
}

}  // namespace

MpcPlan mpc_plan(const ForwardEmulator& emu, const NarxEstimator& layout, const Eigen::VectorXd& s,
                 std::span<const double> r_traj, double u_prev, const MpcConfig& cfg) {
    cfg.validate();
    emu.require_ready("mpc_plan");
    const auto L = std::size_t(cfg.horizon);
    if (r_traj.size() != L) throw ShapeError("mpc_plan: target trajectory must have length L2");

    Search search(emu, layout, s, r_traj, u_prev, cfg);
    search.offer(std::vector<double>(L, std::clamp(u_prev, cfg.u_min, cfg.u_max)));

    const auto grid = uniform_levels(cfg.u_min, cfg.u_max, cfg.candidates_per_step);
    if (enumerable(cfg)) {
        std::vector<std::size_t> digit(L, 0);
        std::vector<double> seq(L, grid.front());
        while (true) {
            search.offer(seq);
            std::size_t pos = L;
            while (pos-- > 0) {
                if (++digit[pos] < grid.size()) {
                    seq[pos] = grid[digit[pos]];
                    break;
                }
                digit[pos] = 0;
                seq[pos] = grid.front();
            }
            if (pos == std::size_t(-1)) break;
        }
    } else {
        for (int pass = 0; pass < 100; ++pass) {
            bool improved = false;
            for (std::size_t i = 0; i < L; ++i) improved |= search.sweep_position(i, grid);
            if (!improved) break;
        }
    }

    double span = cfg.u_max - cfg.u_min;
    for (int it = 0; it < cfg.refine_iters; ++it) {
        span *= 0.5;
        for (std::size_t i = 0; i < L; ++i) {
            const double centre = search.best()[i];
            const double lo = std::max(cfg.u_min, centre - 0.5 * span);
            const double hi = std::min(cfg.u_max, centre + 0.5 * span);
            search.sweep_position(i, uniform_levels(lo, hi, cfg.candidates_per_step));
        }
    }

    MpcPlan plan;
    plan.strategy = search.best();
    plan.cost = search.best_cost();
    plan.u_apply = plan.strategy.front();
    return plan;
}

}  // namespace ncb
