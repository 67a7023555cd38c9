#include "ncb/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "ncb/nn/mlp.hpp"

namespace ncb {

namespace {

using Real = long double;
using VectorR = Mlp<Real>::Vector;

double relative_error(double analytic, Real reference) {
    const Real diff = std::abs(Real(analytic) - reference);
    if (std::abs(reference) <= Real(1e-8)) return double(diff);
    return double(diff / std::max(std::abs(reference), std::abs(Real(analytic))));
}

// Loss is the projection c . net(x); its output gradient is c.
Real projected(const Mlp<Real>& net, const VectorR& x, const VectorR& c) { return c.dot(net(x)); }

}  // namespace

bool GradcheckReport::passed() const {
    return !cases.empty() &&
           std::all_of(cases.begin(), cases.end(), [](const GradcheckCase& c) { return c.passed; });
}

GradcheckReport run_gradcheck(int cases, std::uint64_t seed, double h, double tolerance) {
    GradcheckReport report;
    report.tolerance = tolerance;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> width(1, 6);
    std::uniform_int_distribution<int> hidden_layers(0, 2);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);

    for (int n = 0; n < cases; ++n) {
        GradcheckCase result;
        const int hidden = hidden_layers(rng);
        result.dims.push_back(width(rng));
        for (int l = 0; l < hidden; ++l) result.dims.push_back(width(rng));
        result.dims.push_back(std::uniform_int_distribution<int>(1, 3)(rng));
        std::vector<Activation> acts(result.dims.size() - 1, Activation::tanh);
        if (rng() % 2) acts.back() = Activation::linear;

        Mlpd net = Mlpd::random(result.dims, acts, rng(), 0.9);
        for (auto& l : net.layers())
            for (Eigen::Index i = 0; i < l.bias.size(); ++i) l.bias[i] = 0.3 * unit(rng);

        Eigen::VectorXd x(result.dims.front());
        for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = unit(rng);
        Eigen::VectorXd c(result.dims.back());
        for (Eigen::Index i = 0; i < c.size(); ++i) c[i] = unit(rng);

        const auto fwd = forward(net, x);
        const Gradientsd grads = backward_weights(net, fwd.cache, c);
        const Eigen::VectorXd input_grad = backward_inputs(net, fwd.cache, c);

        const Mlp<Real> ref = scalar_cast<Real>(net);
        const VectorR xr = x.cast<Real>();
        const VectorR cr = c.cast<Real>();
        const Real step = Real(h);

        VectorR params = flatten_parameters(ref);
        Mlp<Real> probe = ref;
        Eigen::VectorXd analytic(params.size());
        {
            Eigen::Index at = 0;
            for (std::size_t l = 0; l < grads.weights.size(); ++l) {
                analytic.segment(at, grads.weights[l].size()) = grads.weights[l].reshaped();
                at += grads.weights[l].size();
                analytic.segment(at, grads.bias[l].size()) = grads.bias[l];
                at += grads.bias[l].size();
            }
        }
        for (Eigen::Index i = 0; i < params.size(); ++i) {
            VectorR p = params;
            p[i] += step;
            assign_parameters(probe, p);
            const Real up = projected(probe, xr, cr);
            p[i] -= 2 * step;
            assign_parameters(probe, p);
            const Real down = projected(probe, xr, cr);
            const Real fd = (up - down) / (2 * step);
            result.max_weight_rel_error = std::max(result.max_weight_rel_error, relative_error(analytic[i], fd));
        }
        for (Eigen::Index i = 0; i < xr.size(); ++i) {
            VectorR xp = xr;
            xp[i] += step;
            const Real up = projected(ref, xp, cr);
            xp[i] -= 2 * step;
            const Real down = projected(ref, xp, cr);
            const Real fd = (up - down) / (2 * step);
            result.max_input_rel_error = std::max(result.max_input_rel_error, relative_error(input_grad[i], fd));
            result.max_input_rel_error =
                std::max(result.max_input_rel_error, relative_error(grads.input[i], fd));
        }
        result.passed = result.max_weight_rel_error < tolerance && result.max_input_rel_error < tolerance;
        report.cases.push_back(std::move(result));
    }
    return report;
}

}  // namespace ncb
