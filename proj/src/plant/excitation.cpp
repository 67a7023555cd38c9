#include "ncb/plant/excitation.hpp"

#include <random>

#include "ncb/error.hpp"

namespace ncb {

std::vector<double> excitation(const ExcitationSpec& spec) {
    if (spec.length < 0) throw ConfigError("excitation length must be non-negative");
    if (spec.amplitude < 0.0) throw ConfigError("excitation amplitude must be non-negative");
    if (spec.kind == ExcitationKind::random_steps && spec.hold_ticks <= 0)
        throw ConfigError("random_steps excitation needs hold_ticks > 0");

    std::vector<double> out(std::size_t(spec.length), 0.0);
    if (spec.amplitude == 0.0) return out;

    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> level(-spec.amplitude, spec.amplitude);
    if (spec.kind == ExcitationKind::uniform_white) {
        for (auto& v : out) v = level(rng);
        return out;
    }
    double current = 0.0;
    for (std::size_t k = 0; k < out.size(); ++k) {
        if (k % std::size_t(spec.hold_ticks) == 0) current = level(rng);
        out[k] = current;
    }
    return out;
}

}  // namespace ncb
