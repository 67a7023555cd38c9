#pragma once

#include <cstdint>
#include <vector>

namespace ncb {

enum class ExcitationKind { uniform_white, random_steps };

struct ExcitationSpec {
    ExcitationKind kind = ExcitationKind::random_steps;
    double amplitude = 1.0;
    int hold_ticks = 5;  // random_steps only
    std::uint64_t seed = 0;
    int length = 0;
};

// Identification signal in [-amplitude, amplitude], deterministic per seed.
std::vector<double> excitation(const ExcitationSpec& spec);

}  // namespace ncb
