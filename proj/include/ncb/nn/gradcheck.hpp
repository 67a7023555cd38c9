#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ncb {

struct GradcheckCase {
    std::vector<int> dims;
    double max_weight_rel_error = 0.0;
    double max_input_rel_error = 0.0;
    bool passed = false;
};

struct GradcheckReport {
    std::vector<GradcheckCase> cases;
    double tolerance = 1e-6;
    bool passed() const;
};

// Central differences (step h) against both reverse passes on `cases` random
// tanh/linear networks. Entries whose difference quotient is below 1e-8 in
// magnitude are compared absolutely.
GradcheckReport run_gradcheck(int cases, std::uint64_t seed, double h = 1e-5, double tolerance = 1e-6);

}  // namespace ncb
