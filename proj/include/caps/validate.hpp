#pragma once

// Self-contained oracle suite behind the `validate` command: the RK4 sector
// integrator against the closed-form convolution and the monochromatic
// reflection coefficient, lossless norm conservation, and the beam splitter
// round trip.

#include <string>
#include <vector>

namespace caps {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

std::vector<CheckResult> run_validation();

} // namespace caps
