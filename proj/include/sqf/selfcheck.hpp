#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sqf {

// One line of the exact-identity suite: the identity's name, the worst defect
// observed across its instance grid, and whether it stayed within tolerance.
struct CheckLine {
    std::string name;
    double max_defect = 0.0;
    bool pass = false;
    std::string detail;  // failing instance or grid summary
};

// Runs the full identity suite at small scale (q <= 60, x <= 10^4). All
// randomness (sampled instances) flows from `seed`. `inject_mu_fault`
// deliberately corrupts one Mobius value first, to prove the suite notices.
std::vector<CheckLine> run_selfcheck(uint64_t seed = 1, bool inject_mu_fault = false);

}  // namespace sqf
