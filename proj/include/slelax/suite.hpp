#pragma once

#include <string>
#include <vector>

#include "slelax/driving.hpp"
#include "slelax/lax.hpp"

namespace slelax {

struct SuiteCheck {
    std::string name;
    bool pass = false;
    double deviation = 0.0;
    double tolerance = 0.0;
    std::string note;
};

struct SuiteReport {
    std::vector<SuiteCheck> checks;
    bool all_pass = true;
};

struct SuiteConfig {
    LaxFamily fam;
    DrivingSpec driving;
    double guard_scale = 1e-3;
};

// Cross-module consistency checks along one co-evolved trajectory:
// family validation, alpha constancy, S vs g' s0, drift-ledger residual,
// closed-form F vs integrated rate, deformation flatness (n >= 2).
// Check failures are data, not exceptions.
SuiteReport cross_module_suite(const SuiteConfig& config);

} // namespace slelax
