#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "slelax/errors.hpp"

namespace slelax {

enum class DrivingKind { Zero, Table, Brownian, SleKappaRho };

struct DrivingSpec {
    DrivingKind kind = DrivingKind::Zero;
    double kappa = 4.0;
    double rho = 0.0;    // SleKappaRho only
    double xi0 = 0.0;    // SleKappaRho only, must be nonzero
    std::vector<double> samples; // Table only: Z values on the grid
    double dt = 1e-3;
    double T = 1.0;
    uint64_t seed = 1;

    void validate() const; // throws InvalidSpec
};

// Sampled driving process on the uniform grid t_k = k*dt. For SleKappaRho the
// pair (Z, Xi) is advanced jointly by Euler-Maruyama and may terminate early
// at the continuation threshold |Xi - Z| -> 0.
struct DrivingPath {
    double dt = 0.0;
    double kappa = 4.0;
    std::vector<double> t;
    std::vector<double> Z;
    std::vector<double> B;               // underlying standard Brownian motion
    std::vector<double> Xi;              // empty unless SleKappaRho
    bool hit_continuation_threshold = false;

    std::size_t n_steps() const { return t.empty() ? 0 : t.size() - 1; }
};

DrivingPath sample_driving(const DrivingSpec& spec);

} // namespace slelax
