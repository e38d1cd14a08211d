#pragma once

#include <cstdint>
#include <vector>

namespace slelax {

// Counter-based generator: every drawn number is a pure function of the key,
// so streams can be evaluated out of order and in parallel.
uint64_t splitmix64(uint64_t x);
uint64_t hash_key(uint64_t seed, uint64_t a, uint64_t b);
double uniform01(uint64_t h);                      // in (0,1)
double normal_at(uint64_t seed, uint64_t a, uint64_t b); // N(0,1)

// Standard Brownian path on the grid t_k = k*dt, k = 0..n_steps, built by
// dyadic midpoint (bridge) subdivision from a fixed top span. Halving dt adds
// one subdivision level, so the refined path passes through the coarse one
// bit-identically: convergence studies can reuse "the same" path.
std::vector<double> brownian_bridge_path(uint64_t seed, double dt, std::size_t n_steps);

} // namespace slelax
