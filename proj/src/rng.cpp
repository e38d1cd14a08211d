#include "slelax/rng.hpp"

#include <cmath>

namespace slelax {

uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

uint64_t hash_key(uint64_t seed, uint64_t a, uint64_t b) {
    uint64_t h = splitmix64(seed ^ 0x6a09e667f3bcc909ULL);
    h = splitmix64(h ^ a);
    h = splitmix64(h ^ b);
    return h;
}

double uniform01(uint64_t h) {
    return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
}

double normal_at(uint64_t seed, uint64_t a, uint64_t b) {
    double u1 = uniform01(hash_key(seed, a, 2 * b));
    double u2 = uniform01(hash_key(seed, a, 2 * b + 1));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

std::vector<double> brownian_bridge_path(uint64_t seed, double dt, std::size_t n_steps) {
    if (n_steps == 0)
        return {0.0};

    // Smallest dyadic grid covering the requested one.
    int levels = 0;
    std::size_t cap = 1;
    while (cap < n_steps) {
        cap <<= 1;
        ++levels;
    }

    std::vector<double> b(cap + 1, 0.0);
    double top_span = static_cast<double>(cap) * dt;
    b[cap] = std::sqrt(top_span) * normal_at(seed, 0, 0);

    for (int depth = 1; depth <= levels; ++depth) {
        std::size_t stride = cap >> depth;       // half of the parent spacing
        double parent_h = top_span / static_cast<double>(std::size_t{1} << (depth - 1));
        double half_sd = 0.5 * std::sqrt(parent_h);
        std::size_t n_mid = std::size_t{1} << (depth - 1);
        for (std::size_t j = 0; j < n_mid; ++j) {
            std::size_t left = 2 * j * stride;
            std::size_t mid = left + stride;
            std::size_t right = left + 2 * stride;
            b[mid] = 0.5 * (b[left] + b[right]) +
                     half_sd * normal_at(seed, static_cast<uint64_t>(depth), j);
        }
    }

    b.resize(n_steps + 1);
    return b;
}

} // namespace slelax
