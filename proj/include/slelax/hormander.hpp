#pragma once

#include <vector>

#include "slelax/algebra.hpp"

namespace slelax {

// Coefficient matrix of the iterated commutators of the generator's vector
// fields, rows ell = 1..4n+1. Columns: (dz+dxi), dlambda_i, dlambda_i^*,
// ds_i, ds_i^*; the s-columns carry the (ell+1)-dependent factors.
struct HormanderConfig {
    double z = 0.0;
    double xi = 1.0;
    std::vector<cplx> lambda;
    std::vector<cplx> s;
};

std::vector<std::vector<cplx>> hormander_matrix(const HormanderConfig& cfg);

cplx hormander_determinant(const HormanderConfig& cfg);

// Hadamard bound (product of row norms); the natural scale for |det|.
double hormander_scale(const HormanderConfig& cfg);

// Numerical rank from singular values, threshold rel_tol * sigma_max.
int hormander_rank(const HormanderConfig& cfg, double rel_tol = 1e-10);

// Singular values of a square complex matrix (descending), via Jacobi
// iteration on A^H A. Small dimensions only.
std::vector<double> singular_values(const std::vector<std::vector<cplx>>& a);

} // namespace slelax
