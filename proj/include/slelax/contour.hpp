#pragma once

#include <vector>

#include "slelax/lax.hpp"

namespace slelax {

struct ContourOptions {
    double margin = 1e-3;    // minimum distance contour -> punctures
    double local_tol = 1e-10; // per-step error estimate threshold
};

// Solves dY/dz = A(z) Y along the polyline with Y(start) = Y0, by adaptive
// RK4 with step-doubling error control. Step length is capped at one tenth of
// the distance to the nearest pole. det Y is preserved up to integration
// error since Tr A = 0.
Mat2 integrate_Y_in_z(const LaxFamily& fam, const std::vector<cplx>& contour,
                      const Mat2& Y0, const ContourOptions& opts = {});

} // namespace slelax
