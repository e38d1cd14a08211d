#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "slelax/contour.hpp"
#include "slelax/lax.hpp"

namespace slelax {

// Candidate observable as a plain function of the configuration point.
// xi is ignored by candidates without a force point.
using ZFunc = std::function<cplx(double z, std::optional<double> xi,
                                 const std::vector<cplx>& lambda,
                                 const std::vector<cplx>& s)>;

// Tabulated values of a candidate on the second-order stencil around a base
// configuration. Parameter derivatives use real-axis central differences in
// each complex coordinate (Wirtinger derivatives of a holomorphic candidate).
struct ObservableGrid {
    double z0 = 0.0;
    std::optional<double> xi0;
    std::vector<cplx> lambda;
    std::vector<cplx> s;
    double h_z = 1e-2;
    double h_param = 1e-2;

    cplx center{0.0};
    cplx z_plus{0.0}, z_minus{0.0};
    std::vector<cplx> lam_plus, lam_minus;
    std::vector<cplx> s_plus, s_minus;
    cplx xi_plus{0.0}, xi_minus{0.0};       // force-point variant only
    cplx diag_plus{0.0}, diag_minus{0.0};   // simultaneous z,xi shift
};

// Throws StencilTooCoarse when a perturbed node comes within 10 h of a pole.
ObservableGrid tabulate_observable(const ZFunc& f, double z0, std::optional<double> xi0,
                                   const std::vector<cplx>& lambda,
                                   const std::vector<cplx>& s,
                                   double h_z, double h_param);

// Confluent BPZ residual:
//   d2z Z - sum_i [ dlam_i Z/(z-l_i) + s_i ds_i Z/(z-l_i)^2
//                   + (alpha_i^2/(z-l_i)^2 + 2 s_i alpha_i/(z-l_i)^3
//                      + s_i^2/(z-l_i)^4) Z ]
cplx bpz_residual(const ObservableGrid& grid, const std::vector<cplx>& alpha);

// Same with the extra -(dz + dxi)/(z - xi) term of the force-point equation.
cplx forcepoint_pde_residual(const ObservableGrid& grid, const std::vector<cplx>& alpha);

// (dz + dxi) applied at the diagonal xi = z by a symmetric difference.
cplx diagonal_directional_derivative(const ObservableGrid& grid);

// The isomonodromic candidate tau * Tr(Y) built from a base family:
// parameters are reached by integrating the deformation equations from the
// base point (matrices, the normalization Y(z_ref) and log tau advance
// together), then Y(z) is continued from z_ref along a straight contour.
// With a force point the candidate is tau * Tr(Y^{-1}(xi) Y(z)).
ZFunc isomonodromic_Z(const LaxFamily& base, double z_ref, bool with_force_point,
                      const ContourOptions& copts = {1e-3, 1e-12},
                      int param_substeps = 8);

struct ResidualLadder {
    std::vector<double> h;
    std::vector<cplx> residual;
    double order = 0.0; // least-squares slope of log|residual| vs log h
};

ResidualLadder bpz_residual_ladder(const ZFunc& f, double z0, std::optional<double> xi0,
                                   const std::vector<cplx>& lambda,
                                   const std::vector<cplx>& s,
                                   const std::vector<cplx>& alpha,
                                   const std::vector<double>& h_ladder,
                                   bool force_point_equation = false);

} // namespace slelax
