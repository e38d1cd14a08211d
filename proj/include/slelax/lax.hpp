#pragma once

#include <array>
#include <string>
#include <vector>

#include "slelax/algebra.hpp"

namespace slelax {

// Rank-one isomonodromic configuration on the punctured sphere:
//   dY/dz = A(z) Y,  A(z) = sum_i [ A0_i/(z-lambda_i) + A1_i/(z-lambda_i)^2 ].
// s_i is the Birkhoff invariant of pole i (eigenvalue of A1_i with the
// Re >= 0 branch at construction; afterwards continued along deformations,
// since the flow may leave the half-plane). alpha_i is the formal exponent,
// defined operationally as Tr(A0_i A1_i) / (2 s_i), which is the combination
// every downstream formula consumes.
struct LaxFamily {
    std::vector<cplx> lambda;
    std::vector<Mat2> A0;
    std::vector<Mat2> A1;
    std::vector<cplx> s;

    std::size_t n() const { return lambda.size(); }
    cplx alpha(std::size_t i) const;
    void validate() const;
};

LaxFamily make_lax_family(const std::vector<cplx>& lambda,
                          const std::vector<Mat2>& A0,
                          const std::vector<Mat2>& A1);

Mat2 lax_eval(const LaxFamily& fam, cplx z);           // throws PoleHit
Mat2 deformation_U(const LaxFamily& fam, cplx z, std::size_t i);
Mat2 deformation_V(const LaxFamily& fam, cplx z, std::size_t i); // throws ZeroBirkhoff

// Partial-fraction coefficients of Tr(A(z)^2) = sum_{i,k} ell[i][k-1]/(z-lambda_i)^k.
struct TraceSquareCoeffs {
    std::vector<std::array<cplx, 4>> ell;
    cplx at(std::size_t i, int k) const { return ell[i][static_cast<std::size_t>(k - 1)]; }
};

TraceSquareCoeffs trace_square_coeffs(const LaxFamily& fam);

struct Hamiltonians {
    std::vector<cplx> H_lambda; // ell_{i,1} / 2
    std::vector<cplx> H_s;      // ell_{i,2}/(2 s_i) - ell_{i,3}^2/(16 s_i^3)
};

Hamiltonians hamiltonians(const LaxFamily& fam);

struct CoeffDeriv {
    Mat2 dA0, dA1;
};

// Total differentials of all coefficient matrices under the deformation flow,
// contracted against the velocities (dlambda, ds).
std::vector<CoeffDeriv> schlesinger_rhs(const LaxFamily& fam,
                                        const std::vector<cplx>& dlambda,
                                        const std::vector<cplx>& ds);

// One RK4 step along the straight segment from (lambda, s) to
// (lambda + dlambda, s + ds). The increments already include the step size.
LaxFamily advance_isomonodromy(const LaxFamily& fam,
                               const std::vector<cplx>& dlambda,
                               const std::vector<cplx>& ds);

// d log tau contracted with the velocities: sum H_lambda dlambda + H_s ds.
cplx tau_increment(const LaxFamily& fam,
                   const std::vector<cplx>& dlambda,
                   const std::vector<cplx>& ds);

// Family JSON: {"poles":[{"lambda":[re,im],"A0":[[..]],"A1":[[..]]}],
//               "regular_at_infinity": bool}, complex entries as [re,im].
LaxFamily lax_family_from_json_text(const std::string& text);
std::string lax_family_to_json_text(const LaxFamily& fam, bool regular_at_infinity = false);

} // namespace slelax
