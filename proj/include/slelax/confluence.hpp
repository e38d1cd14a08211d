#pragma once

#include <vector>

#include "slelax/lax.hpp"

namespace slelax {

// Fuchsian approximants whose coalescing simple poles reproduce a given
// higher-order pole, with the Birkhoff invariant as rate of confluence.
struct ConfluenceSpec {
    Mat2 target_A0;
    Mat2 target_A1;
    cplx s{1.0};          // rate of confluence
    double epsilon = 1e-2;
    cplx base_lambda{0.0};
    int k = 1;            // rank of the target pole
};

struct DoublePoleSplit {
    Mat2 A1, A2;       // residues of the two simple poles
    cplx lambda1, lambda2;
};

// Exact split: A1 + A2 = target_A0, eps*s*A2 = target_A1,
// poles at base_lambda and base_lambda + eps*s.
DoublePoleSplit split_double_pole(const ConfluenceSpec& spec);

struct VandermondeSplit {
    std::vector<Mat2> A;       // k+1 simple-pole residues
    std::vector<cplx> lambda;  // lambda_j = base + eps*(j-1)*s
};

// Solves sum_j A_j = targets[0] and sum_j ((j-1) eps s)^m A_j = targets[m]
// for m = 1..k. Throws IllConditioned when the solve residual exceeds
// 1e-8 * ||targets||.
VandermondeSplit vandermonde_split(const ConfluenceSpec& spec,
                                   const std::vector<Mat2>& targets);

// Max-over-probes Frobenius mismatch between the Fuchsian Lax matrix of the
// split and the target double-pole Lax matrix, at one epsilon.
double confluence_mismatch(const ConfluenceSpec& spec, double eps,
                           const std::vector<cplx>& probes);

struct ConfluenceRate {
    std::vector<double> eps;
    std::vector<double> mismatch;
    double slope = 0.0; // least-squares slope of log mismatch vs log eps
};

ConfluenceRate confluence_rate(const ConfluenceSpec& spec,
                               const std::vector<cplx>& probes,
                               const std::vector<double>& eps_ladder);

} // namespace slelax
