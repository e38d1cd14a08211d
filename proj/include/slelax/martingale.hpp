#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "slelax/driving.hpp"
#include "slelax/lax.hpp"
#include "slelax/loewner.hpp"

namespace slelax {

// Pointwise drift bookkeeping. residual = (kappa/4) trA2 + rateF + rateTau
// is the scalar that vanishes identically at kappa = 4; a nonzero value at
// other kappa certifies the harness can detect drift.
struct DriftLedger {
    cplx trA2{0.0};
    cplx rateF{0.0};
    cplx rateTau{0.0};
    cplx residual{0.0};
};

// d log F / dt with the formal exponents alpha taken from fam.
cplx covariance_rate(const LoewnerState& lo, const LaxFamily& fam);

// Closed-form log F: sum alpha^2 log g' + s0^2 Schwarzian/6 + s0 alpha preSchwarzian.
cplx closed_form_logF(const LoewnerState& lo, const std::vector<cplx>& alpha,
                      const std::vector<cplx>& s0);

// d log tau / dt along the flow, from the partial-fraction data of Tr(A^2).
cplx tau_rate(const LoewnerState& lo, const LaxFamily& fam);

DriftLedger drift_ledger(const LoewnerState& lo, const LaxFamily& fam, double kappa = 4.0);

struct MartingaleState {
    double t = 0.0;
    Mat2 Y = Mat2::identity();
    std::optional<Mat2> Ytilde_inv;
    cplx logF{0.0};
    cplx logTau{0.0};
    Mat2 M = Mat2::identity();
    DriftLedger ledger;
};

// Co-evolves the Loewner state, the Lax family (driven by the Loewner
// velocities), the scalar ledgers, and the observable M = F tau Y
// (or F tau Ytilde^{-1} Y when a force point is present).
//
// All finite-variation quantities advance inside one RK4 sweep per step, so
// the drift exponent applied to Y cancels the accumulated logF + logTau up
// to the pointwise ledger residual; the observable is then a martingale of
// the discrete scheme up to that residual.
class CoupledRun {
public:
    CoupledRun(const LaxFamily& fam, double kappa, std::optional<double> xi = std::nullopt,
               double guard_scale = 1e-3);

    // dZ, dB, dXi are the driving increments over the step.
    void step(double dZ, double dB, double dt, double dXi = 0.0);

    const LoewnerState& lo() const { return lo_; }
    const LaxFamily& fam() const { return fam_; }
    const MartingaleState& observable() const { return ms_; }
    bool stopped() const { return lo_.stopped; }

    double max_ledger_residual() const { return max_residual_; }
    double max_alpha_drift() const { return max_alpha_drift_; }
    const std::vector<cplx>& alpha0() const { return alpha0_; }
    cplx drift_integral() const { return drift_int_; }

private:
    LoewnerState lo_;
    LaxFamily fam_;
    MartingaleState ms_;
    double kappa_;
    std::vector<cplx> alpha0_;
    cplx drift_int_{0.0};
    double max_residual_ = 0.0;
    double max_alpha_drift_ = 0.0;
    double xi_gap_sign_ = 1.0;
};

struct McConfig {
    LaxFamily fam;
    DrivingSpec driving;
    std::size_t paths = 1000;
    double guard_scale = 1e-3;
    unsigned threads = 0; // 0: hardware concurrency
};

struct McResult {
    std::size_t paths = 0;
    Mat2 mean;
    double stderr_entries[4] = {0, 0, 0, 0};
    cplx mean_trace{0.0};
    double stderr_trace = 0.0;
    double stopped_fraction = 0.0;
    double ledger_max_residual = 0.0;
    double alpha_drift_max = 0.0;
    std::vector<double> path_t_stop;   // per path, index order
    std::vector<cplx> path_trace;
};

// Sample mean and standard error of the observable at min(T, stopping time),
// one path per derived seed (config seed xor path index). Deterministic:
// the reduction runs in fixed index order regardless of thread scheduling.
McResult mc_expectation(const McConfig& config);

// Single-path trajectory of the scalar observable F tau Tr(Ytilde^{-1} Y)
// for the rho = -2 force-point driving; stops at the continuation threshold
// or when a marked point is hit.
std::vector<std::pair<double, cplx>> sle4_rho_observable(const LaxFamily& fam,
                                                         const DrivingSpec& spec,
                                                         double guard_scale = 1e-3);

} // namespace slelax
