#pragma once

#include <optional>
#include <vector>

#include "slelax/algebra.hpp"
#include "slelax/driving.hpp"

namespace slelax {

enum class StopReason { None, Swallow, ContinuationThreshold };

// One time-slice of the Loewner flow of marked points. Besides the flowed
// punctures Lambda_i = g_t(lambda_i) we track the variational quantities
//   g'    : dg' = -2 g'/(Lambda-Z)^2 dt
//   A     : pre-Schwarzian g''/g',  dA = 4 g'/(Lambda-Z)^3 dt
//   Sc    : Schwarzian,             dSc = -12 g'^2/(Lambda-Z)^4 dt
//   I     : accumulated integral of 2/(Lambda-Z)^2, so S = s0 exp(-I)
// S is the flowed Birkhoff invariant; by construction S = g' s0 up to
// integration error, which is enforced as a cross-check in the tests.
struct LoewnerState {
    double t = 0.0;
    double Z = 0.0;
    double B = 0.0;
    std::vector<cplx> lambda;     // base punctures
    std::vector<cplx> Lambda;
    std::vector<cplx> gprime;
    std::vector<cplx> preschwarz;
    std::vector<cplx> schwarz;
    std::vector<cplx> birkhoff_integral;
    std::vector<cplx> s0;         // Birkhoff values at t = 0
    std::vector<cplx> S;
    std::optional<double> Xi;
    bool stopped = false;
    StopReason stop_reason = StopReason::None;
    double swallow_guard = 1e-3;

    std::size_t n() const { return lambda.size(); }
};

LoewnerState make_loewner_state(const std::vector<cplx>& lambda,
                                const std::vector<cplx>& s,
                                std::optional<double> xi = std::nullopt,
                                double guard_scale = 1e-3);

// One step of the flow: all tracked quantities are advanced by classical RK4
// with the driving increment applied as a piecewise-linear interpolant of Z
// across the step. dXi, when given, is the force-point increment taken from
// the sampled driving (so Z and Xi stay pathwise consistent).
// Throws Stopped if the state is already stopped, StepRejected if the swallow
// guard trips at an internal evaluation point.
LoewnerState advance_flow(const LoewnerState& state, double dZ, double dB, double dt,
                          double dXi = 0.0);

// Flowed Birkhoff invariant of a pole of order k+1: s_ik * exp(-k * I_i).
cplx evolve_birkhoff_general(const LoewnerState& state, std::size_t i, int k, cplx s_ik);

std::vector<LoewnerState> run_trajectory(const DrivingSpec& spec,
                                         const std::vector<cplx>& lambda,
                                         const std::vector<cplx>& s,
                                         double guard_scale = 1e-3);

} // namespace slelax
