#include "slelax/loewner.hpp"

#include <cmath>

namespace slelax {

namespace {

struct PointDeriv {
    cplx Lambda, gprime, pre, schwarz, integral;
};

// Right-hand side of the variational system at driving value z.
PointDeriv flow_rhs(cplx Lambda, cplx gprime, double z, double guard) {
    cplx w = Lambda - z;
    if (std::abs(w) < guard)
        throw StepRejected("marked point within swallow guard of the driving point");
    cplx w2 = w * w;
    PointDeriv d;
    d.Lambda = 2.0 / w;
    d.gprime = -2.0 * gprime / w2;
    d.pre = 4.0 * gprime / (w2 * w);
    d.schwarz = -12.0 * gprime * gprime / (w2 * w2);
    d.integral = 2.0 / w2;
    return d;
}

} // namespace

LoewnerState make_loewner_state(const std::vector<cplx>& lambda,
                                const std::vector<cplx>& s,
                                std::optional<double> xi,
                                double guard_scale) {
    if (s.size() != lambda.size())
        throw DegenerateConfig("lambda and s must have equal length");
    for (std::size_t i = 0; i < lambda.size(); ++i) {
        if (!is_finite(lambda[i]) || !is_finite(s[i]))
            throw DegenerateConfig("non-finite puncture data");
        for (std::size_t j = i + 1; j < lambda.size(); ++j)
            if (std::abs(lambda[i] - lambda[j]) < 1e-12)
                throw DegenerateConfig("coincident punctures");
    }

    LoewnerState st;
    st.lambda = lambda;
    st.Lambda = lambda;
    st.s0 = s;
    st.S = s;
    st.gprime.assign(lambda.size(), cplx{1.0});
    st.preschwarz.assign(lambda.size(), cplx{0.0});
    st.schwarz.assign(lambda.size(), cplx{0.0});
    st.birkhoff_integral.assign(lambda.size(), cplx{0.0});
    st.Xi = xi;

    double min_dist = 1.0;
    bool have = false;
    for (const cplx& l : lambda) {
        double d = std::abs(l);
        if (d < 1e-12)
            throw DegenerateConfig("puncture coincides with the curve start");
        min_dist = have ? std::min(min_dist, d) : d;
        have = true;
    }
    if (xi) {
        double d = std::abs(*xi);
        min_dist = have ? std::min(min_dist, d) : d;
        have = true;
    }
    st.swallow_guard = guard_scale * (have ? min_dist : 1.0);
    return st;
}

LoewnerState advance_flow(const LoewnerState& state, double dZ, double dB, double dt,
                          double dXi) {
    if (state.stopped)
        throw Stopped("flow already stopped");
    if (dt < 0.0)
        throw InvalidSpec("negative dt");
    LoewnerState st = state;
    if (dt == 0.0)
        return st;

    const std::size_t n = st.n();
    const double guard = st.swallow_guard;
    // The stopping decision is made on committed states (adapted); internal
    // evaluation points only reject at half the guard so that rejection is a
    // rare excursion event, not a routine censoring of the increment.
    const double eval_guard = 0.5 * guard;
    // Z interpolated linearly across the step.
    auto z_at = [&](double u) { return state.Z + (u / dt) * dZ; };

    for (std::size_t i = 0; i < n; ++i) {
        cplx L = state.Lambda[i], g = state.gprime[i];
        PointDeriv k1 = flow_rhs(L, g, z_at(0.0), eval_guard);
        PointDeriv k2 = flow_rhs(L + 0.5 * dt * k1.Lambda, g + 0.5 * dt * k1.gprime,
                                 z_at(0.5 * dt), eval_guard);
        PointDeriv k3 = flow_rhs(L + 0.5 * dt * k2.Lambda, g + 0.5 * dt * k2.gprime,
                                 z_at(0.5 * dt), eval_guard);
        PointDeriv k4 = flow_rhs(L + dt * k3.Lambda, g + dt * k3.gprime, z_at(dt), eval_guard);

        auto mix = [&](cplx a, cplx b, cplx c, cplx d) {
            return (dt / 6.0) * (a + 2.0 * b + 2.0 * c + d);
        };
        st.Lambda[i] = L + mix(k1.Lambda, k2.Lambda, k3.Lambda, k4.Lambda);
        st.gprime[i] = g + mix(k1.gprime, k2.gprime, k3.gprime, k4.gprime);
        st.preschwarz[i] = state.preschwarz[i] + mix(k1.pre, k2.pre, k3.pre, k4.pre);
        st.schwarz[i] = state.schwarz[i] + mix(k1.schwarz, k2.schwarz, k3.schwarz, k4.schwarz);
        st.birkhoff_integral[i] =
            state.birkhoff_integral[i] + mix(k1.integral, k2.integral, k3.integral, k4.integral);
        st.S[i] = st.s0[i] * std::exp(-st.birkhoff_integral[i]);
    }

    st.t = state.t + dt;
    st.Z = state.Z + dZ;
    st.B = state.B + dB;
    if (st.Xi)
        st.Xi = *st.Xi + dXi;

    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(st.Lambda[i] - st.Z) < guard ||
            (st.Xi && std::abs(st.Lambda[i] - *st.Xi) < guard)) {
            st.stopped = true;
            st.stop_reason = StopReason::Swallow;
        }
    }
    if (st.Xi && std::abs(*st.Xi - st.Z) < guard) {
        st.stopped = true;
        st.stop_reason = StopReason::ContinuationThreshold;
    }
    return st;
}

cplx evolve_birkhoff_general(const LoewnerState& state, std::size_t i, int k, cplx s_ik) {
    if (i >= state.n())
        throw IndexOutOfRange("puncture index");
    if (k < 1)
        throw IndexOutOfRange("pole rank must be >= 1");
    return s_ik * std::exp(-static_cast<double>(k) * state.birkhoff_integral[i]);
}

std::vector<LoewnerState> run_trajectory(const DrivingSpec& spec,
                                         const std::vector<cplx>& lambda,
                                         const std::vector<cplx>& s,
                                         double guard_scale) {
    DrivingPath path = sample_driving(spec);
    std::optional<double> xi;
    if (spec.kind == DrivingKind::SleKappaRho)
        xi = spec.xi0;

    LoewnerState st = make_loewner_state(lambda, s, xi, guard_scale);
    std::vector<LoewnerState> out;
    out.reserve(path.n_steps() + 1);
    out.push_back(st);

    for (std::size_t k = 0; k < path.n_steps(); ++k) {
        double dZ = path.Z[k + 1] - path.Z[k];
        double dB = path.B[k + 1] - path.B[k];
        double dXi = path.Xi.empty() ? 0.0 : path.Xi[k + 1] - path.Xi[k];
        try {
            st = advance_flow(st, dZ, dB, spec.dt, dXi);
        } catch (const StepRejected&) {
            st.stopped = true;
            st.stop_reason = StopReason::Swallow;
            out.back() = st;
            break;
        }
        out.push_back(st);
        if (st.stopped)
            break;
    }
    if (path.hit_continuation_threshold && !st.stopped) {
        out.back().stopped = true;
        out.back().stop_reason = StopReason::ContinuationThreshold;
    }
    return out;
}

} // namespace slelax
