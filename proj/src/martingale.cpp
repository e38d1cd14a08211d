#include "slelax/martingale.hpp"

#include <atomic>
#include <cmath>
#include <thread>

namespace slelax {

namespace {

cplx rate_F_vals(const std::vector<cplx>& Lambda, const std::vector<cplx>& S,
                 const std::vector<cplx>& alpha, double z) {
    cplx out{0.0};
    for (std::size_t i = 0; i < Lambda.size(); ++i) {
        cplx w = Lambda[i] - z;
        cplx w2 = w * w;
        out += -2.0 * (alpha[i] * alpha[i] / w2 + S[i] * S[i] / (w2 * w2) -
                       2.0 * alpha[i] * S[i] / (w2 * w));
    }
    return out;
}

cplx rate_tau_vals(const TraceSquareCoeffs& c, const std::vector<cplx>& Lambda,
                   const std::vector<cplx>& S, double z) {
    cplx out{0.0};
    for (std::size_t i = 0; i < Lambda.size(); ++i) {
        if (std::abs(S[i]) < 1e-12)
            throw ZeroBirkhoff("tau rate undefined at S = 0");
        cplx w = Lambda[i] - z;
        cplx w2 = w * w;
        out += c.at(i, 1) / w - c.at(i, 2) / w2 +
               c.at(i, 3) * c.at(i, 3) / (8.0 * S[i] * S[i] * w2);
    }
    return out;
}

cplx trace_A2_at(const LaxFamily& fam, double z) {
    if (fam.n() == 0)
        return {0.0};
    Mat2 a = lax_eval(fam, z);
    return trace_product(a, a);
}

Mat2 dz_lax(const LaxFamily& fam, cplx z) {
    Mat2 out = Mat2::zero();
    for (std::size_t i = 0; i < fam.n(); ++i) {
        cplx w = z - fam.lambda[i];
        cplx w2 = w * w;
        out += (-1.0 / w2) * fam.A0[i] + (-2.0 / (w2 * w)) * fam.A1[i];
    }
    return out;
}

Mat2 expm2(const Mat2& h) {
    double nrm = h.frobenius();
    int squarings = 0;
    Mat2 x = h;
    while (nrm > 0.25) {
        x = 0.5 * x;
        nrm *= 0.5;
        ++squarings;
    }
    Mat2 acc = Mat2::identity();
    Mat2 term = Mat2::identity();
    for (int k = 1; k <= 9; ++k) {
        term = (1.0 / static_cast<double>(k)) * (term * x);
        acc += term;
    }
    for (int i = 0; i < squarings; ++i)
        acc = acc * acc;
    return acc;
}

// complete deterministic generator drift of Y at the current point, minus
// the trA2 part that gets exponentiated separately
Mat2 y_drift_rest(const LaxFamily& fam, const std::vector<cplx>& S, double z, double kappa) {
    if (fam.n() == 0)
        return Mat2::zero();
    Mat2 a = lax_eval(fam, z);
    Mat2 drift = (0.5 * kappa) * (dz_lax(fam, z) + a * a);
    for (std::size_t i = 0; i < fam.n(); ++i) {
        cplx w = fam.lambda[i] - z;
        drift += (2.0 / w) * deformation_U(fam, z, i);
        drift += (-2.0 * S[i] / (w * w)) * deformation_V(fam, z, i);
    }
    cplx tr2 = trace_product(a, a);
    return drift - Mat2::diag(tr2, tr2);
}

// generator of Ytilde^{-1} (right factor): A(xi) xidot + sum U_i(xi) Lambdadot
// + sum V_i(xi) Sdot
Mat2 ytilde_generator(const LaxFamily& fam, const std::vector<cplx>& S, double xi,
                      double z, double xidot) {
    Mat2 g = xidot * lax_eval(fam, xi);
    for (std::size_t i = 0; i < fam.n(); ++i) {
        cplx w = fam.lambda[i] - z;
        g += (2.0 / w) * deformation_U(fam, xi, i);
        g += (-2.0 * S[i] / (w * w)) * deformation_V(fam, xi, i);
    }
    return g;
}

} // namespace

cplx covariance_rate(const LoewnerState& lo, const LaxFamily& fam) {
    if (lo.stopped)
        throw Stopped("covariance rate on a stopped state");
    std::vector<cplx> alpha(fam.n());
    for (std::size_t i = 0; i < fam.n(); ++i)
        alpha[i] = fam.alpha(i);
    return rate_F_vals(lo.Lambda, lo.S, alpha, lo.Z);
}

cplx closed_form_logF(const LoewnerState& lo, const std::vector<cplx>& alpha,
                      const std::vector<cplx>& s0) {
    cplx out{0.0};
    for (std::size_t i = 0; i < lo.n(); ++i) {
        out += alpha[i] * alpha[i] * std::log(lo.gprime[i]);
        out += s0[i] * s0[i] / 6.0 * lo.schwarz[i];
        out += s0[i] * alpha[i] * lo.preschwarz[i];
    }
    return out;
}

cplx tau_rate(const LoewnerState& lo, const LaxFamily& fam) {
    if (lo.stopped)
        throw Stopped("tau rate on a stopped state");
    return rate_tau_vals(trace_square_coeffs(fam), lo.Lambda, lo.S, lo.Z);
}

DriftLedger drift_ledger(const LoewnerState& lo, const LaxFamily& fam, double kappa) {
    DriftLedger led;
    led.trA2 = trace_A2_at(fam, lo.Z);
    led.rateF = covariance_rate(lo, fam);
    led.rateTau = tau_rate(lo, fam);
    led.residual = 0.25 * kappa * led.trA2 + led.rateF + led.rateTau;
    return led;
}

CoupledRun::CoupledRun(const LaxFamily& fam, double kappa, std::optional<double> xi,
                       double guard_scale)
    : fam_(fam), kappa_(kappa) {
    fam_.validate();
    lo_ = make_loewner_state(fam.lambda, fam.s, xi, guard_scale);
    alpha0_.resize(fam.n());
    for (std::size_t i = 0; i < fam.n(); ++i)
        alpha0_[i] = fam.alpha(i);
    if (xi) {
        ms_.Ytilde_inv = Mat2::identity();
        xi_gap_sign_ = (*xi > 0.0) ? 1.0 : -1.0;
    }
}

void CoupledRun::step(double dZ, double dB, double dt, double dXi) {
    if (lo_.stopped)
        throw Stopped("coupled run already stopped");
    if (dt < 0.0)
        throw InvalidSpec("negative dt");
    if (dt == 0.0)
        return;

    const std::size_t n = lo_.n();
    const double guard = lo_.swallow_guard;
    const double eval_guard = 0.5 * guard;

    // guards checked before committing anything, so a violating step is
    // never integrated into the observable
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(lo_.Lambda[i] - lo_.Z) < guard ||
            (lo_.Xi && std::abs(lo_.Lambda[i] - *lo_.Xi) < guard)) {
            lo_.stopped = true;
            lo_.stop_reason = StopReason::Swallow;
            return;
        }
    }
    if (lo_.Xi) {
        double gap = *lo_.Xi - lo_.Z;
        if (std::abs(gap) < guard || gap * xi_gap_sign_ <= 0.0) {
            lo_.stopped = true;
            lo_.stop_reason = StopReason::ContinuationThreshold;
            return;
        }
    }
    const double z0 = lo_.Z;
    const double xidot = dXi / dt;

    struct Snap {
        std::vector<cplx> Lambda, gprime, pre, schwarz, I;
        std::vector<Mat2> A0, A1;
        cplx logF{0.0}, logTau{0.0}, drift{0.0};
    };
    Snap base{lo_.Lambda, lo_.gprime, lo_.preschwarz, lo_.schwarz, lo_.birkhoff_integral,
              fam_.A0, fam_.A1, 0.0, 0.0, 0.0};

    auto rhs = [&](const Snap& y, double u) {
        double z = z0 + (u / dt) * dZ;
        Snap d;
        d.Lambda.resize(n);
        d.gprime.resize(n);
        d.pre.resize(n);
        d.schwarz.resize(n);
        d.I.resize(n);
        std::vector<cplx> S(n), vLambda(n), vS(n);
        LaxFamily f;
        f.lambda = y.Lambda;
        f.A0 = y.A0;
        f.A1 = y.A1;
        f.s.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            cplx w = y.Lambda[i] - z;
            if (std::abs(w) < eval_guard)
                throw StepRejected("marked point within swallow guard");
            cplx w2 = w * w;
            S[i] = lo_.s0[i] * std::exp(-y.I[i]);
            f.s[i] = S[i];
            d.Lambda[i] = 2.0 / w;
            d.gprime[i] = -2.0 * y.gprime[i] / w2;
            d.pre[i] = 4.0 * y.gprime[i] / (w2 * w);
            d.schwarz[i] = -12.0 * y.gprime[i] * y.gprime[i] / (w2 * w2);
            d.I[i] = 2.0 / w2;
            vLambda[i] = d.Lambda[i];
            vS[i] = -2.0 * S[i] / w2;
        }
        std::vector<CoeffDeriv> dm = schlesinger_rhs(f, vLambda, vS);
        d.A0.resize(n);
        d.A1.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            d.A0[i] = dm[i].dA0;
            d.A1[i] = dm[i].dA1;
        }
        d.logF = rate_F_vals(y.Lambda, S, alpha0_, z);
        d.logTau = n ? rate_tau_vals(trace_square_coeffs(f), y.Lambda, S, z) : cplx{0.0};
        d.drift = trace_A2_at(f, z);
        return d;
    };

    auto shifted = [&](const Snap& y, const Snap& d, double w) {
        Snap s = y;
        for (std::size_t i = 0; i < n; ++i) {
            s.Lambda[i] += w * d.Lambda[i];
            s.gprime[i] += w * d.gprime[i];
            s.pre[i] += w * d.pre[i];
            s.schwarz[i] += w * d.schwarz[i];
            s.I[i] += w * d.I[i];
            s.A0[i] += w * d.A0[i];
            s.A1[i] += w * d.A1[i];
        }
        return s;
    };

    // Everything needed for the Y update, frozen at the step start.
    Mat2 A_start = n ? lax_eval(fam_, z0) : Mat2::zero();
    Mat2 D_start = y_drift_rest(fam_, lo_.S, z0, kappa_);
    Mat2 G_tilde_start = Mat2::zero();
    if (ms_.Ytilde_inv)
        G_tilde_start = ytilde_generator(fam_, lo_.S, *lo_.Xi, z0, xidot);

    Snap k1, k2, k3, k4;
    try {
        k1 = rhs(base, 0.0);
        k2 = rhs(shifted(base, k1, 0.5 * dt), 0.5 * dt);
        k3 = rhs(shifted(base, k2, 0.5 * dt), 0.5 * dt);
        k4 = rhs(shifted(base, k3, dt), dt);
    } catch (const StepRejected&) {
        lo_.stopped = true;
        lo_.stop_reason = StopReason::Swallow;
        return;
    }

    // ledger bookkeeping from the step-start evaluation
    DriftLedger led;
    led.trA2 = k1.drift;
    led.rateF = k1.logF;
    led.rateTau = k1.logTau;
    led.residual = 0.25 * kappa_ * led.trA2 + led.rateF + led.rateTau;
    ms_.ledger = led;
    max_residual_ = std::max(max_residual_,
                             std::abs(led.residual) / std::max(1.0, std::abs(led.trA2)));

    auto mix = [&](auto pick) {
        return (dt / 6.0) * (pick(k1) + 2.0 * pick(k2) + 2.0 * pick(k3) + pick(k4));
    };

    // Near-swallow steps can produce finite but astronomically large rate
    // integrands just above the geometric guard; committing them overflows
    // the exponentials. Stop conservatively instead.
    {
        cplx dlogF = mix([](const Snap& s) { return s.logF; });
        cplx dlogTau = mix([](const Snap& s) { return s.logTau; });
        cplx ddrift = mix([](const Snap& s) { return s.drift; });
        bool sane = is_finite(dlogF) && is_finite(dlogTau) && is_finite(ddrift) &&
                    std::abs(dlogF) < 30.0 && std::abs(dlogTau) < 30.0 &&
                    std::abs(ddrift) < 30.0;
        for (std::size_t i = 0; sane && i < n; ++i)
            sane = is_finite(mix([&](const Snap& s) { return s.Lambda[i]; })) &&
                   is_finite(mix([&](const Snap& s) { return s.I[i]; }));
        if (!sane) {
            lo_.stopped = true;
            lo_.stop_reason = StopReason::Swallow;
            return;
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        lo_.Lambda[i] += mix([&](const Snap& s) { return s.Lambda[i]; });
        lo_.gprime[i] += mix([&](const Snap& s) { return s.gprime[i]; });
        lo_.preschwarz[i] += mix([&](const Snap& s) { return s.pre[i]; });
        lo_.schwarz[i] += mix([&](const Snap& s) { return s.schwarz[i]; });
        lo_.birkhoff_integral[i] += mix([&](const Snap& s) { return s.I[i]; });
        lo_.S[i] = lo_.s0[i] * std::exp(-lo_.birkhoff_integral[i]);
        fam_.A0[i] += (dt / 6.0) * (k1.A0[i] + 2.0 * k2.A0[i] + 2.0 * k3.A0[i] + k4.A0[i]);
        fam_.A1[i] += (dt / 6.0) * (k1.A1[i] + 2.0 * k2.A1[i] + 2.0 * k3.A1[i] + k4.A1[i]);
    }
    fam_.lambda = lo_.Lambda;
    fam_.s = lo_.S;

    cplx dlogF = mix([](const Snap& s) { return s.logF; });
    cplx dlogTau = mix([](const Snap& s) { return s.logTau; });
    cplx ddrift = mix([](const Snap& s) { return s.drift; });
    ms_.logF += dlogF;
    ms_.logTau += dlogTau;
    drift_int_ += ddrift;

    lo_.t += dt;
    lo_.Z += dZ;
    lo_.B += dB;
    if (lo_.Xi)
        lo_.Xi = *lo_.Xi + dXi;

    // alpha constancy bookkeeping
    for (std::size_t i = 0; i < n; ++i) {
        cplx a = trace_product(fam_.A0[i], fam_.A1[i]) / (2.0 * fam_.s[i]);
        max_alpha_drift_ = std::max(max_alpha_drift_, std::abs(a - alpha0_[i]));
    }

    // observable update: exact exponential of the integrated trA2 drift,
    // Euler-Maruyama for the noise, remainder drift D (zero at kappa = 4)
    Mat2 incr = Mat2::identity() + dZ * A_start + dt * D_start;
    ms_.Y = std::exp(ddrift) * (incr * ms_.Y);
    if (ms_.Ytilde_inv) {
        Mat2 G_end = ytilde_generator(fam_, lo_.S, *lo_.Xi, lo_.Z, xidot);
        Mat2 W = expm2((-0.5 * dt) * (G_tilde_start + G_end));
        ms_.Ytilde_inv = (*ms_.Ytilde_inv) * W;
    }
    ms_.t = lo_.t;
    cplx pref = std::exp(ms_.logF + ms_.logTau);
    ms_.M = ms_.Ytilde_inv ? pref * ((*ms_.Ytilde_inv) * ms_.Y) : pref * ms_.Y;

    // stopping at the new time
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(lo_.Lambda[i] - lo_.Z) < guard ||
            (lo_.Xi && std::abs(lo_.Lambda[i] - *lo_.Xi) < guard)) {
            lo_.stopped = true;
            lo_.stop_reason = StopReason::Swallow;
        }
    }
    if (lo_.Xi && std::abs(*lo_.Xi - lo_.Z) < guard) {
        lo_.stopped = true;
        lo_.stop_reason = StopReason::ContinuationThreshold;
    }
}

namespace {

struct PathOutcome {
    Mat2 M;
    cplx trM{0.0};
    double t_stop = 0.0;
    bool stopped = false;
    double max_residual = 0.0;
    double max_alpha_drift = 0.0;
};

PathOutcome run_one_path(const McConfig& config, std::size_t path_index) {
    DrivingSpec spec = config.driving;
    spec.seed = config.driving.seed ^ static_cast<uint64_t>(path_index);
    DrivingPath path = sample_driving(spec);

    std::optional<double> xi;
    if (spec.kind == DrivingKind::SleKappaRho)
        xi = spec.xi0;
    CoupledRun run(config.fam, spec.kappa, xi, config.guard_scale);

    for (std::size_t k = 0; k < path.n_steps(); ++k) {
        double dZ = path.Z[k + 1] - path.Z[k];
        double dB = path.B[k + 1] - path.B[k];
        double dXi = path.Xi.empty() ? 0.0 : path.Xi[k + 1] - path.Xi[k];
        run.step(dZ, dB, spec.dt, dXi);
        if (run.stopped())
            break;
    }

    PathOutcome out;
    out.M = run.observable().M;
    out.trM = out.M.trace();
    out.t_stop = run.lo().t;
    out.stopped = run.stopped() || path.hit_continuation_threshold;
    out.max_residual = run.max_ledger_residual();
    out.max_alpha_drift = run.max_alpha_drift();
    return out;
}

} // namespace

McResult mc_expectation(const McConfig& config) {
    if (config.paths < 100)
        throw InvalidConfig("need at least 100 paths");
    config.driving.validate();
    config.fam.validate();

    std::vector<PathOutcome> outcomes(config.paths);
    unsigned nthreads = config.threads ? config.threads
                                       : std::max(1u, std::thread::hardware_concurrency());
    nthreads = std::min<unsigned>(nthreads, static_cast<unsigned>(config.paths));
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            std::size_t p = next.fetch_add(1);
            if (p >= config.paths)
                return;
            outcomes[p] = run_one_path(config, p);
        }
    };
    std::vector<std::thread> pool;
    for (unsigned i = 0; i + 1 < nthreads; ++i)
        pool.emplace_back(worker);
    worker();
    for (std::thread& th : pool)
        th.join();

    // fixed-order reduction
    McResult res;
    res.paths = config.paths;
    res.path_t_stop.reserve(config.paths);
    res.path_trace.reserve(config.paths);
    cplx sum_e[4] = {}, sumsq_e[4] = {};
    cplx sum_tr{0.0};
    double sumsq_tr = 0.0;
    std::size_t stopped = 0;
    for (const PathOutcome& o : outcomes) {
        cplx e[4] = {o.M.a11, o.M.a12, o.M.a21, o.M.a22};
        for (int j = 0; j < 4; ++j) {
            sum_e[j] += e[j];
            sumsq_e[j] += cplx{e[j].real() * e[j].real(), e[j].imag() * e[j].imag()};
        }
        sum_tr += o.trM;
        sumsq_tr += std::norm(o.trM);
        if (o.stopped)
            ++stopped;
        res.ledger_max_residual = std::max(res.ledger_max_residual, o.max_residual);
        res.alpha_drift_max = std::max(res.alpha_drift_max, o.max_alpha_drift);
        res.path_t_stop.push_back(o.t_stop);
        res.path_trace.push_back(o.trM);
    }
    const double N = static_cast<double>(config.paths);
    auto entry_stats = [&](int j, cplx& mean, double& se) {
        mean = sum_e[j] / N;
        double var = (sumsq_e[j].real() + sumsq_e[j].imag()) / N - std::norm(mean);
        se = std::sqrt(std::max(0.0, var) / N);
    };
    double se[4];
    entry_stats(0, res.mean.a11, se[0]);
    entry_stats(1, res.mean.a12, se[1]);
    entry_stats(2, res.mean.a21, se[2]);
    entry_stats(3, res.mean.a22, se[3]);
    for (int j = 0; j < 4; ++j)
        res.stderr_entries[j] = se[j];
    res.mean_trace = sum_tr / N;
    double var_tr = sumsq_tr / N - std::norm(res.mean_trace);
    res.stderr_trace = std::sqrt(std::max(0.0, var_tr) / N);
    res.stopped_fraction = static_cast<double>(stopped) / N;
    return res;
}

std::vector<std::pair<double, cplx>> sle4_rho_observable(const LaxFamily& fam,
                                                         const DrivingSpec& spec,
                                                         double guard_scale) {
    if (spec.kind != DrivingKind::SleKappaRho)
        throw InvalidSpec("rho observable needs SleKappaRho driving");
    DrivingPath path = sample_driving(spec);
    CoupledRun run(fam, spec.kappa, spec.xi0, guard_scale);
    std::vector<std::pair<double, cplx>> out;
    out.emplace_back(0.0, run.observable().M.trace());
    for (std::size_t k = 0; k < path.n_steps(); ++k) {
        double dZ = path.Z[k + 1] - path.Z[k];
        double dB = path.B[k + 1] - path.B[k];
        double dXi = path.Xi[k + 1] - path.Xi[k];
        run.step(dZ, dB, spec.dt, dXi);
        if (run.stopped())
            break;
        out.emplace_back(run.lo().t, run.observable().M.trace());
    }
    return out;
}

} // namespace slelax
