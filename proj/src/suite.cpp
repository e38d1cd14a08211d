#include "slelax/suite.hpp"

#include <cmath>

#include "slelax/martingale.hpp"

namespace slelax {

namespace {

SuiteCheck check(const std::string& name, double deviation, double tol,
                 const std::string& note = "") {
    return {name, deviation <= tol, deviation, tol, note};
}

} // namespace

SuiteReport cross_module_suite(const SuiteConfig& config) {
    SuiteReport rep;

    try {
        config.fam.validate();
        rep.checks.push_back(check("family_validation", 0.0, 1.0));
    } catch (const Error& e) {
        rep.checks.push_back({"family_validation", false, 1.0, 0.0, e.what()});
        rep.all_pass = false;
        return rep; // no point in flowing an invalid family
    }

    const std::size_t n = config.fam.n();

    // one co-evolved trajectory
    DrivingPath path = sample_driving(config.driving);
    std::optional<double> xi;
    if (config.driving.kind == DrivingKind::SleKappaRho)
        xi = config.driving.xi0;
    CoupledRun run(config.fam, config.driving.kappa, xi, config.guard_scale);

    double max_s_vs_g = 0.0;
    double s_scale = 1.0;
    for (std::size_t i = 0; i < n; ++i)
        s_scale = std::max(s_scale, std::abs(config.fam.s[i]));
    for (std::size_t k = 0; k < path.n_steps(); ++k) {
        double dZ = path.Z[k + 1] - path.Z[k];
        double dB = path.B[k + 1] - path.B[k];
        double dXi = path.Xi.empty() ? 0.0 : path.Xi[k + 1] - path.Xi[k];
        run.step(dZ, dB, config.driving.dt, dXi);
        if (run.stopped())
            break;
        for (std::size_t i = 0; i < n; ++i)
            max_s_vs_g = std::max(max_s_vs_g,
                                  std::abs(run.lo().S[i] - run.lo().gprime[i] * run.lo().s0[i]));
    }

    rep.checks.push_back(check("alpha_constancy", run.max_alpha_drift(), 1e-7));
    rep.checks.push_back(check("s_vs_gprime", max_s_vs_g / s_scale, 1e-8));
    rep.checks.push_back(check("ledger_residual", run.max_ledger_residual(), 1e-6));

    cplx closed = closed_form_logF(run.lo(), run.alpha0(), run.lo().s0);
    double f_dev = std::abs(closed - run.observable().logF) /
                   std::max(1.0, std::abs(run.observable().logF));
    rep.checks.push_back(check("F_two_ways", f_dev, 1e-6));

    if (n >= 2) {
        const double h = 1e-2;
        std::vector<cplx> d1(n, cplx{0.0}), d2(n, cplx{0.0}), zs(n, cplx{0.0});
        d1[0] = h;
        d2[1] = h;
        LaxFamily ab = advance_isomonodromy(advance_isomonodromy(config.fam, d1, zs), d2, zs);
        LaxFamily ba = advance_isomonodromy(advance_isomonodromy(config.fam, d2, zs), d1, zs);
        double dev = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            dev = std::max(dev, max_entry_dist(ab.A0[i], ba.A0[i]));
            dev = std::max(dev, max_entry_dist(ab.A1[i], ba.A1[i]));
        }
        rep.checks.push_back(check("flatness", dev, 1e-8));
    }

    for (const SuiteCheck& c : rep.checks)
        if (!c.pass)
            rep.all_pass = false;
    return rep;
}

} // namespace slelax
