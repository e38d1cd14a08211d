#include "slelax/bpz.hpp"

#include <cmath>

namespace slelax {

namespace {

// Evaluation nodes must keep 10h clearance from every pole, allowing for the
// pole itself being displaced by up to h_param; poles must stay separated.
void check_margins(double z0, const std::optional<double>& xi0,
                   const std::vector<cplx>& lambda, double h_z, double h_param) {
    double h = std::max(h_z, h_param);
    std::vector<cplx> eval_pts = {cplx{z0}, cplx{z0 + h_z}, cplx{z0 - h_z}};
    if (xi0) {
        eval_pts.push_back(cplx{*xi0});
        eval_pts.push_back(cplx{*xi0 + h_z});
        eval_pts.push_back(cplx{*xi0 - h_z});
    }
    for (const cplx& e : eval_pts)
        for (const cplx& l : lambda)
            if (std::abs(e - l) - h_param < 10.0 * h)
                throw StencilTooCoarse("stencil node within 10h of a pole");
    for (std::size_t i = 0; i < lambda.size(); ++i)
        for (std::size_t j = i + 1; j < lambda.size(); ++j)
            if (std::abs(lambda[i] - lambda[j]) - 2.0 * h_param < 10.0 * h)
                throw StencilTooCoarse("poles within 10h of each other");
}

double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    double denom = n * sxx - sx * sx;
    if (std::abs(denom) < 1e-30)
        throw DegenerateFit("ladder not spread");
    return (n * sxy - sx * sy) / denom;
}

} // namespace

ObservableGrid tabulate_observable(const ZFunc& f, double z0, std::optional<double> xi0,
                                   const std::vector<cplx>& lambda,
                                   const std::vector<cplx>& s,
                                   double h_z, double h_param) {
    const std::size_t n = lambda.size();
    check_margins(z0, xi0, lambda, h_z, h_param);

    ObservableGrid g;
    g.z0 = z0;
    g.xi0 = xi0;
    g.lambda = lambda;
    g.s = s;
    g.h_z = h_z;
    g.h_param = h_param;

    g.center = f(z0, xi0, lambda, s);
    g.z_plus = f(z0 + h_z, xi0, lambda, s);
    g.z_minus = f(z0 - h_z, xi0, lambda, s);

    g.lam_plus.resize(n);
    g.lam_minus.resize(n);
    g.s_plus.resize(n);
    g.s_minus.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<cplx> lam = lambda;
        lam[i] = lambda[i] + h_param;
        g.lam_plus[i] = f(z0, xi0, lam, s);
        lam[i] = lambda[i] - h_param;
        g.lam_minus[i] = f(z0, xi0, lam, s);

        std::vector<cplx> sv = s;
        sv[i] = s[i] + h_param;
        g.s_plus[i] = f(z0, xi0, lambda, sv);
        sv[i] = s[i] - h_param;
        g.s_minus[i] = f(z0, xi0, lambda, sv);
    }
    if (xi0) {
        g.xi_plus = f(z0, *xi0 + h_z, lambda, s);
        g.xi_minus = f(z0, *xi0 - h_z, lambda, s);
        g.diag_plus = f(z0 + h_z, *xi0 + h_z, lambda, s);
        g.diag_minus = f(z0 - h_z, *xi0 - h_z, lambda, s);
    }
    return g;
}

namespace {

cplx residual_common(const ObservableGrid& g, const std::vector<cplx>& alpha) {
    cplx d2z = (g.z_plus - 2.0 * g.center + g.z_minus) / (g.h_z * g.h_z);
    cplx acc = d2z;
    for (std::size_t i = 0; i < g.lambda.size(); ++i) {
        cplx w = g.z0 - g.lambda[i];
        cplx w2 = w * w;
        cplx dlam = (g.lam_plus[i] - g.lam_minus[i]) / (2.0 * g.h_param);
        cplx ds = (g.s_plus[i] - g.s_minus[i]) / (2.0 * g.h_param);
        cplx potential = alpha[i] * alpha[i] / w2 + 2.0 * g.s[i] * alpha[i] / (w2 * w) +
                         g.s[i] * g.s[i] / (w2 * w2);
        acc -= dlam / w + g.s[i] * ds / w2 + potential * g.center;
    }
    return acc;
}

} // namespace

cplx bpz_residual(const ObservableGrid& grid, const std::vector<cplx>& alpha) {
    if (alpha.size() != grid.lambda.size())
        throw InvalidConfig("alpha list must match the punctures");
    return residual_common(grid, alpha);
}

cplx forcepoint_pde_residual(const ObservableGrid& grid, const std::vector<cplx>& alpha) {
    if (!grid.xi0)
        throw InvalidConfig("grid has no force point");
    if (alpha.size() != grid.lambda.size())
        throw InvalidConfig("alpha list must match the punctures");
    cplx dz = (grid.z_plus - grid.z_minus) / (2.0 * grid.h_z);
    cplx dxi = (grid.xi_plus - grid.xi_minus) / (2.0 * grid.h_z);
    return residual_common(grid, alpha) - (dz + dxi) / (grid.z0 - *grid.xi0);
}

cplx diagonal_directional_derivative(const ObservableGrid& grid) {
    if (!grid.xi0)
        throw InvalidConfig("grid has no force point");
    return (grid.diag_plus - grid.diag_minus) / (2.0 * grid.h_z);
}

ZFunc isomonodromic_Z(const LaxFamily& base, double z_ref, bool with_force_point,
                      const ContourOptions& copts, int param_substeps) {
    LaxFamily fam0 = base;
    fam0.validate();
    return [fam0, z_ref, with_force_point, copts, param_substeps](
               double z, std::optional<double> xi, const std::vector<cplx>& lambda,
               const std::vector<cplx>& s) -> cplx {
        const std::size_t n = fam0.n();
        if (lambda.size() != n || s.size() != n)
            throw InvalidConfig("parameter point has wrong arity");

        // Reach (lambda, s) from the base along the straight segment,
        // co-integrating the matrices, Y(z_ref) and log tau by RK4.
        LaxFamily fam = fam0;
        Mat2 yref = Mat2::identity();
        cplx logtau{0.0};
        std::vector<cplx> vlam(n), vs(n);
        for (std::size_t i = 0; i < n; ++i) {
            vlam[i] = (lambda[i] - fam0.lambda[i]) / static_cast<double>(param_substeps);
            vs[i] = (s[i] - fam0.s[i]) / static_cast<double>(param_substeps);
        }
        for (int step = 0; step < param_substeps; ++step) {
            struct St {
                std::vector<Mat2> A0, A1;
                Mat2 yref;
                cplx logtau;
            };
            St y0{fam.A0, fam.A1, yref, logtau};
            auto famAt = [&](double u, const St& st) {
                LaxFamily f;
                f.A0 = st.A0;
                f.A1 = st.A1;
                f.lambda.resize(n);
                f.s.resize(n);
                for (std::size_t i = 0; i < n; ++i) {
                    f.lambda[i] = fam.lambda[i] + u * vlam[i];
                    f.s[i] = fam.s[i] + u * vs[i];
                }
                return f;
            };
            auto rhs = [&](double u, const St& st) {
                LaxFamily f = famAt(u, st);
                St d;
                std::vector<CoeffDeriv> dm = schlesinger_rhs(f, vlam, vs);
                d.A0.resize(n);
                d.A1.resize(n);
                Mat2 gen = Mat2::zero();
                for (std::size_t i = 0; i < n; ++i) {
                    d.A0[i] = dm[i].dA0;
                    d.A1[i] = dm[i].dA1;
                    gen += vlam[i] * deformation_U(f, z_ref, i);
                    gen += vs[i] * deformation_V(f, z_ref, i);
                }
                d.yref = gen * st.yref;
                d.logtau = tau_increment(f, vlam, vs);
                return d;
            };
            auto shifted = [&](const St& a, const St& d, double w) {
                St r = a;
                for (std::size_t i = 0; i < n; ++i) {
                    r.A0[i] += w * d.A0[i];
                    r.A1[i] += w * d.A1[i];
                }
                r.yref = r.yref + w * d.yref;
                r.logtau += w * d.logtau;
                return r;
            };
            St k1 = rhs(0.0, y0);
            St k2 = rhs(0.5, shifted(y0, k1, 0.5));
            St k3 = rhs(0.5, shifted(y0, k2, 0.5));
            St k4 = rhs(1.0, shifted(y0, k3, 1.0));
            for (std::size_t i = 0; i < n; ++i) {
                fam.A0[i] += (1.0 / 6.0) * (k1.A0[i] + 2.0 * k2.A0[i] + 2.0 * k3.A0[i] + k4.A0[i]);
                fam.A1[i] += (1.0 / 6.0) * (k1.A1[i] + 2.0 * k2.A1[i] + 2.0 * k3.A1[i] + k4.A1[i]);
                fam.lambda[i] += vlam[i];
                fam.s[i] += vs[i];
            }
            yref = yref + (1.0 / 6.0) * (k1.yref + 2.0 * k2.yref + 2.0 * k3.yref + k4.yref);
            logtau += (1.0 / 6.0) * (k1.logtau + 2.0 * k2.logtau + 2.0 * k3.logtau + k4.logtau);
        }

        Mat2 yz = integrate_Y_in_z(fam, {cplx{z_ref}, cplx{z}}, yref, copts);
        if (!with_force_point)
            return std::exp(logtau) * yz.trace();
        if (!xi)
            throw InvalidConfig("candidate needs a force point value");
        Mat2 yxi = integrate_Y_in_z(fam, {cplx{z_ref}, cplx{*xi}}, yref, copts);
        return std::exp(logtau) * (yxi.inverse() * yz).trace();
    };
}

ResidualLadder bpz_residual_ladder(const ZFunc& f, double z0, std::optional<double> xi0,
                                   const std::vector<cplx>& lambda,
                                   const std::vector<cplx>& s,
                                   const std::vector<cplx>& alpha,
                                   const std::vector<double>& h_ladder,
                                   bool force_point_equation) {
    if (h_ladder.size() < 2)
        throw InvalidConfig("ladder needs at least two step sizes");
    ResidualLadder out;
    std::vector<double> mags;
    for (double h : h_ladder) {
        ObservableGrid g = tabulate_observable(f, z0, xi0, lambda, s, h, h);
        cplx r = force_point_equation ? forcepoint_pde_residual(g, alpha)
                                      : bpz_residual(g, alpha);
        out.h.push_back(h);
        out.residual.push_back(r);
        mags.push_back(std::abs(r));
    }
    out.order = fit_loglog_slope(out.h, mags);
    return out;
}

} // namespace slelax
