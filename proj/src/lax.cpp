#include "slelax/lax.hpp"

#include <cmath>

#include <json.hpp>

namespace slelax {

cplx LaxFamily::alpha(std::size_t i) const {
    if (i >= n())
        throw IndexOutOfRange("pole index");
    if (std::abs(s[i]) < 1e-12)
        throw ZeroBirkhoff("alpha undefined for vanishing Birkhoff invariant");
    return trace_product(A0[i], A1[i]) / (2.0 * s[i]);
}

void LaxFamily::validate() const {
    if (A0.size() != n() || A1.size() != n() || s.size() != n())
        throw InvalidConfig("inconsistent family arrays");
    for (std::size_t i = 0; i < n(); ++i) {
        if (!is_finite(lambda[i]))
            throw InvalidConfig("non-finite puncture");
        if (!A0[i].is_sl2() || !A1[i].is_sl2())
            throw InvariantViolated("coefficient matrix not traceless");
        for (std::size_t j = i + 1; j < n(); ++j)
            if (std::abs(lambda[i] - lambda[j]) < 1e-12)
                throw DegenerateConfig("coincident punctures");
        // 2 s^2 must reproduce Tr(A1^2).
        cplx tr2 = trace_product(A1[i], A1[i]);
        if (std::abs(2.0 * s[i] * s[i] - tr2) > 1e-10 * std::max(1.0, std::abs(tr2)))
            throw InvariantViolated("Birkhoff invariant inconsistent with Tr(A1^2)");
    }
}

LaxFamily make_lax_family(const std::vector<cplx>& lambda,
                          const std::vector<Mat2>& A0,
                          const std::vector<Mat2>& A1) {
    LaxFamily fam;
    fam.lambda = lambda;
    fam.A0 = A0;
    fam.A1 = A1;
    fam.s.reserve(lambda.size());
    for (const Mat2& a1 : A1)
        fam.s.push_back(eig_sl2(a1).s);
    fam.validate();
    return fam;
}

Mat2 lax_eval(const LaxFamily& fam, cplx z) {
    Mat2 a = Mat2::zero();
    for (std::size_t i = 0; i < fam.n(); ++i) {
        cplx w = z - fam.lambda[i];
        if (std::abs(w) < 1e-12)
            throw PoleHit("evaluation point at a puncture");
        a += (1.0 / w) * fam.A0[i] + (1.0 / (w * w)) * fam.A1[i];
    }
    return a;
}

Mat2 deformation_U(const LaxFamily& fam, cplx z, std::size_t i) {
    if (i >= fam.n())
        throw IndexOutOfRange("pole index");
    cplx w = z - fam.lambda[i];
    if (std::abs(w) < 1e-12)
        throw PoleHit("evaluation point at the puncture");
    return (-1.0 / (w * w)) * fam.A1[i] + (-1.0 / w) * fam.A0[i];
}

Mat2 deformation_V(const LaxFamily& fam, cplx z, std::size_t i) {
    if (i >= fam.n())
        throw IndexOutOfRange("pole index");
    if (std::abs(fam.s[i]) < 1e-12)
        throw ZeroBirkhoff("deformation_V undefined at s = 0");
    cplx w = z - fam.lambda[i];
    if (std::abs(w) < 1e-12)
        throw PoleHit("evaluation point at the puncture");
    return (-1.0 / (fam.s[i] * w)) * fam.A1[i];
}

TraceSquareCoeffs trace_square_coeffs(const LaxFamily& fam) {
    const std::size_t n = fam.n();
    TraceSquareCoeffs out;
    out.ell.assign(n, {cplx{0.0}, cplx{0.0}, cplx{0.0}, cplx{0.0}});
    for (std::size_t i = 0; i < n; ++i) {
        cplx l1{0.0}, l2{0.0};
        l2 = trace_product(fam.A0[i], fam.A0[i]);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i)
                continue;
            cplx d = fam.lambda[i] - fam.lambda[j];
            cplx d2 = d * d, d3 = d2 * d;
            l2 += 2.0 * (trace_product(fam.A1[i], fam.A0[j]) / d +
                         trace_product(fam.A1[i], fam.A1[j]) / d2);
            l1 += 2.0 * (trace_product(fam.A0[i], fam.A0[j]) / d +
                         trace_product(fam.A0[i], fam.A1[j]) / d2 -
                         trace_product(fam.A1[i], fam.A0[j]) / d2 -
                         2.0 * trace_product(fam.A1[i], fam.A1[j]) / d3);
        }
        out.ell[i][0] = l1;
        out.ell[i][1] = l2;
        out.ell[i][2] = 2.0 * trace_product(fam.A0[i], fam.A1[i]);
        out.ell[i][3] = trace_product(fam.A1[i], fam.A1[i]);
    }
    return out;
}

Hamiltonians hamiltonians(const LaxFamily& fam) {
    TraceSquareCoeffs c = trace_square_coeffs(fam);
    Hamiltonians h;
    h.H_lambda.resize(fam.n());
    h.H_s.resize(fam.n());
    for (std::size_t i = 0; i < fam.n(); ++i) {
        cplx s = fam.s[i];
        if (std::abs(s) < 1e-12)
            throw ZeroBirkhoff("Hamiltonian H_s undefined at s = 0");
        h.H_lambda[i] = 0.5 * c.at(i, 1);
        h.H_s[i] = c.at(i, 2) / (2.0 * s) - c.at(i, 3) * c.at(i, 3) / (16.0 * s * s * s);
    }
    return h;
}

std::vector<CoeffDeriv> schlesinger_rhs(const LaxFamily& fam,
                                        const std::vector<cplx>& dlambda,
                                        const std::vector<cplx>& ds) {
    const std::size_t n = fam.n();
    if (dlambda.size() != n || ds.size() != n)
        throw InvalidConfig("velocity lists must have length n");
    for (std::size_t j = 0; j < n; ++j)
        if (std::abs(ds[j]) > 0.0 && std::abs(fam.s[j]) < 1e-12)
            throw ZeroBirkhoff("s-velocity with vanishing Birkhoff invariant");

    std::vector<CoeffDeriv> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        Mat2 d0 = Mat2::zero(), d1 = Mat2::zero();

        // own s-deformation: s_i d/ds_i A1_i = A1_i + [A0_i, A1_i]
        if (std::abs(ds[i]) > 0.0) {
            cplx vi = ds[i] / fam.s[i];
            d1 += vi * (fam.A1[i] + commutator(fam.A0[i], fam.A1[i]));
        }

        for (std::size_t j = 0; j < n; ++j) {
            if (j == i)
                continue;
            cplx d = fam.lambda[i] - fam.lambda[j];
            cplx d2 = d * d, d3 = d2 * d;
            Mat2 c00 = commutator(fam.A0[i], fam.A0[j]);
            Mat2 c01 = commutator(fam.A0[i], fam.A1[j]);
            Mat2 c10 = commutator(fam.A1[i], fam.A0[j]);
            Mat2 c11 = commutator(fam.A1[i], fam.A1[j]);

            // motion of lambda_i
            d0 += dlambda[i] * ((2.0 / d3) * c11 + (1.0 / d2) * (c10 - c01) - (1.0 / d) * c00);
            d1 += dlambda[i] * ((-1.0 / d2) * c11 + (-1.0 / d) * c10);

            // motion of lambda_j (the cross equations with i and j swapped)
            d0 += dlambda[j] * ((-2.0 / d3) * c11 - (1.0 / d2) * (c10 - c01) + (1.0 / d) * c00);
            d1 += dlambda[j] * ((1.0 / d2) * c11 + (1.0 / d) * c10);

            // motion of s_i and s_j
            if (std::abs(ds[i]) > 0.0) {
                cplx vi = ds[i] / fam.s[i];
                d0 += vi * ((-1.0 / d2) * c11 + (-1.0 / d) * c10);
            }
            if (std::abs(ds[j]) > 0.0) {
                cplx vj = ds[j] / fam.s[j];
                d0 += vj * ((-1.0 / d2) * c11 + (1.0 / d) * c01);
                d1 += vj * ((1.0 / d) * c11);
            }
        }
        out[i] = {d0, d1};
    }
    return out;
}

LaxFamily advance_isomonodromy(const LaxFamily& fam,
                               const std::vector<cplx>& dlambda,
                               const std::vector<cplx>& ds) {
    const std::size_t n = fam.n();
    if (dlambda.size() != n || ds.size() != n)
        throw InvalidConfig("velocity lists must have length n");

    auto family_at = [&](double u, const std::vector<Mat2>& A0, const std::vector<Mat2>& A1) {
        LaxFamily f;
        f.A0 = A0;
        f.A1 = A1;
        f.lambda.resize(n);
        f.s.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            f.lambda[i] = fam.lambda[i] + u * dlambda[i];
            f.s[i] = fam.s[i] + u * ds[i];
        }
        return f;
    };

    auto step = [&](const std::vector<CoeffDeriv>& k, double w,
                    std::vector<Mat2>& A0, std::vector<Mat2>& A1) {
        for (std::size_t i = 0; i < n; ++i) {
            A0[i] = fam.A0[i] + w * k[i].dA0;
            A1[i] = fam.A1[i] + w * k[i].dA1;
        }
    };

    std::vector<Mat2> A0 = fam.A0, A1 = fam.A1;
    std::vector<CoeffDeriv> k1 = schlesinger_rhs(family_at(0.0, A0, A1), dlambda, ds);
    step(k1, 0.5, A0, A1);
    std::vector<CoeffDeriv> k2 = schlesinger_rhs(family_at(0.5, A0, A1), dlambda, ds);
    step(k2, 0.5, A0, A1);
    std::vector<CoeffDeriv> k3 = schlesinger_rhs(family_at(0.5, A0, A1), dlambda, ds);
    step(k3, 1.0, A0, A1);
    std::vector<CoeffDeriv> k4 = schlesinger_rhs(family_at(1.0, A0, A1), dlambda, ds);

    LaxFamily out;
    out.lambda.resize(n);
    out.s.resize(n);
    out.A0.resize(n);
    out.A1.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.lambda[i] = fam.lambda[i] + dlambda[i];
        out.s[i] = fam.s[i] + ds[i];
        out.A0[i] = fam.A0[i] + (1.0 / 6.0) * (k1[i].dA0 + 2.0 * k2[i].dA0 + 2.0 * k3[i].dA0 + k4[i].dA0);
        out.A1[i] = fam.A1[i] + (1.0 / 6.0) * (k1[i].dA1 + 2.0 * k2[i].dA1 + 2.0 * k3[i].dA1 + k4[i].dA1);
    }
    for (std::size_t i = 0; i < n; ++i) {
        cplx tr2 = trace_product(out.A1[i], out.A1[i]);
        cplx want = 2.0 * out.s[i] * out.s[i];
        if (std::abs(want - tr2) > 1e-6 * std::max(1.0, std::abs(tr2)))
            throw InvariantViolated("2 s^2 = Tr(A1^2) drifted beyond tolerance");
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(out.lambda[i] - out.lambda[j]) < 1e-12)
                throw DegenerateConfig("punctures collided during deformation");
    }
    return out;
}

cplx tau_increment(const LaxFamily& fam,
                   const std::vector<cplx>& dlambda,
                   const std::vector<cplx>& ds) {
    if (dlambda.size() != fam.n() || ds.size() != fam.n())
        throw InvalidConfig("velocity lists must have length n");
    Hamiltonians h = hamiltonians(fam);
    cplx out{0.0};
    for (std::size_t i = 0; i < fam.n(); ++i)
        out += h.H_lambda[i] * dlambda[i] + h.H_s[i] * ds[i];
    return out;
}

namespace {

using nlohmann::json;

cplx cplx_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw InvalidConfig("complex entries must be [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

json cplx_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

Mat2 mat_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_array() || j[0].size() != 2 ||
        !j[1].is_array() || j[1].size() != 2)
        throw InvalidConfig("matrices must be 2x2 arrays of [re, im] pairs");
    return {cplx_from_json(j[0][0]), cplx_from_json(j[0][1]),
            cplx_from_json(j[1][0]), cplx_from_json(j[1][1])};
}

json mat_to_json(const Mat2& m) {
    return json::array({json::array({cplx_to_json(m.a11), cplx_to_json(m.a12)}),
                        json::array({cplx_to_json(m.a21), cplx_to_json(m.a22)})});
}

} // namespace

LaxFamily lax_family_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw InvalidConfig(std::string("family JSON parse failure: ") + e.what());
    }
    if (!j.is_object() || !j.contains("poles") || !j["poles"].is_array())
        throw InvalidConfig("family JSON needs a \"poles\" array");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (it.key() != "poles" && it.key() != "regular_at_infinity")
            throw InvalidConfig("unknown family key: " + it.key());

    std::vector<cplx> lambda;
    std::vector<Mat2> A0, A1;
    for (const json& p : j["poles"]) {
        if (!p.is_object() || !p.contains("lambda") || !p.contains("A0") || !p.contains("A1"))
            throw InvalidConfig("each pole needs lambda, A0, A1");
        for (auto it = p.begin(); it != p.end(); ++it)
            if (it.key() != "lambda" && it.key() != "A0" && it.key() != "A1")
                throw InvalidConfig("unknown pole key: " + it.key());
        lambda.push_back(cplx_from_json(p["lambda"]));
        A0.push_back(mat_from_json(p["A0"]));
        A1.push_back(mat_from_json(p["A1"]));
    }
    LaxFamily fam = make_lax_family(lambda, A0, A1);
    if (j.value("regular_at_infinity", false)) {
        Mat2 sum = Mat2::zero();
        double scale = 0.0;
        for (const Mat2& m : fam.A0) {
            sum += m;
            scale = std::max(scale, m.frobenius());
        }
        if (sum.frobenius() > 1e-10 * std::max(1.0, scale))
            throw InvalidConfig("family declared regular at infinity but sum A0 != 0");
    }
    return fam;
}

std::string lax_family_to_json_text(const LaxFamily& fam, bool regular_at_infinity) {
    nlohmann::ordered_json j;
    j["poles"] = json::array();
    for (std::size_t i = 0; i < fam.n(); ++i) {
        nlohmann::ordered_json p;
        p["lambda"] = cplx_to_json(fam.lambda[i]);
        p["A0"] = mat_to_json(fam.A0[i]);
        p["A1"] = mat_to_json(fam.A1[i]);
        j["poles"].push_back(p);
    }
    j["regular_at_infinity"] = regular_at_infinity;
    return j.dump(2);
}

} // namespace slelax
