#include "slelax/contour.hpp"

#include <cmath>

namespace slelax {

namespace {

double dist_to_poles(const LaxFamily& fam, cplx z) {
    double d = 1e300;
    for (const cplx& l : fam.lambda)
        d = std::min(d, std::abs(z - l));
    return d;
}

// distance from segment [a,b] to point p
double seg_dist(cplx a, cplx b, cplx p) {
    cplx ab = b - a;
    double len2 = std::norm(ab);
    if (len2 == 0.0)
        return std::abs(p - a);
    double t = ((p - a).real() * ab.real() + (p - a).imag() * ab.imag()) / len2;
    t = std::clamp(t, 0.0, 1.0);
    return std::abs(p - (a + t * ab));
}

Mat2 rk4(const LaxFamily& fam, cplx z, cplx dz, const Mat2& y) {
    Mat2 k1 = lax_eval(fam, z) * y;
    Mat2 k2 = lax_eval(fam, z + 0.5 * dz) * (y + (0.5 * dz) * k1);
    Mat2 k3 = lax_eval(fam, z + 0.5 * dz) * (y + (0.5 * dz) * k2);
    Mat2 k4 = lax_eval(fam, z + dz) * (y + dz * k3);
    return y + (dz / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

} // namespace

Mat2 integrate_Y_in_z(const LaxFamily& fam, const std::vector<cplx>& contour,
                      const Mat2& Y0, const ContourOptions& opts) {
    if (contour.size() < 2)
        return Y0;
    if (fam.n() == 0)
        return Y0;
    for (std::size_t k = 0; k + 1 < contour.size(); ++k)
        for (const cplx& l : fam.lambda)
            if (seg_dist(contour[k], contour[k + 1], l) < opts.margin)
                throw ContourTooClose("contour passes within margin of a puncture");

    Mat2 y = Y0;
    for (std::size_t k = 0; k + 1 < contour.size(); ++k) {
        cplx a = contour[k], b = contour[k + 1];
        double len = std::abs(b - a);
        if (len == 0.0)
            continue;
        cplx dir = (b - a) / len;
        double pos = 0.0;
        double h = std::min(len, 0.1 * dist_to_poles(fam, a));
        while (pos < len) {
            cplx z = a + pos * dir;
            h = std::min({h, len - pos, 0.1 * dist_to_poles(fam, z)});
            for (;;) {
                Mat2 full = rk4(fam, z, h * dir, y);
                Mat2 half = rk4(fam, z, 0.5 * h * dir, y);
                half = rk4(fam, z + 0.5 * h * dir, 0.5 * h * dir, half);
                double err = max_entry_dist(full, half) / std::max(1.0, half.frobenius());
                if (err < opts.local_tol || h < 1e-13 * std::max(1.0, len)) {
                    y = half;
                    pos += h;
                    if (err < 0.01 * opts.local_tol)
                        h *= 2.0;
                    break;
                }
                h *= 0.5;
            }
        }
    }
    return y;
}

} // namespace slelax
