#include "slelax/algebra.hpp"

#include <cmath>

namespace slelax {

bool is_finite(cplx z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

double Mat2::frobenius() const {
    return std::sqrt(std::norm(a11) + std::norm(a12) + std::norm(a21) + std::norm(a22));
}

bool Mat2::is_sl2() const {
    return std::abs(trace()) <= 1e-12 * std::max(1.0, frobenius());
}

Mat2 Mat2::operator+(const Mat2& o) const {
    return {a11 + o.a11, a12 + o.a12, a21 + o.a21, a22 + o.a22};
}

Mat2 Mat2::operator-(const Mat2& o) const {
    return {a11 - o.a11, a12 - o.a12, a21 - o.a21, a22 - o.a22};
}

Mat2 Mat2::operator*(const Mat2& o) const {
    return {a11 * o.a11 + a12 * o.a21, a11 * o.a12 + a12 * o.a22,
            a21 * o.a11 + a22 * o.a21, a21 * o.a12 + a22 * o.a22};
}

Mat2 Mat2::operator-() const { return {-a11, -a12, -a21, -a22}; }

Mat2& Mat2::operator+=(const Mat2& o) {
    a11 += o.a11;
    a12 += o.a12;
    a21 += o.a21;
    a22 += o.a22;
    return *this;
}

Mat2 Mat2::inverse() const {
    cplx d = det();
    if (std::abs(d) < 1e-300)
        throw ZeroMatrix("matrix not invertible");
    cplx inv = 1.0 / d;
    return {a22 * inv, -a12 * inv, -a21 * inv, a11 * inv};
}

Mat2 operator*(cplx c, const Mat2& m) {
    return {c * m.a11, c * m.a12, c * m.a21, c * m.a22};
}

Mat2 commutator(const Mat2& x, const Mat2& y) { return x * y - y * x; }

cplx trace_product(const Mat2& x, const Mat2& y) {
    return x.a11 * y.a11 + x.a12 * y.a21 + x.a21 * y.a12 + x.a22 * y.a22;
}

double max_entry_dist(const Mat2& x, const Mat2& y) {
    double m = std::abs(x.a11 - y.a11);
    m = std::max(m, std::abs(x.a12 - y.a12));
    m = std::max(m, std::abs(x.a21 - y.a21));
    m = std::max(m, std::abs(x.a22 - y.a22));
    return m;
}

namespace {

struct Vec2 {
    cplx x, y;
    double norm() const { return std::sqrt(std::norm(x) + std::norm(y)); }
};

// Null vector of (X - mu) for eigenvalue mu. Two candidate constructions
// from the two rows; pick the larger one for conditioning. Normalized to
// unit length with the dominant component real positive, so the transform
// is deterministic and diagonal input yields G = identity.
Vec2 eigenvector(const Mat2& m, cplx mu) {
    Vec2 v1{m.a12, mu - m.a11};
    Vec2 v2{mu - m.a22, m.a21};
    Vec2 v = (v1.norm() >= v2.norm()) ? v1 : v2;
    double n = v.norm();
    v = {v.x / n, v.y / n};
    cplx dom = (std::abs(v.x) >= std::abs(v.y)) ? v.x : v.y;
    cplx phase = dom / std::abs(dom);
    return {v.x / phase, v.y / phase};
}

} // namespace

SpectralPair eig_sl2(const Mat2& x) {
    double scale = x.frobenius();
    if (scale < 1e-14)
        throw ZeroMatrix("eig_sl2 of (near-)zero matrix");

    // Traceless X has eigenvalues +/- sqrt(-det X).
    cplx s = std::sqrt(-x.det());
    if (s.real() < 0.0 || (s.real() == 0.0 && s.imag() < 0.0))
        s = -s;
    if (std::abs(s) < 1e-12 * scale)
        throw NotDiagonalizable("nilpotent coefficient matrix");

    // X = -G diag(s,-s) G^{-1}: column 1 spans ker(X + s), column 2 ker(X - s).
    Vec2 g1 = eigenvector(x, -s);
    Vec2 g2 = eigenvector(x, s);
    Mat2 g{g1.x, g2.x, g1.y, g2.y};
    if (std::abs(g.det()) < 1e-12)
        throw NotDiagonalizable("eigenvectors nearly parallel");
    return {s, g, Mat2::diag(s, -s)};
}

} // namespace slelax
