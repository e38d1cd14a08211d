#pragma once

#include <complex>

#include "slelax/errors.hpp"

namespace slelax {

using cplx = std::complex<double>;

bool is_finite(cplx z);

// 2x2 complex matrix, value type. Row-major entries.
struct Mat2 {
    cplx a11{0.0}, a12{0.0}, a21{0.0}, a22{0.0};

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static Mat2 zero() { return {}; }
    static Mat2 diag(cplx d1, cplx d2) { return {d1, 0.0, 0.0, d2}; }

    cplx trace() const { return a11 + a22; }
    cplx det() const { return a11 * a22 - a12 * a21; }
    double frobenius() const;

    // |tr X| <= 1e-12 * max(1, ||X||)
    bool is_sl2() const;

    Mat2 operator+(const Mat2& o) const;
    Mat2 operator-(const Mat2& o) const;
    Mat2 operator*(const Mat2& o) const;
    Mat2 operator-() const;
    Mat2& operator+=(const Mat2& o);

    Mat2 inverse() const; // throws ZeroMatrix on vanishing determinant
};

Mat2 operator*(cplx c, const Mat2& m);
inline Mat2 operator*(const Mat2& m, cplx c) { return c * m; }
inline Mat2 operator/(const Mat2& m, cplx c) { return (1.0 / c) * m; }

Mat2 commutator(const Mat2& x, const Mat2& y); // XY - YX
cplx trace_product(const Mat2& x, const Mat2& y); // Tr(XY)

double max_entry_dist(const Mat2& x, const Mat2& y);

// Spectral data of a traceless matrix in the convention X = -G diag(s,-s) G^{-1},
// branch Re(s) >= 0, tie-break Im(s) >= 0.
struct SpectralPair {
    cplx s;
    Mat2 G;
    Mat2 D; // diag(s, -s)
};

// Throws ZeroMatrix (||X|| < 1e-14) or NotDiagonalizable (|s| < 1e-12 ||X||).
SpectralPair eig_sl2(const Mat2& x);

} // namespace slelax
