#include "slelax/hormander.hpp"

#include <cmath>

#include "slelax/errors.hpp"

namespace slelax {

namespace {

void validate(const HormanderConfig& cfg) {
    if (cfg.z == cfg.xi)
        throw DegenerateInput("z and xi coincide");
    for (std::size_t i = 0; i < cfg.lambda.size(); ++i) {
        if (std::abs(cfg.lambda[i] - cfg.z) < 1e-14)
            throw DegenerateInput("puncture at z");
        for (std::size_t j = i + 1; j < cfg.lambda.size(); ++j)
            if (std::abs(cfg.lambda[i] - cfg.lambda[j]) < 1e-14)
                throw DegenerateInput("coincident punctures");
    }
    if (cfg.s.size() != cfg.lambda.size())
        throw DegenerateInput("s list must match lambda list");
}

} // namespace

std::vector<std::vector<cplx>> hormander_matrix(const HormanderConfig& cfg) {
    validate(cfg);
    const std::size_t n = cfg.lambda.size();
    const std::size_t dim = 4 * n + 1;
    std::vector<std::vector<cplx>> m(dim, std::vector<cplx>(dim));
    for (std::size_t r = 0; r < dim; ++r) {
        double ell = static_cast<double>(r + 1);
        auto ipow = [](cplx base, std::size_t p) {
            cplx acc{1.0};
            for (std::size_t q = 0; q < p; ++q)
                acc *= base;
            return acc;
        };
        m[r][0] = 2.0 / ipow(cplx{cfg.xi - cfg.z}, r + 2);
        for (std::size_t i = 0; i < n; ++i) {
            cplx w = cfg.lambda[i] - cfg.z;
            cplx wc = std::conj(cfg.lambda[i]) - cfg.z;
            m[r][1 + i] = 2.0 / ipow(w, r + 2);
            m[r][1 + n + i] = 2.0 / ipow(wc, r + 2);
            m[r][1 + 2 * n + i] = -2.0 * (ell + 1.0) * cfg.s[i] / ipow(w, r + 3);
            m[r][1 + 3 * n + i] = -2.0 * (ell + 1.0) * std::conj(cfg.s[i]) / ipow(wc, r + 3);
        }
    }
    return m;
}

cplx hormander_determinant(const HormanderConfig& cfg) {
    std::vector<std::vector<cplx>> a = hormander_matrix(cfg);
    const std::size_t dim = a.size();
    cplx det{1.0};
    for (std::size_t col = 0; col < dim; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < dim; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col]))
                piv = r;
        if (std::abs(a[piv][col]) == 0.0)
            return {0.0};
        if (piv != col) {
            std::swap(a[piv], a[col]);
            det = -det;
        }
        det *= a[col][col];
        for (std::size_t r = col + 1; r < dim; ++r) {
            cplx f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < dim; ++c)
                a[r][c] -= f * a[col][c];
        }
    }
    return det;
}

double hormander_scale(const HormanderConfig& cfg) {
    std::vector<std::vector<cplx>> a = hormander_matrix(cfg);
    double scale = 1.0;
    for (const auto& row : a) {
        double s = 0.0;
        for (const cplx& v : row)
            s += std::norm(v);
        scale *= std::sqrt(s);
    }
    return scale;
}

std::vector<double> singular_values(const std::vector<std::vector<cplx>>& a) {
    // One-sided Jacobi: rotate column pairs until mutually orthogonal; the
    // singular values are the column norms. Avoids forming A^H A, which would
    // square the condition number and wash out tiny singular values.
    const std::size_t dim = a.size();
    std::vector<std::vector<cplx>> col(dim, std::vector<cplx>(dim));
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j)
            col[j][i] = a[i][j];

    auto dot = [&](std::size_t p, std::size_t q) { // <a_p, a_q>
        cplx acc{0.0};
        for (std::size_t k = 0; k < dim; ++k)
            acc += std::conj(col[p][k]) * col[q][k];
        return acc;
    };

    for (int sweep = 0; sweep < 60; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p < dim; ++p)
            for (std::size_t q = p + 1; q < dim; ++q) {
                double app = dot(p, p).real();
                double aqq = dot(q, q).real();
                cplx apq = dot(p, q);
                double off = std::abs(apq);
                if (off <= 1e-15 * std::sqrt(app * aqq) || off == 0.0)
                    continue;
                rotated = true;
                cplx phase = apq / off;
                double theta = 0.5 * std::atan2(2.0 * off, aqq - app);
                double c = std::cos(theta), s = std::sin(theta);
                cplx sp = s * phase;
                for (std::size_t k = 0; k < dim; ++k) {
                    cplx vp = col[p][k], vq = col[q][k];
                    col[p][k] = c * vp - std::conj(sp) * vq;
                    col[q][k] = sp * vp + c * vq;
                }
            }
        if (!rotated)
            break;
    }

    std::vector<double> sv(dim);
    for (std::size_t j = 0; j < dim; ++j)
        sv[j] = std::sqrt(dot(j, j).real());
    std::sort(sv.begin(), sv.end(), std::greater<double>());
    return sv;
}

int hormander_rank(const HormanderConfig& cfg, double rel_tol) {
    // Row equilibration: diagonal scaling does not change the rank but keeps
    // the wildly different row magnitudes from hiding exact collapses.
    std::vector<std::vector<cplx>> a = hormander_matrix(cfg);
    for (auto& row : a) {
        double nrm = 0.0;
        for (const cplx& v : row)
            nrm += std::norm(v);
        nrm = std::sqrt(nrm);
        if (nrm > 0.0)
            for (cplx& v : row)
                v = v / nrm;
    }
    std::vector<double> sv = singular_values(a);
    if (sv.empty() || sv[0] == 0.0)
        return 0;
    int rank = 0;
    for (double v : sv)
        if (v > rel_tol * sv[0])
            ++rank;
    return rank;
}

} // namespace slelax
