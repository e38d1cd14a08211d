#include "slelax/confluence.hpp"

#include <cmath>

namespace slelax {

DoublePoleSplit split_double_pole(const ConfluenceSpec& spec) {
    if (std::abs(spec.s) < 1e-14)
        throw ZeroRate("confluence rate s must be nonzero");
    cplx eps_prime = spec.epsilon * spec.s;
    DoublePoleSplit out;
    out.A2 = (1.0 / eps_prime) * spec.target_A1;
    out.A1 = spec.target_A0 - out.A2;
    out.lambda1 = spec.base_lambda;
    out.lambda2 = spec.base_lambda + eps_prime;
    return out;
}

VandermondeSplit vandermonde_split(const ConfluenceSpec& spec,
                                   const std::vector<Mat2>& targets) {
    if (spec.k < 1)
        throw InvalidConfig("rank k must be >= 1");
    if (std::abs(spec.s) < 1e-14)
        throw ZeroRate("confluence rate s must be nonzero");
    const std::size_t m = static_cast<std::size_t>(spec.k) + 1;
    if (targets.size() != m)
        throw InvalidConfig("need k+1 target matrices");

    // nodes x_j = (j-1) eps s, moment matrix M[r][j] = x_j^r (row 0: all ones)
    std::vector<cplx> nodes(m);
    for (std::size_t j = 0; j < m; ++j)
        nodes[j] = static_cast<double>(j) * spec.epsilon * spec.s;

    std::vector<std::vector<cplx>> M(m, std::vector<cplx>(m));
    for (std::size_t j = 0; j < m; ++j) {
        cplx p = 1.0;
        for (std::size_t r = 0; r < m; ++r) {
            M[r][j] = p;
            p *= nodes[j];
        }
    }

    // entrywise solve: the same scalar system for each of the four entries
    auto solve_entry = [&](auto pick) {
        std::vector<std::vector<cplx>> a = M;
        std::vector<cplx> rhs(m);
        for (std::size_t r = 0; r < m; ++r)
            rhs[r] = pick(targets[r]);
        // Gaussian elimination with partial pivoting
        for (std::size_t col = 0; col < m; ++col) {
            std::size_t piv = col;
            for (std::size_t r = col + 1; r < m; ++r)
                if (std::abs(a[r][col]) > std::abs(a[piv][col]))
                    piv = r;
            std::swap(a[col], a[piv]);
            std::swap(rhs[col], rhs[piv]);
            if (std::abs(a[col][col]) < 1e-300)
                throw IllConditioned("singular Vandermonde system");
            for (std::size_t r = col + 1; r < m; ++r) {
                cplx f = a[r][col] / a[col][col];
                for (std::size_t c = col; c < m; ++c)
                    a[r][c] -= f * a[col][c];
                rhs[r] -= f * rhs[col];
            }
        }
        std::vector<cplx> x(m);
        for (std::size_t r = m; r-- > 0;) {
            cplx acc = rhs[r];
            for (std::size_t c = r + 1; c < m; ++c)
                acc -= a[r][c] * x[c];
            x[r] = acc / a[r][r];
        }
        return x;
    };

    std::vector<cplx> x11 = solve_entry([](const Mat2& t) { return t.a11; });
    std::vector<cplx> x12 = solve_entry([](const Mat2& t) { return t.a12; });
    std::vector<cplx> x21 = solve_entry([](const Mat2& t) { return t.a21; });
    std::vector<cplx> x22 = solve_entry([](const Mat2& t) { return t.a22; });

    VandermondeSplit out;
    out.A.resize(m);
    out.lambda.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        out.A[j] = {x11[j], x12[j], x21[j], x22[j]};
        out.lambda[j] = spec.base_lambda + nodes[j];
    }

    // residual check against the moment equations
    double target_scale = 0.0;
    for (const Mat2& t : targets)
        target_scale = std::max(target_scale, t.frobenius());
    double resid = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
        Mat2 acc = Mat2::zero();
        for (std::size_t j = 0; j < m; ++j)
            acc += M[r][j] * out.A[j];
        resid = std::max(resid, (acc - targets[r]).frobenius());
    }
    if (resid > 1e-8 * std::max(1.0, target_scale))
        throw IllConditioned("moment-equation residual too large");
    return out;
}

double confluence_mismatch(const ConfluenceSpec& spec, double eps,
                           const std::vector<cplx>& probes) {
    ConfluenceSpec at = spec;
    at.epsilon = eps;
    DoublePoleSplit sp = split_double_pole(at);
    double min_probe_dist = 10.0 * eps * std::abs(spec.s);
    double mis = 0.0;
    for (cplx z : probes) {
        if (std::abs(z - spec.base_lambda) < min_probe_dist)
            throw PoleHit("probe too close to the coalescing poles");
        Mat2 fuchs = (1.0 / (z - sp.lambda1)) * sp.A1 + (1.0 / (z - sp.lambda2)) * sp.A2;
        cplx w = z - spec.base_lambda;
        Mat2 dbl = (1.0 / w) * spec.target_A0 + (1.0 / (w * w)) * spec.target_A1;
        mis = std::max(mis, (fuchs - dbl).frobenius());
    }
    return mis;
}

ConfluenceRate confluence_rate(const ConfluenceSpec& spec,
                               const std::vector<cplx>& probes,
                               const std::vector<double>& eps_ladder) {
    if (eps_ladder.size() < 2)
        throw InvalidConfig("need at least two epsilon values");
    ConfluenceRate out;
    for (double eps : eps_ladder) {
        double mis = confluence_mismatch(spec, eps, probes);
        if (mis <= 0.0)
            throw DegenerateFit("identically zero mismatch, slope undefined");
        out.eps.push_back(eps);
        out.mismatch.push_back(mis);
    }
    // least squares on (log eps, log mismatch)
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(out.eps.size());
    for (std::size_t i = 0; i < out.eps.size(); ++i) {
        double x = std::log(out.eps[i]);
        double y = std::log(out.mismatch[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double denom = n * sxx - sx * sx;
    if (std::abs(denom) < 1e-30)
        throw DegenerateFit("epsilon ladder not spread");
    out.slope = (n * sxy - sx * sy) / denom;
    return out;
}

} // namespace slelax
