#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "slelax/confluence.hpp"
#include "slelax/loewner.hpp"

using namespace slelax;

namespace {

ConfluenceSpec diag_spec() {
    ConfluenceSpec spec;
    spec.target_A0 = Mat2::diag(0.5, -0.5);
    spec.target_A1 = Mat2::diag(-1.0, 1.0);
    spec.s = cplx{1.0};
    spec.epsilon = 0.01;
    spec.base_lambda = cplx{0.0};
    return spec;
}

} // namespace

TEST_CASE("split_double_pole solves the two-by-two system") {
    DoublePoleSplit sp = split_double_pole(diag_spec());
    CHECK(std::abs(sp.A2.a11 - cplx{-100.0}) < 1e-12);
    CHECK(std::abs(sp.A2.a22 - cplx{100.0}) < 1e-12);
    CHECK(std::abs(sp.A1.a11 - cplx{100.5}) < 1e-12);
    CHECK(std::abs(sp.A1.a22 - cplx{-100.5}) < 1e-12);
    CHECK(sp.lambda1 == cplx{0.0});
    CHECK(std::abs(sp.lambda2 - cplx{0.01}) < 1e-15);
}

TEST_CASE("split identities are exact for random targets") {
    testutil::Rng rng(51);
    for (int it = 0; it < 50; ++it) {
        ConfluenceSpec spec;
        spec.target_A0 = testutil::random_traceless(rng);
        spec.target_A1 = testutil::random_traceless(rng);
        spec.s = rng.cnormal();
        spec.epsilon = 0.5 * rng.uniform() + 1e-3;
        if (std::abs(spec.s) < 0.1)
            continue;
        DoublePoleSplit sp = split_double_pole(spec);
        cplx eps_prime = spec.epsilon * spec.s;
        CHECK((sp.A1 + sp.A2 - spec.target_A0).frobenius() <=
              1e-12 * std::max(1.0, spec.target_A0.frobenius()));
        CHECK((eps_prime * sp.A2 - spec.target_A1).frobenius() <=
              1e-12 * std::max(1.0, spec.target_A1.frobenius()));
    }
    CHECK_THROWS_AS(split_double_pole(ConfluenceSpec{Mat2::zero(), Mat2::zero(), cplx{0.0}}),
                    ZeroRate);
}

TEST_CASE("lax mismatch at a probe is O(eps)") {
    // exact difference: A1 * eps' / ((z-l)^2 (z-l-eps'))
    ConfluenceSpec spec = diag_spec();
    double mis = confluence_mismatch(spec, 0.01, {cplx{1.0}});
    double expect_entry = 0.01 / 0.99; // |eps'| / |1 * (1-eps')|
    CHECK(mis == doctest::Approx(std::sqrt(2.0) * expect_entry).epsilon(1e-10));
    CHECK(mis == doctest::Approx(0.0101).epsilon(1e-2));
}

TEST_CASE("birkhoff invariant recovered from the split") {
    ConfluenceSpec spec = diag_spec();
    spec.s = cplx{1.3, 0.4};
    DoublePoleSplit sp = split_double_pole(spec);
    cplx eps_prime = spec.epsilon * spec.s;
    SpectralPair p = eig_sl2(eps_prime * sp.A2);
    cplx target = eig_sl2(spec.target_A1).s;
    CHECK(std::abs(p.s - target) < 1e-12);
}

TEST_CASE("vandermonde_split") {
    SUBCASE("k=1 reduces to split_double_pole") {
        ConfluenceSpec spec = diag_spec();
        DoublePoleSplit sp = split_double_pole(spec);
        VandermondeSplit vs = vandermonde_split(spec, {spec.target_A0, spec.target_A1});
        CHECK(max_entry_dist(vs.A[0], sp.A1) < 1e-9);
        CHECK(max_entry_dist(vs.A[1], sp.A2) < 1e-9);
        CHECK(std::abs(vs.lambda[1] - sp.lambda2) < 1e-15);
    }
    SUBCASE("k=2 moment residuals vanish") {
        ConfluenceSpec spec = diag_spec();
        spec.k = 2;
        spec.epsilon = 0.1;
        std::vector<Mat2> targets = {Mat2::diag(0.5, -0.5), Mat2::diag(-1.0, 1.0),
                                     Mat2::diag(0.25, -0.25)};
        VandermondeSplit vs = vandermonde_split(spec, targets);
        for (int m = 0; m <= 2; ++m) {
            Mat2 acc = Mat2::zero();
            for (std::size_t j = 0; j < 3; ++j) {
                cplx node = static_cast<double>(j) * spec.epsilon * spec.s;
                cplx w{1.0};
                for (int q = 0; q < m; ++q)
                    w *= node;
                acc += w * vs.A[j];
            }
            CHECK((acc - targets[static_cast<std::size_t>(m)]).frobenius() <= 1e-12);
        }
    }
    SUBCASE("tiny epsilon with high rank is ill conditioned") {
        ConfluenceSpec spec = diag_spec();
        spec.k = 3;
        spec.epsilon = 1e-12;
        std::vector<Mat2> targets(4, Mat2::diag(1.0, -1.0));
        CHECK_THROWS_AS(vandermonde_split(spec, targets), IllConditioned);
    }
}

TEST_CASE("confluence_rate fits slope near one") {
    ConfluenceSpec spec = diag_spec();
    std::vector<cplx> probes = {cplx{1.0}, cplx{1.0, 1.0}, cplx{-2.0}};
    std::vector<double> ladder = {1e-2, 3e-3, 1e-3, 3e-4, 1e-4};
    ConfluenceRate rate = confluence_rate(spec, probes, ladder);
    CHECK(rate.slope > 0.9);
    CHECK(rate.slope < 1.1);

    ConfluenceSpec zero = spec;
    zero.target_A0 = Mat2::zero();
    zero.target_A1 = Mat2::zero();
    CHECK_THROWS_AS(confluence_rate(zero, probes, ladder), DegenerateFit);
}

TEST_CASE("flowed simple poles converge to the birkhoff evolution") {
    // two coalescing punctures under a frozen path: difference quotient of the
    // flowed positions approaches S_t = g' s at rate O(eps)
    DrivingSpec dspec;
    dspec.kind = DrivingKind::Brownian;
    dspec.kappa = 4.0;
    dspec.dt = 1e-4;
    dspec.T = 0.2;
    dspec.seed = 3;
    const cplx lam{1.5, 1.0};
    const cplx s{0.8, 0.2};
    auto single = run_trajectory(dspec, {lam}, {s});
    const cplx S_t = single.back().S[0];

    double prev_err = 0.0;
    for (double eps : {1e-3, 1e-4}) {
        auto pair_traj = run_trajectory(dspec, {lam, lam + eps * s}, {s, s});
        cplx quotient = (pair_traj.back().Lambda[1] - pair_traj.back().Lambda[0]) / eps;
        double err = std::abs(quotient - S_t);
        if (eps == 1e-3)
            prev_err = err;
        else {
            CHECK(err < 1e-4);
            CHECK(prev_err / err > 3.0); // roughly first order in eps
        }
    }
}
