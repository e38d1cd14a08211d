#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "slelax/suite.hpp"

using namespace slelax;

namespace {

SuiteConfig base_config() {
    SuiteConfig cfg;
    cfg.driving.kind = DrivingKind::Brownian;
    cfg.driving.kappa = 4.0;
    cfg.driving.dt = 1e-3;
    cfg.driving.T = 0.1;
    cfg.driving.seed = 2;
    return cfg;
}

} // namespace

TEST_CASE("empty configuration passes trivially") {
    SuiteConfig cfg = base_config();
    SuiteReport rep = cross_module_suite(cfg);
    CHECK(rep.all_pass);
    for (const SuiteCheck& c : rep.checks)
        CHECK(c.pass);
}

TEST_CASE("diagonal n=1 family passes with tiny deviations") {
    SuiteConfig cfg = base_config();
    cfg.fam = make_lax_family({cplx{2.0}}, {Mat2::diag(0.5, -0.5)}, {Mat2::diag(-1.0, 1.0)});
    SuiteReport rep = cross_module_suite(cfg);
    CHECK(rep.all_pass);
    for (const SuiteCheck& c : rep.checks) {
        INFO(c.name);
        CHECK(c.pass);
        if (c.name != "family_validation")
            CHECK(c.deviation < 1e-8);
    }
}

TEST_CASE("random n=2 family passes") {
    testutil::Rng rng(81);
    SuiteConfig cfg = base_config();
    cfg.fam = testutil::random_family(rng, 2);
    SuiteReport rep = cross_module_suite(cfg);
    for (const SuiteCheck& c : rep.checks) {
        INFO(c.name, " deviation=", c.deviation);
        CHECK(c.pass);
    }
}

TEST_CASE("corrupted family is reported, not thrown") {
    SuiteConfig cfg = base_config();
    cfg.fam = make_lax_family({cplx{2.0}}, {Mat2::diag(0.5, -0.5)}, {Mat2::diag(-1.0, 1.0)});
    cfg.fam.A1[0].a11 += 0.1; // trace(A1) = 0.1 now
    SuiteReport rep;
    CHECK_NOTHROW(rep = cross_module_suite(cfg));
    CHECK(!rep.all_pass);
    REQUIRE(!rep.checks.empty());
    CHECK(rep.checks.front().name == "family_validation");
    CHECK(!rep.checks.front().pass);
}
