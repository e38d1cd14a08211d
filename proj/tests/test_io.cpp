#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "slelax/io.hpp"
#include "slelax/martingale.hpp"

using namespace slelax;

TEST_CASE("trajectory CSV carries the mandated columns") {
    DrivingSpec spec;
    spec.kind = DrivingKind::Zero;
    spec.dt = 0.1;
    spec.T = 0.3;
    auto states = run_trajectory(spec, {cplx{2.0}}, {cplx{1.0}});
    std::string csv = trajectory_csv(states);
    CsvTable t = parse_csv(csv);
    CHECK(t.header.front() == "t");
    CHECK(t.header[1] == "Z");
    CHECK(t.header[2] == "B");
    bool has_lambda = false, has_s = false, has_schwarz = false;
    for (const std::string& h : t.header) {
        if (h == "Lambda1_re")
            has_lambda = true;
        if (h == "S1_im")
            has_s = true;
        if (h == "schwarz1_re")
            has_schwarz = true;
    }
    CHECK(has_lambda);
    CHECK(has_s);
    CHECK(has_schwarz);
    CHECK(t.rows.size() == states.size());
}

TEST_CASE("csv round trip preserves doubles") {
    std::string csv = "a,b\n" + fmt_double(1.0 / 3.0) + "," + fmt_double(-2.5e-17) + "\n";
    CsvTable t = parse_csv(csv);
    CHECK(t.rows[0][0] == 1.0 / 3.0);
    CHECK(t.rows[0][1] == -2.5e-17);
}

TEST_CASE("parse failures raise UnknownColumn") {
    CHECK_THROWS_AS(parse_csv(""), UnknownColumn);
    CHECK_THROWS_AS(parse_csv("a,b\n1.0\n"), UnknownColumn);
}

TEST_CASE("svg plots are deterministic and well formed") {
    DrivingSpec spec;
    spec.kind = DrivingKind::Brownian;
    spec.kappa = 4.0;
    spec.dt = 1e-2;
    spec.T = 0.2;
    spec.seed = 14;
    auto states = run_trajectory(spec, {cplx{2.0}}, {cplx{1.0}});
    CsvTable t = parse_csv(trajectory_csv(states));
    std::string svg1 = plot_svg(t, "trajectory");
    std::string svg2 = plot_svg(t, "trajectory");
    CHECK(svg1 == svg2);
    CHECK(svg1.find("<svg") == 0);
    CHECK(svg1.find("polyline") != std::string::npos);

    CHECK_THROWS_AS(plot_svg(t, "nonsense"), UnknownColumn);
    CHECK_THROWS_AS(plot_svg(t, "ledger"), UnknownColumn); // missing residual columns
}

TEST_CASE("ledger plot renders the residual trace") {
    std::vector<LedgerRow> rows;
    for (int k = 1; k <= 20; ++k) {
        LedgerRow r;
        r.t = 0.01 * k;
        r.ledger.residual = cplx{1e-9 / k, 0.0};
        rows.push_back(r);
    }
    CsvTable t = parse_csv(ledger_csv(rows));
    std::string svg = plot_svg(t, "ledger");
    CHECK(svg.find("log10 |residual|") != std::string::npos);
    CHECK(svg.find("polyline") != std::string::npos);
}

TEST_CASE("slope plot from a confluence CSV") {
    ConfluenceRate rate;
    rate.eps = {1e-2, 1e-3, 1e-4};
    rate.mismatch = {1e-2, 1.1e-3, 0.9e-4};
    rate.slope = 1.0;
    CsvTable t = parse_csv(confluence_csv(rate));
    std::string svg = plot_svg(t, "slope");
    CHECK(svg.find("circle") != std::string::npos);
}
