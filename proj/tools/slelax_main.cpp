#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "slelax/bpz.hpp"
#include "slelax/confluence.hpp"
#include "slelax/hormander.hpp"
#include "slelax/io.hpp"
#include "slelax/martingale.hpp"
#include "slelax/suite.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;
using namespace slelax;

namespace {

struct Overrides {
    std::optional<uint64_t> seed;
    std::optional<double> dt;
    std::optional<std::size_t> paths;
    std::optional<std::string> out;
};

struct Experiment {
    std::string name; // lowercase
    LaxFamily fam;
    DrivingSpec driving;
    std::size_t paths = 1000;
    bool negative_control = false;
    double guard_scale = 1e-3;
    double ode_tol = 1e-12;
    double sigmas = 3.0;
    std::string output_dir = ".";
    json extra; // experiment-specific block
};

void require_keys(const json& obj, const std::vector<std::string>& allowed,
                  const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const std::string& k : allowed)
            if (it.key() == k)
                ok = true;
        if (!ok)
            throw InvalidConfig("unknown key \"" + it.key() + "\" in " + where);
    }
}

DrivingSpec parse_driving(const json& j) {
    require_keys(j, {"kind", "kappa", "rho", "xi0", "dt", "T", "seed", "samples"}, "driving");
    DrivingSpec d;
    std::string kind = j.value("kind", "ZERO");
    if (kind == "ZERO")
        d.kind = DrivingKind::Zero;
    else if (kind == "TABLE")
        d.kind = DrivingKind::Table;
    else if (kind == "BROWNIAN")
        d.kind = DrivingKind::Brownian;
    else if (kind == "SLE_KAPPA_RHO")
        d.kind = DrivingKind::SleKappaRho;
    else
        throw InvalidConfig("unknown driving kind: " + kind);
    d.kappa = j.value("kappa", 4.0);
    d.rho = j.value("rho", 0.0);
    d.xi0 = j.value("xi0", 0.0);
    d.dt = j.value("dt", 1e-3);
    d.T = j.value("T", 1.0);
    d.seed = j.value("seed", uint64_t{1});
    if (j.contains("samples"))
        d.samples = j["samples"].get<std::vector<double>>();
    return d;
}

Experiment parse_config(const std::string& path, const Overrides& ov) {
    std::ifstream in(path);
    if (!in)
        throw InvalidConfig("cannot read config file: " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw InvalidConfig(std::string("config parse failure: ") + e.what());
    }
    require_keys(j,
                 {"experiment", "family", "driving", "paths", "negative_control",
                  "tolerances", "output_dir", "confluence", "bpz", "hormander"},
                 "config");
    if (!j.contains("experiment"))
        throw InvalidConfig("config needs \"experiment\"");

    Experiment e;
    std::string name = j["experiment"].get<std::string>();
    for (const char* known : {"TRAJECTORY", "LEDGER", "MC", "MC_RHO", "CONFLUENCE", "BPZ",
                              "HORMANDER", "SUITE"})
        if (name == known)
            e.name = name;
    if (e.name.empty())
        throw InvalidConfig("unknown experiment: " + name);

    if (j.contains("family"))
        e.fam = lax_family_from_json_text(j["family"].dump());
    if (j.contains("driving"))
        e.driving = parse_driving(j["driving"]);
    e.paths = j.value("paths", std::size_t{1000});
    e.negative_control = j.value("negative_control", false);
    e.output_dir = j.value("output_dir", std::string("."));
    if (j.contains("tolerances")) {
        const json& t = j["tolerances"];
        require_keys(t, {"swallow_guard_scale", "ode_tol", "martingale_sigmas"}, "tolerances");
        e.guard_scale = t.value("swallow_guard_scale", 1e-3);
        e.ode_tol = t.value("ode_tol", 1e-12);
        e.sigmas = t.value("martingale_sigmas", 3.0);
    }
    for (const char* blk : {"confluence", "bpz", "hormander"})
        if (j.contains(blk))
            e.extra[blk] = j[blk];

    if (ov.seed)
        e.driving.seed = *ov.seed;
    if (ov.dt)
        e.driving.dt = *ov.dt;
    if (ov.paths)
        e.paths = *ov.paths;
    if (ov.out)
        e.output_dir = *ov.out;

    e.driving.validate();
    return e;
}

std::string lower(std::string s) {
    for (char& c : s)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out)
        throw InvalidConfig("cannot write " + p.string());
    out << text;
}

ordered_json cplx_json(cplx v) { return ordered_json::array({v.real(), v.imag()}); }

// returns process exit code
int run_experiment(const Experiment& e) {
    fs::create_directories(e.output_dir);
    std::string stem = lower(e.name) + "-" + std::to_string(e.driving.seed);
    fs::path csv_path = fs::path(e.output_dir) / (stem + ".csv");
    fs::path json_path = fs::path(e.output_dir) / (stem + ".json");

    ordered_json rep;
    rep["experiment"] = e.name;
    rep["seed"] = e.driving.seed;
    rep["dt"] = e.driving.dt;
    std::string csv;
    int exit_code = 0;

    if (e.name == "TRAJECTORY") {
        auto states = run_trajectory(e.driving, e.fam.lambda, e.fam.s, e.guard_scale);
        csv = trajectory_csv(states);
        rep["steps"] = states.size() - 1;
        rep["stopped"] = states.back().stopped;
        rep["stop_reason"] = states.back().stop_reason == StopReason::None ? "NONE"
                             : states.back().stop_reason == StopReason::Swallow
                                 ? "SWALLOW"
                                 : "CONTINUATION_THRESHOLD";
        rep["t_final"] = states.back().t;
    } else if (e.name == "LEDGER") {
        DrivingPath path = sample_driving(e.driving);
        auto run_with_substeps = [&](int sub, std::vector<LedgerRow>* rows) {
            CoupledRun run(e.fam, e.driving.kappa, std::nullopt, e.guard_scale);
            for (std::size_t k = 0; k < path.n_steps() && !run.stopped(); ++k) {
                double dZ = (path.Z[k + 1] - path.Z[k]) / sub;
                double dB = (path.B[k + 1] - path.B[k]) / sub;
                for (int q = 0; q < sub && !run.stopped(); ++q)
                    run.step(dZ, dB, e.driving.dt / sub);
                if (rows)
                    rows->push_back({run.lo().t, run.observable().ledger});
            }
            return run.max_ledger_residual();
        };
        std::vector<LedgerRow> rows;
        double r1 = run_with_substeps(1, &rows);
        double r2 = run_with_substeps(2, nullptr);
        csv = ledger_csv(rows);
        rep["max_residual"] = r1;
        rep["max_residual_half_dt"] = r2;
        rep["halving_ratio"] = r2 > 0 ? r1 / r2 : 0.0;
    } else if (e.name == "MC" || e.name == "MC_RHO") {
        McConfig mc;
        mc.fam = e.fam;
        mc.driving = e.driving;
        mc.paths = e.paths;
        mc.guard_scale = e.guard_scale;
        McResult res = mc_expectation(mc);
        csv = mc_csv(res);
        double expected = 2.0; // Tr M_0
        double dev = std::abs(res.mean_trace - cplx{expected});
        bool pass = dev <= e.sigmas * res.stderr_trace;
        rep["N"] = res.paths;
        rep["T"] = e.driving.T;
        rep["dt"] = e.driving.dt;
        rep["seed"] = e.driving.seed;
        rep["mean"] = {{"a11", cplx_json(res.mean.a11)},
                       {"a12", cplx_json(res.mean.a12)},
                       {"a21", cplx_json(res.mean.a21)},
                       {"a22", cplx_json(res.mean.a22)},
                       {"trace", cplx_json(res.mean_trace)}};
        rep["stderr"] = {{"a11", res.stderr_entries[0]},
                         {"a12", res.stderr_entries[1]},
                         {"a21", res.stderr_entries[2]},
                         {"a22", res.stderr_entries[3]},
                         {"trace", res.stderr_trace}};
        rep["stopped_fraction"] = res.stopped_fraction;
        rep["ledger_max_residual"] = res.ledger_max_residual;
        rep["alpha_drift_max"] = res.alpha_drift_max;
        rep["negative_control"] = e.negative_control;
        rep["martingale_check"] =
            pass ? "pass" : "martingale check failed: |mean - expected| > sigmas * stderr";
        if (!pass)
            exit_code = 3;
    } else if (e.name == "CONFLUENCE") {
        if (e.fam.n() == 0)
            throw InvalidConfig("confluence experiment needs a family with >= 1 pole");
        ConfluenceSpec spec;
        spec.target_A0 = e.fam.A0[0];
        spec.target_A1 = e.fam.A1[0];
        spec.s = e.fam.s[0];
        spec.base_lambda = e.fam.lambda[0];
        std::vector<double> ladder = {1e-2, 3e-3, 1e-3, 3e-4, 1e-4};
        std::vector<cplx> probes = {spec.base_lambda + 1.0, spec.base_lambda + cplx{1.0, 1.0},
                                    spec.base_lambda - 2.0};
        if (e.extra.contains("confluence")) {
            const json& c = e.extra["confluence"];
            require_keys(c, {"epsilon_ladder", "probes"}, "confluence");
            if (c.contains("epsilon_ladder"))
                ladder = c["epsilon_ladder"].get<std::vector<double>>();
            if (c.contains("probes")) {
                probes.clear();
                for (const json& p : c["probes"])
                    probes.emplace_back(p[0].get<double>(), p[1].get<double>());
            }
        }
        ConfluenceRate rate = confluence_rate(spec, probes, ladder);
        csv = confluence_csv(rate);
        rep["slope"] = rate.slope;
        DoublePoleSplit sp = split_double_pole(spec);
        rep["split_identity_residual"] =
            std::max((sp.A1 + sp.A2 - spec.target_A0).frobenius(),
                     ((spec.epsilon * spec.s) * sp.A2 - spec.target_A1).frobenius());
    } else if (e.name == "BPZ") {
        double z0 = 0.0;
        std::vector<double> ladder = {1e-2, 5e-3, 2.5e-3};
        if (e.extra.contains("bpz")) {
            const json& b = e.extra["bpz"];
            require_keys(b, {"z0", "h_ladder"}, "bpz");
            z0 = b.value("z0", 0.0);
            if (b.contains("h_ladder"))
                ladder = b["h_ladder"].get<std::vector<double>>();
        }
        std::vector<cplx> alpha(e.fam.n());
        for (std::size_t i = 0; i < e.fam.n(); ++i)
            alpha[i] = e.fam.alpha(i);
        ZFunc f = isomonodromic_Z(e.fam, z0, false, {1e-3, e.ode_tol});
        ResidualLadder lad =
            bpz_residual_ladder(f, z0, std::nullopt, e.fam.lambda, e.fam.s, alpha, ladder);
        csv = bpz_csv(lad);
        double hmin = *std::min_element(ladder.begin(), ladder.end());
        rep["order_estimate"] = lad.order;
        rep["terminal_residual"] = std::abs(lad.residual.back());
        rep["residual_bound"] = 100.0 * e.ode_tol / (hmin * hmin);
    } else if (e.name == "HORMANDER") {
        HormanderConfig cfg;
        cfg.lambda = e.fam.lambda;
        cfg.s = e.fam.s;
        cfg.z = 0.0;
        cfg.xi = 1.0;
        if (e.extra.contains("hormander")) {
            const json& h = e.extra["hormander"];
            require_keys(h, {"z", "xi"}, "hormander");
            cfg.z = h.value("z", 0.0);
            cfg.xi = h.value("xi", 1.0);
        }
        cplx det = hormander_determinant(cfg);
        double scale = hormander_scale(cfg);
        int rank = hormander_rank(cfg);
        int dim = static_cast<int>(4 * cfg.lambda.size() + 1);
        csv = "dim,rank,det_re,det_im,scale\n" + std::to_string(dim) + "," +
              std::to_string(rank) + "," + fmt_double(det.real()) + "," +
              fmt_double(det.imag()) + "," + fmt_double(scale) + "\n";
        rep["dim"] = dim;
        rep["rank"] = rank;
        rep["det"] = cplx_json(det);
        rep["scale"] = scale;
        rep["nondegenerate"] = std::abs(det) > 1e-12 * scale;
    } else if (e.name == "SUITE") {
        SuiteConfig sc{e.fam, e.driving, e.guard_scale};
        SuiteReport sr = cross_module_suite(sc);
        csv = "check,pass,deviation,tolerance\n";
        rep["checks"] = ordered_json::array();
        for (const SuiteCheck& c : sr.checks) {
            csv += c.name + "," + (c.pass ? "1" : "0") + "," + fmt_double(c.deviation) + "," +
                   fmt_double(c.tolerance) + "\n";
            ordered_json cj;
            cj["name"] = c.name;
            cj["pass"] = c.pass;
            cj["deviation"] = c.deviation;
            cj["tolerance"] = c.tolerance;
            if (!c.note.empty())
                cj["note"] = c.note;
            rep["checks"].push_back(cj);
        }
        rep["all_pass"] = sr.all_pass;
        if (!sr.all_pass) {
            rep["result"] = "suite check failed";
            exit_code = 3;
        }
    }

    write_file(csv_path, csv);
    write_file(json_path, rep.dump(2) + "\n");
    return exit_code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Loewner flows of rank-one isomonodromic systems: simulation and checks"};
    app.require_subcommand(1);

    std::string config_path;
    Overrides ov;
    CLI::App* run = app.add_subcommand("run", "run an experiment from a JSON config");
    run->add_option("config", config_path, "config JSON path")->required();
    uint64_t seed_val = 0;
    double dt_val = 0.0;
    std::size_t paths_val = 0;
    std::string out_val;
    CLI::Option* oseed = run->add_option("--seed", seed_val, "override seed");
    CLI::Option* odt = run->add_option("--dt", dt_val, "override step size");
    CLI::Option* opaths = run->add_option("--paths", paths_val, "override path count");
    CLI::Option* oout = run->add_option("--out", out_val, "override output directory");

    std::string csv_path, kind = "trajectory", plot_out;
    CLI::App* plot = app.add_subcommand("plot", "render a CSV produced by run as SVG");
    plot->add_option("csv", csv_path, "CSV path")->required();
    plot->add_option("--kind", kind, "trajectory | ledger | slope");
    plot->add_option("--out", plot_out, "output SVG path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            if (*oseed)
                ov.seed = seed_val;
            if (*odt)
                ov.dt = dt_val;
            if (*opaths)
                ov.paths = paths_val;
            if (*oout)
                ov.out = out_val;
            Experiment e = parse_config(config_path, ov);
            return run_experiment(e);
        }
        if (plot->parsed()) {
            std::ifstream in(csv_path, std::ios::binary);
            if (!in)
                throw InvalidConfig("cannot read CSV: " + csv_path);
            std::string text((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
            std::string svg = plot_svg(parse_csv(text), kind);
            fs::path out = plot_out.empty() ? fs::path(csv_path).replace_extension(".svg")
                                            : fs::path(plot_out);
            write_file(out, svg);
            return 0;
        }
    } catch (const InvalidConfig& err) {
        std::cerr << err.what() << "\n";
        return 2;
    } catch (const InvalidSpec& err) {
        std::cerr << err.what() << "\n";
        return 2;
    } catch (const UnknownColumn& err) {
        std::cerr << err.what() << "\n";
        return 2;
    } catch (const Error& err) {
        std::cerr << err.what() << "\n";
        return 3;
    } catch (const std::exception& err) {
        std::cerr << err.what() << "\n";
        return 3;
    }
    return 0;
}
