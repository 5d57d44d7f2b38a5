// Command-line front end: run, diagnose, inviscid-limit, check.
// Exit codes: 0 success, 1 usage error, 2 runtime abort or failed check.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "axmb/diagnostics.hpp"
#include "axmb/dynamics.hpp"
#include "axmb/elliptic.hpp"
#include "axmb/experiments.hpp"
#include "axmb/io.hpp"

namespace fs = std::filesystem;
using namespace axmb;

namespace {

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string snapshot_name(std::size_t i) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "snapshot_%03zu.axmb", i);
    return buf;
}

int cmd_run(const std::string& config_path, const std::string& out_override) {
    Config c = load_config(config_path);
    const fs::path dir = out_override.empty() ? fs::path(c.directory) : fs::path(out_override);
    fs::create_directories(dir);
    const fs::path series = dir / "series.csv";
    fs::remove(series);

    std::size_t n_snap = 0;
    RunHooks hooks;
    hooks.on_record = [&](const SimState&, const DiagnosticsRecord& r) { append_timeseries(r, series); };
    hooks.on_snapshot = [&](const SimState& s) {
        write_snapshot(s, dir / snapshot_name(n_snap));
        std::cout << "snapshot " << snapshot_name(n_snap) << " t=" << num(s.t) << "\n";
        ++n_snap;
    };
    RunResult res = run(c, hooks);
    std::cout << "wrote " << res.series.size() << " records to " << series.string() << "\n";
    return 0;
}

int cmd_diagnose(const std::string& snapshot, const std::vector<double>& ps, const std::string& config_path) {
    SimState s = read_snapshot(snapshot);
    SchemeConfig scheme;
    if (!config_path.empty()) scheme = load_config(config_path).scheme;
    StreamSolver solver(s.g());
    DiagnosticsRecord r = make_record(s, scheme, 0.0, nullptr, relative_divergence(s.face, s.g()), &solver);

    const auto& cols = timeseries_columns();
    std::istringstream row(timeseries_row(r));
    std::string cell;
    for (const auto& name : cols) {
        std::getline(row, cell, ',');
        std::cout << name << " = " << (cell.empty() ? "absent" : cell) << "\n";
    }
    std::cout << "rho_mass = " << num(r.rho_mass) << "\n";
    for (double p : ps) {
        RieszRatios rr = riesz_ratio(s, p);
        std::cout << "riesz_p" << num(p) << " = "
                  << (rr.velocity_gradient ? num(*rr.velocity_gradient) : std::string("absent")) << "\n";
        std::cout << "riesz_ur_over_r_p" << num(p) << " = "
                  << (rr.ur_over_r ? num(*rr.ur_over_r) : std::string("absent")) << "\n";
    }
    return 0;
}

int cmd_inviscid(const std::string& config_path, const std::vector<double>& mus, const std::string& out_override,
                 unsigned threads) {
    Config c = load_config(config_path);
    const fs::path dir = out_override.empty() ? fs::path(c.directory) : fs::path(out_override);
    fs::create_directories(dir);
    const fs::path partial = dir / "inviscid_limit_partial.csv";
    {
        std::ofstream p(partial);
        p << "mu,err_u,err_h,err_rho,err_sum\n";
    }
    InviscidLimitOptions opts;
    opts.threads = threads;
    opts.on_result = [&](double mu, const FieldErrors& e) {
        std::ofstream p(partial, std::ios::app);
        p << num(mu) << ',' << num(e.u) << ',' << num(e.h) << ',' << num(e.rho) << ',' << num(e.sum()) << "\n";
        std::cout << "mu=" << num(mu) << " error=" << num(e.sum()) << std::endl;
    };
    ExperimentResult r = inviscid_limit(c, mus, opts);
    write_experiment(r, dir);
    fs::remove(partial);
    std::cout << "floor=" << num(r.floor) << " floor_ok=" << (r.floor_ok ? "yes" : "no") << "\n";
    if (r.fit)
        std::cout << "slope=" << num(r.fit->slope) << " r_squared=" << num(r.fit->r_squared) << "\n";
    else
        std::cout << "slope undefined: fewer than 3 points above 10x floor\n";
    return 0;
}

int cmd_check(const std::string& suite, const std::string& config_path) {
    if (suite != "invariants") {
        std::cerr << "unknown suite '" << suite << "' (available: invariants)\n";
        return 1;
    }
    Config c = load_config(config_path);
    c.snapshot_times.clear();

    bool swirl_ok = true;
    double worst_swirl_t = 0.0;
    RunHooks hooks;
    hooks.on_record = [&](const SimState& s, const DiagnosticsRecord&) {
        if (!swirl_ratio_check(s).satisfied && swirl_ok) {
            swirl_ok = false;
            worst_swirl_t = s.t;
        }
    };
    RunResult res = run(c, hooks);
    const auto& series = res.series;

    int failures = 0;
    auto report = [&](bool ok, const std::string& name, const std::string& detail) {
        std::cout << (ok ? "PASS " : "FAIL ") << name << ": " << detail << "\n";
        if (!ok) ++failures;
    };

    LedgerReport ledger = energy_ledger(series);
    std::ostringstream ld;
    ld << ledger.violations.size() << " violations";
    for (std::size_t i = 0; i < ledger.violations.size() && i < 5; ++i)
        ld << "; t=" << num(ledger.violations[i].t) << " " << ledger.violations[i].what;
    report(ledger.ok(), "max principles and L^p monotonicity", ld.str());

    double div = 0.0, mass_drift = 0.0;
    bool finite = true;
    const double m0 = series.front().rho_mass;
    for (const auto& r : series) {
        div = std::max(div, r.div_max);
        mass_drift = std::max(mass_drift, std::abs(r.rho_mass - m0) / (m0 != 0.0 ? std::abs(m0) : 1.0));
        finite = finite && std::isfinite(r.bkm_integral) && std::isfinite(r.h3_proxy);
    }
    report(div <= 1e-12, "discrete divergence", "max relative " + num(div));
    report(mass_drift <= 1e-11, "thermal mass", "relative drift " + num(mass_drift));
    report(swirl_ok, "swirl ratio bound", swirl_ok ? "holds at every record" : "first violated at t=" + num(worst_swirl_t));
    report(finite, "BKM integral and H^3 proxy finite", "bkm_integral " + num(series.back().bkm_integral));
    if (c.scheme.advection != Advection::upwind1)
        std::cout << "note: the max-principle checks are exact only for the upwind1 scheme\n";
    return failures ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Axisymmetric MHD-Boussinesq simulator"};
    app.require_subcommand(1);

    std::string config_path, out_dir, snapshot_path, suite;
    std::vector<double> ps, mus;
    unsigned threads = 0;

    auto* run_cmd = app.add_subcommand("run", "Integrate a config, writing series.csv and snapshots");
    run_cmd->add_option("--config", config_path, "config file")->required()->check(CLI::ExistingFile);
    run_cmd->add_option("--out", out_dir, "output directory (overrides [output] directory)");

    auto* diag_cmd = app.add_subcommand("diagnose", "Print the diagnostics of one snapshot");
    diag_cmd->add_option("--snapshot", snapshot_path, "snapshot file")->required()->check(CLI::ExistingFile);
    diag_cmd->add_option("--p", ps, "extra Riesz exponents, comma separated")->delimiter(',');
    diag_cmd->add_option("--config", config_path, "config supplying the scheme toggles for the energy residual");

    auto* inv_cmd = app.add_subcommand("inviscid-limit", "Vanishing-viscosity study");
    inv_cmd->add_option("--config", config_path, "config file")->required()->check(CLI::ExistingFile);
    inv_cmd->add_option("--mus", mus, "viscosities, comma separated")->required()->delimiter(',');
    inv_cmd->add_option("--out", out_dir, "output directory");
    inv_cmd->add_option("--threads", threads, "worker threads (0 = hardware concurrency)");

    auto* check_cmd = app.add_subcommand("check", "Run an invariant suite on a config");
    check_cmd->add_option("--suite", suite, "suite name")->required();
    check_cmd->add_option("--config", config_path, "config file")->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n" << app.help();
        return 1;
    }

    try {
        if (*run_cmd) return cmd_run(config_path, out_dir);
        if (*diag_cmd) return cmd_diagnose(snapshot_path, ps, config_path);
        if (*inv_cmd) return cmd_inviscid(config_path, mus, out_dir, threads);
        if (*check_cmd) return cmd_check(suite, config_path);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
