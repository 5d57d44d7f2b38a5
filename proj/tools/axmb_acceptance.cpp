// Acceptance suite: one PASS/FAIL line per criterion, exit 1 if any fails.
//
// Run 1 is configs/bump.cfg (128^2, T = 1, upwind1); criteria 1-4, 7, 10
// and 11 are evaluated on it. The remaining criteria run their own studies.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <random>
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

struct Outcome {
    bool pass = false;
    std::string name;
    std::string detail;
};

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

double slope_vs_h(const std::vector<double>& h, const std::vector<double>& err) {
    double mx = 0, my = 0;
    const double n = static_cast<double>(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) {
        mx += std::log(h[i]) / n;
        my += std::log(err[i]) / n;
    }
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        const double dx = std::log(h[i]) - mx;
        sxy += dx * (std::log(err[i]) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

std::string list(const std::vector<double>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + num(v[i]);
    return s + "]";
}

void progress(const std::string& what) {
    static const auto start = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cerr << "[" << num(s) << " s] " << what << std::endl;
}

// Per-step bookkeeping for run 1.
struct StepWatch {
    double gamma0 = 0, h0 = 0, rho0 = 0, mass0 = 0;
    std::array<double, 3> lp_h_prev{}, lp_rho_prev{};
    double prev_gamma = 0, prev_h = 0, prev_rho = 0;
    bool max_ok = true, lp_ok = true;
    double worst_max_excess = 0.0, worst_lp_rel = 0.0, worst_mass = 0.0;
    std::string first_max_violation, first_lp_violation;
    std::size_t steps = 0;

    void start(const SimState& s) {
        const Grid& g = s.g();
        gamma0 = prev_gamma = s.gamma.max_abs();
        h0 = prev_h = s.hfield.max_abs();
        rho0 = prev_rho = s.rho.max_abs();
        mass0 = cyl_integral(s.rho, g);
        for (int i = 0; i < 3; ++i) {
            lp_h_prev[i] = cyl_lp_norm(s.hfield, g, kTrackedExponents[i]);
            lp_rho_prev[i] = cyl_lp_norm(s.rho, g, kTrackedExponents[i]);
        }
    }

    void check_max(const char* name, double now, double prev, double initial, double t) {
        const double excess = std::max(now - prev, now - initial);
        worst_max_excess = std::max(worst_max_excess, excess);
        if (excess > 1e-12 && max_ok) {
            max_ok = false;
            first_max_violation = std::string(name) + " at t=" + num(t);
        }
    }

    void check_lp(const char* name, double p, double now, double& prev, double t) {
        const double rel = prev > 0.0 ? (now - prev) / prev : (now > 0.0 ? 1.0 : 0.0);
        worst_lp_rel = std::max(worst_lp_rel, rel);
        if (rel > 1e-10 && lp_ok) {
            lp_ok = false;
            first_lp_violation = std::string(name) + " p=" + num(p) + " at t=" + num(t);
        }
        prev = now;
    }

    void observe(const SimState& s) {
        const Grid& g = s.g();
        ++steps;
        const double gm = s.gamma.max_abs(), hm = s.hfield.max_abs(), rm = s.rho.max_abs();
        check_max("max|Gamma|", gm, prev_gamma, gamma0, s.t);
        check_max("max|H|", hm, prev_h, h0, s.t);
        check_max("max|rho|", rm, prev_rho, rho0, s.t);
        prev_gamma = gm;
        prev_h = hm;
        prev_rho = rm;
        for (int i = 0; i < 3; ++i) {
            const double p = kTrackedExponents[i];
            check_lp("||H||", p, cyl_lp_norm(s.hfield, g, p), lp_h_prev[i], s.t);
            check_lp("||rho||", p, cyl_lp_norm(s.rho, g, p), lp_rho_prev[i], s.t);
        }
        const double m = cyl_integral(s.rho, g);
        worst_mass = std::max(worst_mass, std::abs(m - mass0) / (mass0 != 0.0 ? std::abs(mass0) : 1.0));
    }
};

double max_div(const std::vector<DiagnosticsRecord>& series) {
    double d = 0.0;
    for (const auto& r : series) d = std::max(d, r.div_max);
    return d;
}

// Trapezoid of |energy_residual| over the records.
double integrated_residual(const std::vector<DiagnosticsRecord>& series) {
    double acc = 0.0;
    for (std::size_t i = 1; i < series.size(); ++i)
        acc += 0.5 * (series[i].t - series[i - 1].t) *
               (std::abs(series[i].energy_residual) + std::abs(series[i - 1].energy_residual));
    return acc;
}

Config resized(Config c, std::size_t n) {
    c.nr = c.nz = n;
    c.snapshot_times.clear();
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria 1-11"};
    std::string config_dir = AXMB_SOURCE_DIR "/configs";
    std::string out_dir = "acceptance";
    unsigned threads = 0;
    app.add_option("--configs", config_dir, "directory holding bump.cfg and inviscid.cfg");
    app.add_option("--out", out_dir, "scratch directory for snapshots and tables");
    app.add_option("--threads", threads, "threads for the viscosity ladder (0 = hardware concurrency)");
    CLI11_PARSE(app, argc, argv);

    std::map<int, Outcome> out;
    double div_all = 0.0;  // criterion 3 spans every run below
    std::vector<std::string> div_runs;
    auto note_div = [&](const std::string& run, const std::vector<DiagnosticsRecord>& series) {
        div_all = std::max(div_all, max_div(series));
        div_runs.push_back(run);
    };

    try {
        const fs::path dir(out_dir);
        fs::create_directories(dir);
        const Config run1_cfg = load_config(fs::path(config_dir) / "bump.cfg");

        // ---- run 1 -------------------------------------------------------
        progress("run 1: " + std::to_string(run1_cfg.nr) + "x" + std::to_string(run1_cfg.nz) + " T=" +
                 num(run1_cfg.t_end) + " " + to_string(run1_cfg.scheme.advection));
        StepWatch watch;
        watch.start(init_from_profiles(
            std::make_shared<const Grid>(run1_cfg.nr, run1_cfg.nz, run1_cfg.radius, run1_cfg.length),
            run1_cfg.initial, run1_cfg.mu));
        double worst_swirl = 0.0;
        bool swirl_ok = true;
        std::vector<fs::path> snapshot_files;
        RunHooks hooks;
        hooks.on_step = [&](const SimState& s) { watch.observe(s); };
        hooks.on_record = [&](const SimState& s, const DiagnosticsRecord&) {
            SwirlRatio r = swirl_ratio_check(s);
            if (r.rhs > 0.0) worst_swirl = std::max(worst_swirl, r.lhs / r.rhs);
            swirl_ok = swirl_ok && r.satisfied;
        };
        hooks.on_snapshot = [&](const SimState& s) {
            char name[64];
            std::snprintf(name, sizeof name, "snapshot_%03zu.axmb", snapshot_files.size());
            snapshot_files.push_back(dir / name);
            write_snapshot(s, snapshot_files.back());
        };
        RunResult run1 = run(run1_cfg, hooks);
        note_div("run 1", run1.series);
        progress("run 1 done, " + std::to_string(watch.steps) + " steps");

        {
            const auto& s = run1.series;
            bool rec_ok = true;
            for (std::size_t i = 1; i < s.size(); ++i) {
                rec_ok = rec_ok && s[i].linf_gamma <= s[i - 1].linf_gamma + 1e-12 &&
                         s[i].linf_H() <= s[i - 1].linf_H() + 1e-12 && s[i].linf_rho() <= s[i - 1].linf_rho() + 1e-12;
            }
            out[1] = {watch.max_ok && rec_ok, "maximum principles (max|rho|, max|H|, max|Gamma|)",
                      "worst increase " + num(watch.worst_max_excess) + " over " + std::to_string(watch.steps) +
                          " steps, tol 1e-12; final/initial Gamma " + num(s.back().linf_gamma / s.front().linf_gamma) +
                          " H " + num(s.back().linf_H() / s.front().linf_H()) + " rho " +
                          num(s.back().linf_rho() / s.front().linf_rho()) +
                          (watch.max_ok ? "" : "; first violation " + watch.first_max_violation)};
            out[2] = {watch.lp_ok, "L^p monotonicity of H and rho, p = 2, 4, 6",
                      "worst relative increase per step " + num(watch.worst_lp_rel) + ", tol 1e-10" +
                          (watch.lp_ok ? "" : "; first violation " + watch.first_lp_violation)};
            double rec_mass = 0.0;
            for (const auto& r : s)
                rec_mass = std::max(rec_mass, std::abs(r.rho_mass - s.front().rho_mass) / std::abs(s.front().rho_mass));
            const double drift = std::max(watch.worst_mass, rec_mass);
            out[4] = {drift <= 1e-11, "thermal mass conservation", "relative drift " + num(drift) + ", tol 1e-11"};
        }

        // ---- criterion 10: finiteness and determinism -----------------------
        progress("run 1 repeat for determinism");
        {
            bool finite = true;
            for (const auto& r : run1.series)
                finite = finite && std::isfinite(r.bkm_integral) && std::isfinite(r.h3_proxy) &&
                         std::isfinite(r.bkm_integrand);
            Config again = run1_cfg;
            again.snapshot_times.clear();
            RunResult rep = run(again);
            note_div("run 1 repeat", rep.series);
            bool identical = rep.series.size() == run1.series.size();
            for (std::size_t i = 0; identical && i < rep.series.size(); ++i)
                identical = timeseries_row(rep.series[i]) == timeseries_row(run1.series[i]);
            double h3_max = 0.0;
            for (const auto& r : run1.series) h3_max = std::max(h3_max, r.h3_proxy);
            out[10] = {finite && identical, "BKM bookkeeping: finiteness and determinism",
                       "bkm_integral(T) " + num(run1.series.back().bkm_integral) + ", max h3_proxy " + num(h3_max) +
                           ", repeat run " + (identical ? "bit-identical" : "DIFFERS")};
        }

        // ---- criterion 11: snapshot round trip ------------------------------
        {
            bool exact = !snapshot_files.empty() && snapshot_files.size() == run1.snapshots.size();
            double worst = 0.0;
            for (std::size_t i = 0; exact && i < snapshot_files.size(); ++i) {
                const SimState& mem = run1.snapshots[i];
                SimState back = read_snapshot(snapshot_files[i]);
                exact = back.t == mem.t && back.mu == mem.mu && back.gamma.values == mem.gamma.values &&
                        back.omega.values == mem.omega.values && back.hfield.values == mem.hfield.values &&
                        back.rho.values == mem.rho.values;
                const DiagnosticsRecord* row = nullptr;
                for (const auto& r : run1.series)
                    if (std::abs(r.t - back.t) <= 1e-12) row = &r;
                if (!row) {
                    exact = false;
                    break;
                }
                StreamSolver solver(back.g());
                DiagnosticsRecord d =
                    make_record(back, run1_cfg.scheme, 0.0, nullptr, relative_divergence(back.face, back.g()), &solver);
                auto rel = [](double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); };
                for (auto [a, b] : {std::pair{d.bkm_integrand, row->bkm_integrand}, {d.h3_proxy, row->h3_proxy},
                                    {d.l2_u, row->l2_u}, {d.l2_h, row->l2_h}, {d.l2_rho, row->l2_rho},
                                    {d.linf_q, row->linf_q}, {d.energy_residual, row->energy_residual},
                                    {d.l2l6_omega, row->l2l6_omega}, {d.support_radius, row->support_radius}})
                    worst = std::max(worst, rel(a, b));
            }
            out[11] = {exact && worst <= 1e-12, "snapshot round trip and diagnose-vs-series consistency",
                       std::to_string(snapshot_files.size()) + " snapshots, primary fields " +
                           (exact ? "bit-exact" : "NOT exact") + ", worst diagnostic mismatch " + num(worst) +
                           ", tol 1e-12"};
        }

        // ---- criterion 5: elliptic manufactured solution -------------------
        progress("elliptic manufactured solution");
        {
            const double R = 1.0, L = 2.0, k = 2.0 * std::numbers::pi / L;
            std::vector<double> h, err;
            double worst_res = 0.0;
            for (std::size_t n : {64u, 128u, 256u}) {
                Grid g(n, n, R, L);
                ScalarField omega =
                    sample(g, [&](double r, double z) { return (8.0 + k * k * (R * R - r * r)) * std::sin(k * z); });
                ScalarField psi = solve_stream(omega, g);
                double e = 0.0;
                for (std::size_t kk = 0; kk < g.nz(); ++kk)
                    for (std::size_t j = 0; j < g.nr(); ++j) {
                        const double r = g.r(j), z = g.z(kk);
                        e = std::max(e, std::abs(psi[g.index(j, kk)] - r * r * (R * R - r * r) * std::sin(k * z)));
                    }
                h.push_back(g.dr());
                err.push_back(e);
                worst_res = std::max(worst_res, stream_residual(psi, omega, g));
            }
            const double slope = slope_vs_h(h, err);
            out[5] = {std::abs(slope - 2.0) <= 0.2 && worst_res <= 1e-10, "elliptic manufactured solution",
                      "slope " + num(slope) + " (2 +- 0.2), max errors " + list(err) + ", max residual " +
                          num(worst_res) + " (tol 1e-10)"};
        }

        // ---- criterion 6: heat kernel ---------------------------------------
        progress("heat kernel");
        {
            const double s0 = 0.5, t_end = 0.05;
            std::vector<double> h, err;
            for (std::size_t n : {32u, 64u, 128u}) {
                Config c;
                c.nr = n;
                c.nz = 2 * n;
                c.radius = 4.0;
                c.length = 8.0;
                c.t_end = t_end;
                c.dt_out = t_end / 5.0;
                c.snapshot_times = {t_end};
                c.initial.thermal = {ProfileKind::thermal_bump, 1.0, s0, 0.0};
                c.scheme.buoyancy = false;
                RunResult r = run(c);
                note_div("heat " + std::to_string(n), r.series);
                const SimState& fin = r.snapshots.at(0);
                const double w = s0 * s0 + 4.0 * t_end;
                ScalarField exact = sample(fin.g(), [&](double rr, double z) {
                    return std::pow(s0 * s0 / w, 1.5) * std::exp(-(rr * rr + z * z) / w);
                });
                h.push_back(fin.g().dr());
                err.push_back(cyl_lp_norm(axpby(1.0, fin.rho, -1.0, exact), fin.g(), 2.0));
            }
            const double slope = slope_vs_h(h, err);
            out[6] = {slope >= 1.8, "heat-kernel oracle",
                      "L2 errors " + list(err) + " at N = 32, 64, 128 (dt ~ h^2), slope " + num(slope) + " (>= 1.8)"};
        }

        // ---- criterion 7: swirl ratio ---------------------------------------
        progress("swirl ratio on random profiles");
        {
            std::mt19937 rng(1234567);
            std::uniform_real_distribution<double> amp(0.1, 3.0), sig(0.2, 0.5), zc(-0.3, 0.3);
            auto g = std::make_shared<const Grid>(256, 384, 4.0, 6.0);
            bool random_ok = true;
            double worst_random = 0.0;
            for (int draw = 0; draw < 10; ++draw) {
                InitialData d;
                d.swirl = {ProfileKind::swirl_bump, amp(rng), sig(rng), zc(rng)};
                SwirlRatio r = swirl_ratio_check(init_from_profiles(g, d, 0.0));
                worst_random = std::max(worst_random, r.lhs / r.rhs);
                random_ok = random_ok && r.satisfied;
            }
            out[7] = {swirl_ok && random_ok, "swirl ratio ||u_theta/r||_inf <= 1/2 ||omega_z||_inf",
                      "worst lhs/rhs over run 1 records " + num(worst_swirl) + ", over 10 random profiles at 256x384 " +
                          num(worst_random) + ", tol 1.05"};
        }

        // ---- criterion 8: energy balance ------------------------------------
        {
            Config base = run1_cfg;
            base.scheme.advection = Advection::centered2;
            std::vector<double> h, res;
            for (std::size_t n : {64u, 128u, 256u}) {
                progress("energy residual, centered2 " + std::to_string(n) + "^2");
                RunResult r = run(resized(base, n));
                note_div("energy " + std::to_string(n), r.series);
                h.push_back(run1_cfg.radius / static_cast<double>(n));
                res.push_back(integrated_residual(r.series));
            }
            const double slope = slope_vs_h(h, res);
            // upwind1 for reference: run 1 supplies the 128^2 point.
            progress("energy residual, upwind1 64^2 (reference only)");
            RunResult up64 = run(resized(run1_cfg, 64));
            note_div("energy upwind 64", up64.series);
            const double up_slope = std::log(integrated_residual(up64.series) / integrated_residual(run1.series)) /
                                    std::log(static_cast<double>(run1_cfg.nr) / 64.0);
            out[8] = {slope >= 1.8, "energy balance residual convergence",
                      "centered2 int|res|dt " + list(res) + " at 64, 128, 256, slope " + num(slope) +
                          " (>= 1.8); upwind1 64->128 slope " + num(up_slope) + " (first order, reference only)"};
        }

        // ---- criterion 9: inviscid limit ------------------------------------
        progress("inviscid limit");
        {
            Config c = load_config(fs::path(config_dir) / "inviscid.cfg");
            InviscidLimitOptions o;
            o.threads = threads;
            o.on_result = [](double mu, const FieldErrors& e) { progress("  mu=" + num(mu) + " error " + num(e.sum())); };
            ExperimentResult r = inviscid_limit(c, {1e-2, 5e-3, 2.5e-3, 1.25e-3}, o);
            write_experiment(r, dir);
            std::vector<double> sums;
            for (const auto& e : r.errors) sums.push_back(e.sum());
            const bool ok = r.fit && r.floor_ok && r.fit->slope >= 0.8 && r.fit->slope <= 1.2 && r.fit->r_squared >= 0.98;
            out[9] = {ok, "inviscid-limit rate",
                      "errors " + list(sums) + ", floor " + num(r.floor) + (r.floor_ok ? " (gate ok)" : " (gate FAILED)") +
                          (r.fit ? ", slope " + num(r.fit->slope) + " in [0.8, 1.2], r^2 " + num(r.fit->r_squared) +
                                       " (>= 0.98)"
                                 : ", no fit: fewer than 3 points above 10x floor")};
        }

        out[3] = {div_all <= 1e-12, "structural solenoidality",
                  "max relative divergence " + num(div_all) + " over every step of " + std::to_string(div_runs.size()) +
                      " runs, tol 1e-12"};
    } catch (const std::exception& e) {
        std::cerr << "acceptance aborted: " << e.what() << "\n";
    }

    int failures = 0;
    for (int id = 1; id <= 11; ++id) {
        auto it = out.find(id);
        if (it == out.end()) {
            std::cout << "FAIL " << id << " not evaluated (aborted)\n";
            ++failures;
            continue;
        }
        std::cout << (it->second.pass ? "PASS " : "FAIL ") << id << " " << it->second.name << ": " << it->second.detail
                  << "\n";
        if (!it->second.pass) ++failures;
    }
    return failures ? 1 : 0;
}
