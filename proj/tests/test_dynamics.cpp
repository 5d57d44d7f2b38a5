#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "axmb/dynamics.hpp"
#include "support.hpp"

using namespace axmb;
using axmb::test::make_grid;

namespace {

Config heat_config(std::size_t n, double t_end) {
    Config c;
    c.nr = n;
    c.nz = 2 * n;
    c.radius = 4.0;
    c.length = 8.0;
    c.t_end = t_end;
    c.dt_out = t_end;
    c.initial.thermal = {ProfileKind::thermal_bump, 1.0, 0.5, 0.0};
    c.scheme.buoyancy = false;
    return c;
}

// Free-space heat kernel started from exp(-|x|^2 / s^2).
double heat_kernel(double r, double z, double s, double t) {
    const double w = s * s + 4.0 * t;
    return std::pow(s * s / w, 1.5) * std::exp(-(r * r + z * z) / w);
}

double heat_error(std::size_t n, double t_end) {
    Config c = heat_config(n, t_end);
    c.snapshot_times = {t_end};
    SimState last = run(c).snapshots.at(0);
    const Grid& g = last.g();
    ScalarField exact = sample(g, [&](double r, double z) { return heat_kernel(r, z, 0.5, t_end); });
    return cyl_lp_norm(axpby(1.0, last.rho, -1.0, exact), g, 2.0);
}

}  // namespace

TEST(Rhs, ZeroStateHasZeroTendencies) {
    auto g = make_grid(16, 16, 1.0, 1.0);
    SimState s = make_empty_state(g, 0.1);
    for (Advection a : {Advection::centered2, Advection::upwind1}) {
        SchemeConfig sc;
        sc.advection = a;
        Tendencies t = rhs(s, sc);
        EXPECT_EQ(t.gamma.max_abs(), 0.0);
        EXPECT_EQ(t.omega.max_abs(), 0.0);
        EXPECT_EQ(t.hfield.max_abs(), 0.0);
        EXPECT_EQ(t.rho.max_abs(), 0.0);
    }
}

TEST(Rhs, SwirlSourceFromZIndependentRotation) {
    // Gamma = A r^2 e^{-z^2}: q = A e^{-z^2}, d_z(q^2) = -4 A^2 z e^{-2 z^2}.
    const double A = 0.7;
    std::vector<double> h, err;
    for (std::size_t n : {32u, 64u, 128u}) {
        auto g = make_grid(8, n, 1.0, 10.0);
        SimState s = make_empty_state(g, 0.0);
        s.gamma = sample(*g, [A](double r, double z) { return A * r * r * std::exp(-z * z); });
        Tendencies t = rhs(s, SchemeConfig{});
        EXPECT_EQ(t.gamma.max_abs(), 0.0);
        double e = 0.0;
        for (std::size_t k = 0; k < g->nz(); ++k)
            for (std::size_t j = 0; j < g->nr(); ++j) {
                const double z = g->z(k);
                e = std::max(e, std::abs(t.omega[g->index(j, k)] + 4.0 * A * A * z * std::exp(-2.0 * z * z)));
            }
        h.push_back(g->dz());
        err.push_back(e);
    }
    EXPECT_NEAR(axmb::test::convergence_slope(h, err), 2.0, 0.2);
}

TEST(Rhs, MagneticSource) {
    // H = e^{-(r^2+z^2)}: -d_z(H^2) = 4 z e^{-2(r^2+z^2)}.
    std::vector<double> h, err;
    for (std::size_t n : {32u, 64u, 128u}) {
        auto g = make_grid(n, 2 * n, 5.0, 10.0);
        SimState s = make_empty_state(g, 0.0);
        s.hfield = sample(*g, [](double r, double z) { return std::exp(-(r * r + z * z)); });
        Tendencies t = rhs(s, SchemeConfig{});
        double e = 0.0;
        for (std::size_t k = 0; k < g->nz(); ++k)
            for (std::size_t j = 0; j < g->nr(); ++j) {
                const double r = g->r(j), z = g->z(k);
                e = std::max(e, std::abs(t.omega[g->index(j, k)] - 4.0 * z * std::exp(-2.0 * (r * r + z * z))));
            }
        h.push_back(g->dz());
        err.push_back(e);
    }
    EXPECT_NEAR(axmb::test::convergence_slope(h, err), 2.0, 0.2);
}

TEST(Rhs, SourceTogglesSilenceTheirTerms) {
    auto g = make_grid(32, 32, 4.0, 4.0);
    SimState s = init_from_profiles(g, axmb::test::bump_data(), 0.0);
    SchemeConfig off;
    off.buoyancy = off.magnetic_source = off.swirl_source = false;
    // With Omega = 0 the velocity vanishes, so only the sources drive Omega.
    EXPECT_GT(rhs(s, SchemeConfig{}).omega.max_abs(), 0.0);
    EXPECT_EQ(rhs(s, off).omega.max_abs(), 0.0);
}

TEST(Advect, ConstantIsPreserved) {
    auto g = make_grid(24, 24, 2.0, 3.0);
    SimState s = make_empty_state(g, 0.0);
    s.omega = sample(*g, [](double r, double z) { return std::exp(-4.0 * (r * r + z * z)) * (1.0 + z); });
    StreamSolver solver(*g);
    refresh_derived(s, solver);
    ScalarField c = sample(*g, [](double, double) { return 2.0; }, Parity::even, Boundary::neumann0);
    for (Advection a : {Advection::centered2, Advection::upwind1})
        EXPECT_LT(advect(c, s.face, *g, a).max_abs(), 1e-12);
}

TEST(Advect, ConservesIntegral) {
    auto g = make_grid(24, 24, 2.0, 3.0);
    SimState s = make_empty_state(g, 0.0);
    s.omega = sample(*g, [](double r, double z) { return std::exp(-4.0 * (r * r + (z - 0.2) * (z - 0.2))); });
    StreamSolver solver(*g);
    refresh_derived(s, solver);
    ScalarField f = sample(*g, [](double r, double z) { return std::exp(-(r * r + z * z)); });
    for (Advection a : {Advection::centered2, Advection::upwind1})
        EXPECT_LT(std::abs(cyl_integral(advect(f, s.face, *g, a), *g)), 1e-13);
}

TEST(Cfl, ZeroVelocityIsDiffusionLimited) {
    auto g = make_grid(16, 16, 1.0, 1.0);
    SimState s = make_empty_state(g, 0.0);
    SchemeConfig sc;
    EXPECT_DOUBLE_EQ(cfl_dt(s, sc), sc.cfl_diff * g->dr() * g->dr());
}

TEST(Cfl, AdvectiveVersusDiffusiveBound) {
    // max|u| = 10 and h = 0.01: advective 4e-4 loses to diffusive 2e-5.
    auto g = make_grid(100, 100, 1.0, 1.0);
    SimState s = make_empty_state(g, 0.0);
    s.uz[g->index(50, 50)] = 10.0;
    SchemeConfig sc;
    EXPECT_NEAR(cfl_dt(s, sc), 2e-5, 1e-18);
    sc.cfl_diff = 0.5;
    s.uz[g->index(50, 50)] = 1000.0;
    EXPECT_NEAR(cfl_dt(s, sc), 0.4 * 0.01 / 1000.0, 1e-18);
}

TEST(Cfl, SwirlVelocityCounts) {
    auto g = make_grid(10, 10, 1.0, 1.0);
    SimState s = make_empty_state(g, 0.0);
    s.gamma[g->index(9, 3)] = 1000.0 * g->r(9);  // u_theta = 1000
    SchemeConfig sc;
    EXPECT_NEAR(cfl_dt(s, sc), 0.4 * 0.1 / 1000.0, 1e-15);
}

TEST(Cfl, DoublingResolutionQuartersDt) {
    SchemeConfig sc;
    const double a = cfl_dt(make_empty_state(make_grid(16, 16, 1.0, 1.0), 0.0), sc);
    const double b = cfl_dt(make_empty_state(make_grid(32, 32, 1.0, 1.0), 0.0), sc);
    EXPECT_NEAR(a / b, 4.0, 1e-12);
}

TEST(Cfl, LargeViscosityTightensDiffusiveBound) {
    auto g = make_grid(16, 16, 1.0, 1.0);
    SchemeConfig sc;
    EXPECT_NEAR(cfl_dt(make_empty_state(g, 4.0), sc), sc.cfl_diff * g->dr() * g->dr() / 4.0, 1e-18);
}

TEST(Step, ZeroStateStaysZero) {
    auto g = make_grid(16, 16, 1.0, 1.0);
    SimState s = make_empty_state(g, 0.0);
    SimState n = step(s, 1e-3, SchemeConfig{});
    EXPECT_DOUBLE_EQ(n.t, 1e-3);
    EXPECT_EQ(n.gamma.max_abs() + n.omega.max_abs() + n.hfield.max_abs() + n.rho.max_abs(), 0.0);
}

TEST(Step, KeepsVelocitySolenoidalAndDerivedFieldsConsistent) {
    auto g = make_grid(32, 32, 4.0, 4.0);
    InitialData d = axmb::test::bump_data(1.0, 0.5, 0.5);
    d.vorticity = {ProfileKind::vortex_ring, 0.5, 0.35, 0.0};
    SimState s = init_from_profiles(g, d, 0.01);
    SchemeConfig sc;
    Stepper stepper(*g, sc);
    for (int i = 0; i < 10; ++i) {
        s = stepper.step(s, cfl_dt(s, sc));
        EXPECT_LE(relative_divergence(s.face, *g), 1e-12);
    }
    EXPECT_LE(stepper.max_divergence(), 1e-12);
    ScalarField psi = solve_stream(s.omega, *g);
    EXPECT_LT(axmb::test::max_abs_diff(psi, s.psi), 1e-14 * (1.0 + psi.max_abs()));
}

TEST(Step, NonFiniteInputNamesTheField) {
    auto g = make_grid(16, 16, 1.0, 1.0);
    SimState s = make_empty_state(g, 0.0);
    s.hfield[g->index(4, 4)] = std::numeric_limits<double>::quiet_NaN();
    try {
        step(s, 1e-4, SchemeConfig{});
        FAIL() << "expected StepError";
    } catch (const StepError& e) {
        EXPECT_NE(std::string(e.what()).find("H"), std::string::npos) << e.what();
    }
}

TEST(Step, ConservesThermalMass) {
    auto g = make_grid(32, 32, 4.0, 4.0);
    SimState s = init_from_profiles(g, axmb::test::bump_data(1.0, 0.5, 0.5), 0.0);
    const double m0 = cyl_integral(s.rho, *g);
    SchemeConfig sc;
    sc.advection = Advection::upwind1;
    Stepper stepper(*g, sc);
    for (int i = 0; i < 20; ++i) s = stepper.step(s, cfl_dt(s, sc));
    EXPECT_LE(std::abs(cyl_integral(s.rho, *g) - m0), 1e-12 * std::abs(m0));
}

TEST(Step, HeatKernelConvergesAtSecondOrder) {
    const double t_end = 0.05;
    std::vector<double> h, err;
    for (std::size_t n : {16u, 32u, 64u}) {
        h.push_back(4.0 / static_cast<double>(n));
        err.push_back(heat_error(n, t_end));
    }
    EXPECT_GE(axmb::test::convergence_slope(h, err), 1.8);
    EXPECT_LT(err.back(), 1e-3);
}

TEST(Run, ZeroHorizonGivesSingleInitialRecord) {
    Config c = heat_config(16, 0.0);
    RunResult r = run(c);
    ASSERT_EQ(r.series.size(), 1u);
    EXPECT_EQ(r.series[0].t, 0.0);
    auto g = make_grid(c.nr, c.nz, c.radius, c.length);
    SimState s = init_from_profiles(g, c.initial, 0.0);
    EXPECT_EQ(r.series[0].lp_rho, make_record(s, c.scheme, 0.0, nullptr, 0.0).lp_rho);
}

TEST(Run, RecordsLandOnOutputTimes) {
    Config c = heat_config(16, 0.02);
    c.dt_out = 0.005;
    c.snapshot_times = {0.0125};
    RunResult r = run(c);
    ASSERT_EQ(r.series.size(), 5u);
    for (std::size_t i = 0; i < r.series.size(); ++i) EXPECT_NEAR(r.series[i].t, 0.005 * i, 1e-15);
    ASSERT_EQ(r.snapshots.size(), 1u);
    EXPECT_NEAR(r.snapshots[0].t, 0.0125, 1e-15);
}

TEST(Run, IsDeterministic) {
    Config c;
    c.nr = c.nz = 32;
    c.radius = c.length = 4.0;
    c.t_end = 0.05;
    c.dt_out = 0.01;
    c.initial = axmb::test::bump_data(1.0, 0.5, 0.5);
    RunResult a = run(c), b = run(c);
    ASSERT_EQ(a.series.size(), b.series.size());
    for (std::size_t i = 0; i < a.series.size(); ++i) {
        EXPECT_EQ(a.series[i].l2_u, b.series[i].l2_u);
        EXPECT_EQ(a.series[i].bkm_integral, b.series[i].bkm_integral);
        EXPECT_EQ(a.series[i].h3_proxy, b.series[i].h3_proxy);
    }
}

TEST(Run, UpwindMaximumPrinciple) {
    Config c;
    c.nr = c.nz = 32;
    c.radius = c.length = 4.0;
    c.t_end = 0.2;
    c.dt_out = 0.01;
    c.initial = axmb::test::bump_data(1.0, 0.5, 0.5);
    c.scheme.advection = Advection::upwind1;
    RunResult r = run(c);
    const auto& s0 = r.series.front();
    for (const auto& rec : r.series) {
        EXPECT_LE(rec.linf_gamma, s0.linf_gamma + 1e-12);
        EXPECT_LE(rec.linf_H(), s0.linf_H() + 1e-12);
        EXPECT_LE(rec.linf_rho(), s0.linf_rho() + 1e-12);
    }
}
