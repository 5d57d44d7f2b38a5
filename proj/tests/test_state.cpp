#include <gtest/gtest.h>

#include <cmath>

#include "axmb/state.hpp"
#include "support.hpp"

using namespace axmb;
using axmb::test::make_grid;

TEST(State, ZeroProfilesGiveZeroState) {
    auto g = make_grid(16, 16, 1.0, 1.0);
    SimState s = init_from_profiles(g, InitialData{}, 0.0);
    for (const ScalarField* f : {&s.gamma, &s.omega, &s.hfield, &s.rho, &s.psi, &s.ur, &s.uz})
        EXPECT_EQ(f->max_abs(), 0.0);
    EXPECT_EQ(s.t, 0.0);
}

TEST(State, BoundaryTags) {
    auto g = make_grid(8, 8, 1.0, 1.0);
    SimState s = make_empty_state(g, 0.1);
    EXPECT_EQ(s.gamma.boundary, Boundary::dirichlet0);
    EXPECT_EQ(s.omega.boundary, Boundary::dirichlet0);
    EXPECT_EQ(s.hfield.boundary, Boundary::dirichlet0);
    EXPECT_EQ(s.rho.boundary, Boundary::neumann0);
    EXPECT_EQ(s.gamma.parity, Parity::even);
    EXPECT_EQ(s.ur.parity, Parity::odd);
    EXPECT_EQ(s.mu, 0.1);
}

TEST(State, SwirlBumpPeakVelocity) {
    // max_r r exp(-r^2/s^2) = s/sqrt(2) e^{-1/2}, reached at r = s/sqrt(2).
    const double sigma = 0.2;
    auto g = make_grid(1024, 241, 1.4, 2.8);  // odd Nz puts a centre on z = 0
    InitialData d;
    d.swirl = {ProfileKind::swirl_bump, 1.0, sigma, 0.0};
    SimState s = init_from_profiles(g, d, 0.0);
    const std::size_t k0 = (g->nz() - 1) / 2;
    ASSERT_NEAR(g->z(k0), 0.0, 1e-14);
    auto [u_theta, q] = derived_swirl(s);
    double peak = 0.0;
    for (std::size_t j = 0; j < g->nr(); ++j) peak = std::max(peak, u_theta[g->index(j, k0)]);
    const double expected = sigma / std::sqrt(2.0) * std::exp(-0.5);
    EXPECT_NEAR(peak, expected, 1e-5);
    EXPECT_NEAR(peak, 0.0858, 1e-4);
}

TEST(State, ProfilesAreEvenInR) {
    for (ProfileKind k : {ProfileKind::swirl_bump, ProfileKind::magnetic_bump, ProfileKind::thermal_bump,
                          ProfileKind::vortex_ring}) {
        InitialProfile p{k, 1.3, 0.4, 0.2};
        for (double r : {0.01, 0.3, 0.77})
            for (double z : {-0.5, 0.0, 0.9}) EXPECT_EQ(evaluate_profile(p, r, z), evaluate_profile(p, -r, z));
    }
}

TEST(State, InitIsDeterministic) {
    auto g = make_grid(32, 32, 4.0, 4.0);
    InitialData d = axmb::test::bump_data();
    d.vorticity = {ProfileKind::vortex_ring, 0.3, 0.35, 0.0};
    SimState a = init_from_profiles(g, d, 0.01), b = init_from_profiles(g, d, 0.01);
    EXPECT_EQ(a.gamma.values, b.gamma.values);
    EXPECT_EQ(a.omega.values, b.omega.values);
    EXPECT_EQ(a.psi.values, b.psi.values);
    EXPECT_EQ(a.ur.values, b.ur.values);
    EXPECT_EQ(a.face.uz, b.face.uz);
}

TEST(State, SupportTouchingWallIsRejected) {
    auto g = make_grid(32, 32, 1.0, 4.0);
    InitialData d;
    d.thermal = {ProfileKind::thermal_bump, 1.0, 0.5, 0.0};
    EXPECT_THROW(init_from_profiles(g, d, 0.0), ProfileError);
    // Same width in a wide enough box is fine.
    EXPECT_NO_THROW(init_from_profiles(make_grid(32, 32, 4.0, 6.0), d, 0.0));
}

TEST(State, SupportTouchingPeriodEndsIsRejected) {
    auto g = make_grid(32, 32, 4.0, 4.0);
    InitialData d;
    d.magnetic = {ProfileKind::magnetic_bump, 1.0, 0.35, 1.0};  // shifted towards z = 2
    EXPECT_THROW(init_from_profiles(g, d, 0.0), ProfileError);
}

TEST(State, MalformedProfilesAreRejected) {
    auto g = make_grid(16, 16, 4.0, 4.0);
    InitialData wrong_slot;
    wrong_slot.thermal = {ProfileKind::swirl_bump, 1.0, 0.3, 0.0};
    EXPECT_THROW(init_from_profiles(g, wrong_slot, 0.0), ProfileError);
    InitialData bad_sigma;
    bad_sigma.swirl = {ProfileKind::swirl_bump, 1.0, 0.0, 0.0};
    EXPECT_THROW(init_from_profiles(g, bad_sigma, 0.0), ProfileError);
    EXPECT_THROW(init_from_profiles(g, InitialData{}, -1.0), ProfileError);
}

TEST(State, ProfileNamesRoundTrip) {
    for (ProfileKind k : {ProfileKind::zero, ProfileKind::swirl_bump, ProfileKind::magnetic_bump,
                          ProfileKind::thermal_bump, ProfileKind::vortex_ring})
        EXPECT_EQ(profile_kind_from_string(to_string(k)), k);
    EXPECT_EQ(to_string(ProfileKind::swirl_bump), "swirl-bump");
    EXPECT_THROW(profile_kind_from_string("swirl_bump"), ProfileError);
}

TEST(DerivedSwirl, RigidRotation) {
    auto g = make_grid(16, 8, 1.0, 1.0);
    SimState s = make_empty_state(g, 0.0);
    s.gamma = sample(*g, [](double r, double) { return r * r; });
    auto [u, q] = derived_swirl(s);
    for (std::size_t k = 0; k < g->nz(); ++k)
        for (std::size_t j = 0; j < g->nr(); ++j) {
            EXPECT_NEAR(u[g->index(j, k)], g->r(j), 1e-14);
            EXPECT_NEAR(q[g->index(j, k)], 1.0, 1e-14);
        }
    EXPECT_EQ(u.parity, Parity::odd);
    EXPECT_EQ(q.parity, Parity::even);
}

TEST(DerivedSwirl, ZeroGamma) {
    auto g = make_grid(8, 8, 1.0, 1.0);
    SimState s = make_empty_state(g, 0.0);
    auto [u, q] = derived_swirl(s);
    EXPECT_EQ(u.max_abs(), 0.0);
    EXPECT_EQ(q.max_abs(), 0.0);
}

TEST(DerivedSwirl, QIndependentOfR) {
    auto g = make_grid(16, 32, 1.0, 6.0);
    SimState s = make_empty_state(g, 0.0);
    s.gamma = sample(*g, [](double r, double z) { return r * r * std::exp(-z * z); });
    auto q = derived_swirl(s).second;
    for (std::size_t k = 0; k < g->nz(); ++k)
        for (std::size_t j = 0; j < g->nr(); ++j)
            EXPECT_NEAR(q[g->index(j, k)], std::exp(-g->z(k) * g->z(k)), 1e-14);
}

TEST(DerivedSwirl, QNeverExceedsAnalyticBound) {
    // For the swirl bump u_theta / r = A exp(...) <= A.
    auto g = make_grid(64, 64, 4.0, 4.0);
    InitialData d;
    d.swirl = {ProfileKind::swirl_bump, 0.8, 0.35, 0.0};
    SimState s = init_from_profiles(g, d, 0.0);
    EXPECT_LE(derived_swirl(s).second.max_abs(), 0.8);
}

TEST(SwirlVorticity, RigidRotation) {
    auto g = make_grid(16, 8, 1.0, 1.0);
    SimState s = make_empty_state(g, 0.0);
    const double A = 1.5;
    s.gamma = sample(*g, [A](double r, double) { return A * r * r; });
    auto [wr, wz] = swirl_vorticity(s);
    EXPECT_LT(wr.max_abs(), 1e-12);
    for (std::size_t k = 0; k < g->nz(); ++k)
        for (std::size_t j = 0; j + 1 < g->nr(); ++j) EXPECT_NEAR(wz[g->index(j, k)], 2.0 * A, 1e-12);
}

TEST(SwirlVorticity, MatchesSymbolicDerivatives) {
    // Gamma = r^2 e^{-(r^2+z^2)}: u_theta = r e, omega_r = 2 z r e, omega_z = (2 - 2 r^2) e.
    std::vector<double> h, err;
    for (std::size_t n : {32u, 64u, 128u}) {
        auto g = make_grid(n, 2 * n, 6.0, 12.0);
        SimState s = make_empty_state(g, 0.0);
        s.gamma = sample(*g, [](double r, double z) { return r * r * std::exp(-(r * r + z * z)); });
        auto [wr, wz] = swirl_vorticity(s);
        double e = 0.0;
        for (std::size_t k = 0; k < g->nz(); ++k)
            for (std::size_t j = 0; j < g->nr(); ++j) {
                const double r = g->r(j), z = g->z(k), ex = std::exp(-(r * r + z * z));
                e = std::max(e, std::abs(wr[g->index(j, k)] - 2.0 * z * r * ex));
                e = std::max(e, std::abs(wz[g->index(j, k)] - (2.0 - 2.0 * r * r) * ex));
            }
        h.push_back(g->dr());
        err.push_back(e);
    }
    EXPECT_NEAR(axmb::test::convergence_slope(h, err), 2.0, 0.2);
}

TEST(State, MagneticFieldVanishesAtAxis) {
    auto g = make_grid(64, 64, 4.0, 4.0);
    SimState s = init_from_profiles(g, axmb::test::bump_data(), 0.0);
    ScalarField h_theta = times_r_pow(*g, s.hfield, 1);
    for (std::size_t k = 0; k < g->nz(); ++k)
        EXPECT_LE(std::abs(h_theta[g->index(0, k)]), 0.5 * g->dr() * s.hfield.max_abs() + 1e-15);
}
