#include "axmb/state.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "axmb/elliptic.hpp"

namespace axmb {

SimState make_empty_state(std::shared_ptr<const Grid> grid, double mu) {
    SimState s;
    const Grid& g = *grid;
    s.grid = std::move(grid);
    s.mu = mu;
    s.gamma = ScalarField(g, Parity::even, Boundary::dirichlet0);
    s.omega = ScalarField(g, Parity::even, Boundary::dirichlet0);
    s.hfield = ScalarField(g, Parity::even, Boundary::dirichlet0);
    s.rho = ScalarField(g, Parity::even, Boundary::neumann0);
    s.psi = ScalarField(g, Parity::even, Boundary::dirichlet0);
    s.ur = ScalarField(g, Parity::odd, Boundary::dirichlet0);
    s.uz = ScalarField(g, Parity::even, Boundary::neumann0);
    s.face.ur.assign((g.nr() + 1) * g.nz(), 0.0);
    s.face.uz.assign(g.size(), 0.0);
    return s;
}

std::string to_string(ProfileKind k) {
    switch (k) {
        case ProfileKind::zero: return "zero";
        case ProfileKind::swirl_bump: return "swirl-bump";
        case ProfileKind::magnetic_bump: return "magnetic-bump";
        case ProfileKind::thermal_bump: return "thermal-bump";
        case ProfileKind::vortex_ring: return "vortex-ring";
    }
    return "zero";
}

ProfileKind profile_kind_from_string(const std::string& s) {
    for (ProfileKind k : {ProfileKind::zero, ProfileKind::swirl_bump, ProfileKind::magnetic_bump,
                          ProfileKind::thermal_bump, ProfileKind::vortex_ring})
        if (to_string(k) == s) return k;
    throw ProfileError("unknown profile kind '" + s + "'");
}

double evaluate_profile(const InitialProfile& p, double r, double z) {
    if (p.kind == ProfileKind::zero) return 0.0;
    const double dz = z - p.z_center;
    const double gauss = std::exp(-(r * r + dz * dz) / (p.sigma * p.sigma));
    if (p.kind == ProfileKind::swirl_bump) return p.amplitude * r * r * gauss;
    return p.amplitude * gauss;
}

namespace {

void check_profile(const InitialProfile& p, ProfileKind allowed, const char* slot, const Grid& g) {
    if (p.kind != ProfileKind::zero && p.kind != allowed)
        throw ProfileError(std::string("profile kind '") + to_string(p.kind) + "' is not valid for the " + slot +
                           " component");
    if (!(p.sigma > 0.0) || !std::isfinite(p.sigma))
        throw ProfileError(std::string(slot) + " profile needs sigma > 0");
    if (!std::isfinite(p.amplitude) || !std::isfinite(p.z_center))
        throw ProfileError(std::string(slot) + " profile has a non-finite parameter");
    if (p.kind == ProfileKind::zero || p.amplitude == 0.0) return;

    double peak = 0.0;
    for (std::size_t k = 0; k < g.nz(); ++k)
        for (std::size_t j = 0; j < g.nr(); ++j) peak = std::max(peak, std::abs(evaluate_profile(p, g.r(j), g.z(k))));
    double edge = 0.0;
    for (std::size_t k = 0; k < g.nz(); ++k) edge = std::max(edge, std::abs(evaluate_profile(p, g.radius(), g.z(k))));
    const double zlo = -0.5 * g.length(), zhi = 0.5 * g.length();
    for (std::size_t j = 0; j < g.nr(); ++j)
        edge = std::max({edge, std::abs(evaluate_profile(p, g.r(j), zlo)), std::abs(evaluate_profile(p, g.r(j), zhi))});
    if (!(edge <= 1e-12 * peak)) {
        std::ostringstream msg;
        msg << slot << " profile reaches the domain boundary (edge/peak = " << edge / peak
            << " > 1e-12); enlarge R or Lz, or narrow sigma";
        throw ProfileError(msg.str());
    }
}

}  // namespace

SimState init_from_profiles(std::shared_ptr<const Grid> grid, const InitialData& data, double mu) {
    if (!(mu >= 0.0)) throw ProfileError("viscosity mu must be non-negative");
    const Grid& g = *grid;
    check_profile(data.swirl, ProfileKind::swirl_bump, "swirl", g);
    check_profile(data.vorticity, ProfileKind::vortex_ring, "vorticity", g);
    check_profile(data.magnetic, ProfileKind::magnetic_bump, "magnetic", g);
    check_profile(data.thermal, ProfileKind::thermal_bump, "thermal", g);

    SimState s = make_empty_state(grid, mu);
    auto fill = [&](ScalarField& f, const InitialProfile& p) {
        for (std::size_t k = 0; k < g.nz(); ++k)
            for (std::size_t j = 0; j < g.nr(); ++j) f[g.index(j, k)] = evaluate_profile(p, g.r(j), g.z(k));
    };
    fill(s.gamma, data.swirl);
    fill(s.omega, data.vorticity);
    fill(s.hfield, data.magnetic);
    fill(s.rho, data.thermal);

    StreamSolver solver(g);
    refresh_derived(s, solver);
    return s;
}

std::pair<ScalarField, ScalarField> derived_swirl(const SimState& s) {
    return {times_r_pow(s.g(), s.gamma, -1), times_r_pow(s.g(), s.gamma, -2)};
}

std::pair<ScalarField, ScalarField> swirl_vorticity(const SimState& s) {
    const Grid& g = s.g();
    ScalarField omega_r = times_r_pow(g, ddz(s.gamma, g), -1);
    for (double& v : omega_r.values) v = -v;
    ScalarField omega_z = times_r_pow(g, ddr(s.gamma, g), -1);
    return {std::move(omega_r), std::move(omega_z)};
}

}  // namespace axmb
