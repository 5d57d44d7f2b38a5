#pragma once

#include <array>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "axmb/config.hpp"
#include "axmb/grid.hpp"
#include "axmb/state.hpp"

namespace axmb {

class StreamSolver;

/// L^p exponents tracked for H and rho, in order.
inline constexpr std::array<double, 4> kTrackedExponents = {2.0, 4.0, 6.0, std::numeric_limits<double>::infinity()};

struct DiagnosticsRecord {
    double t = 0.0;
    double dt = 0.0;
    double l2_u = 0.0;    // all three velocity components
    double l2_h = 0.0;    // h_theta = r H
    double l2_rho = 0.0;
    std::array<double, 4> lp_H{};    // p = 2, 4, 6, inf
    std::array<double, 4> lp_rho{};  // p = 2, 4, 6, inf
    double linf_gamma = 0.0;
    double bkm_integrand = 0.0;
    double bkm_integral = 0.0;
    double linf_q = 0.0;
    double half_linf_omega_z = 0.0;
    std::optional<double> riesz_p2;
    double l2l6_omega = 0.0;
    double l2_J = 0.0;
    double l2_N = 0.0;
    double l2_gradH = 0.0;
    double h3_proxy = 0.0;
    double energy_residual = 0.0;
    double div_max = 0.0;
    double support_radius = 0.0;
    double rho_mass = 0.0;  // not part of the CSV contract

    double linf_rho() const { return lp_rho[3]; }
    double linf_H() const { return lp_H[3]; }
};

/// max over cells of |curl(u_theta e_theta)| = sqrt(omega_r^2 + omega_z^2).
double bkm_integrand(const SimState& s);

/// The same quantity assembled from u_theta = Gamma/r instead of Gamma,
/// as r * sqrt(J^2 + (omega_z / r)^2). Used as an internal cross-check.
double bkm_integrand_from_swirl(const SimState& s);

struct SwirlRatio {
    double lhs = 0.0;  // max |u_theta / r|
    double rhs = 0.0;  // max |omega_z| / 2
    bool satisfied = true;
};

SwirlRatio swirl_ratio_check(const SimState& s, double tol = 0.05);

struct Reformulated {
    ScalarField omega;    // as stored
    ScalarField j;        // omega_r / r = -d_z Gamma / r^2
    ScalarField n;        // (1/r) d_r rho
    ScalarField grad_h_r; // d_r H
    ScalarField grad_h_z; // d_z H
};

Reformulated reformulated_quantities(const SimState& s);

struct RieszRatios {
    /// ||grad b||_p / ||omega_theta||_p, absent when the denominator vanishes.
    std::optional<double> velocity_gradient;
    /// ||grad(u_r / r)||_p / ||Omega||_p, absent when the denominator vanishes.
    std::optional<double> ur_over_r;
};

/// p must lie in (1, inf).
RieszRatios riesz_ratio(const SimState& s, double p);

/// Sum of squared L^2 norms of all d_r^a d_z^b derivatives, a + b <= 3, of
/// (u_r, u_theta, u_z, h_theta, rho). A stand-in for the H^3 norm.
double h3_proxy(const SimState& s);

/// Squared L^2 norms of the velocity (three components) and of h = r H e_theta.
double kinetic_l2_squared(const SimState& s);
double magnetic_l2_squared(const SimState& s);

/// Instantaneous residual of the energy balance
///   dE/dt - int(rho u_z) + ||grad h||^2 + mu ||omega||^2,  E = (||u||^2 + ||h||^2)/2,
/// with dE/dt taken from the discrete right-hand side. The buoyancy work term
/// is dropped when buoyancy is switched off.
double energy_residual(const SimState& s, const SchemeConfig& scheme, StreamSolver* solver = nullptr);

/// Largest r_j at which any evolved field exceeds 1e-8 of its own maximum.
double support_radius(const SimState& s);

/// Trapezoidal integral of bkm_integrand over the series. Throws
/// std::invalid_argument on non-increasing times.
double bkm_accumulate(std::span<const DiagnosticsRecord> series);

/// Builds the full record for a state. `previous` feeds the running BKM
/// integral; `div_max` is the largest relative divergence seen since it.
DiagnosticsRecord make_record(const SimState& s, const SchemeConfig& scheme, double dt,
                              const DiagnosticsRecord* previous, double div_max, StreamSolver* solver = nullptr);

struct LedgerOptions {
    /// Allowed relative increase of an L^p norm between consecutive records.
    double lp_rel_tol = 1e-10;
    /// Allowed absolute increase of an L^inf norm over its initial value.
    double linf_abs_tol = 1e-12;
    /// |energy_residual| allowed at any record.
    double residual_tol = std::numeric_limits<double>::infinity();
};

struct LedgerViolation {
    std::size_t index = 0;
    double t = 0.0;
    std::string what;
};

struct LedgerReport {
    std::vector<LedgerViolation> violations;
    /// max over the run of ||(u,h)||^2 / (1+t)^2, and the same over the first 10%.
    double growth_max = 0.0;
    double growth_early = 0.0;
    bool ok() const { return violations.empty(); }
};

LedgerReport energy_ledger(std::span<const DiagnosticsRecord> series, const LedgerOptions& opts = {});

}  // namespace axmb
