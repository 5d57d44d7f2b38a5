#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <utility>

#include "axmb/grid.hpp"

namespace axmb {

/// Staggered meridional velocity.
///  ur(j,k): face at r = j*dr (j = 0..Nr), height z_k.   Storage (Nr+1) x Nz.
///  uz(j,k): face at r_j, top of cell k (z_k + dz/2).   Storage Nr x Nz.
struct FaceVelocity {
    std::vector<double> ur;
    std::vector<double> uz;
};

/// Evolved fields plus the velocity recovered from Omega.
///
///   Gamma = r u_theta        (even, dirichlet0)
///   Omega = omega_theta / r  (even, dirichlet0)
///   H     = h_theta / r      (even, dirichlet0)
///   rho                      (even, neumann0)
///
/// psi, ur, uz and the face velocity are derived; they are refreshed by the
/// elliptic module after every mutation.
struct SimState {
    std::shared_ptr<const Grid> grid;
    double t = 0.0;
    double mu = 0.0;
    ScalarField gamma, omega, hfield, rho;
    ScalarField psi, ur, uz;
    FaceVelocity face;

    const Grid& g() const { return *grid; }
};

/// Zero state with all fields tagged per their boundary conditions.
SimState make_empty_state(std::shared_ptr<const Grid> grid, double mu);

enum class ProfileKind { zero, swirl_bump, magnetic_bump, thermal_bump, vortex_ring };

std::string to_string(ProfileKind k);
ProfileKind profile_kind_from_string(const std::string& s);

struct InitialProfile {
    ProfileKind kind = ProfileKind::zero;
    double amplitude = 0.0;
    double sigma = 1.0;
    double z_center = 0.0;

    bool operator==(const InitialProfile&) const = default;
};

/// One profile per evolved component.
struct InitialData {
    InitialProfile swirl;      // Gamma
    InitialProfile vorticity;  // Omega
    InitialProfile magnetic;   // H
    InitialProfile thermal;    // rho

    bool operator==(const InitialData&) const = default;
};

class ProfileError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Evaluates the analytic profile at (r,z). For swirl-bump this is Gamma, so
/// it carries the r^2 factor.
double evaluate_profile(const InitialProfile& p, double r, double z);

/// Builds the initial state and derives psi and the velocity. Throws
/// ProfileError when a profile is malformed or its support reaches the wall
/// or the ends of the z-period above 1e-12 of its peak.
SimState init_from_profiles(std::shared_ptr<const Grid> grid, const InitialData& data, double mu);

/// u_theta = Gamma / r (odd) and q = Gamma / r^2 (even).
std::pair<ScalarField, ScalarField> derived_swirl(const SimState& s);

/// omega_r = -d_z Gamma / r, omega_z = (1/r) d_r Gamma.
std::pair<ScalarField, ScalarField> swirl_vorticity(const SimState& s);

}  // namespace axmb
