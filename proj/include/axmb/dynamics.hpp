#pragma once

// Right-hand side of the reformulated axisymmetric system, SSP-RK3 stepping
// and the top-level run loop.
//
//   dGamma/dt = -b.grad Gamma + mu d_minus Gamma
//   dOmega/dt = -b.grad Omega + d_z(q^2) - d_z(H^2) - (1/r) d_r rho + mu d_plus Omega
//   dH/dt     = -b.grad H + d_plus H
//   drho/dt   = -b.grad rho + lap_cyl rho
//
// with q = Gamma / r^2 and b = (u_r, u_z) recovered from Omega.

#include <functional>
#include <stdexcept>
#include <vector>

#include "axmb/config.hpp"
#include "axmb/diagnostics.hpp"
#include "axmb/elliptic.hpp"
#include "axmb/grid.hpp"
#include "axmb/state.hpp"

namespace axmb {

class StepError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// -b.grad f in flux form on the staggered faces. Equals the advective form
/// because the face velocity is discretely solenoidal.
ScalarField advect(const ScalarField& f, const FaceVelocity& face, const Grid& g, Advection scheme);

struct Tendencies {
    ScalarField gamma, omega, hfield, rho;
};

Tendencies rhs(const SimState& s, const SchemeConfig& scheme);

/// Largest stable step: advective and diffusive limits on min(dr, dz).
double cfl_dt(const SimState& s, const SchemeConfig& scheme);

/// Owns the elliptic solver so repeated steps reuse FFT plans.
class Stepper {
public:
    Stepper(const Grid& g, SchemeConfig scheme);

    /// One SSP-RK3 step; psi and the velocity are re-derived after each stage.
    SimState step(const SimState& s, double dt);

    /// Largest relative divergence seen since the last call to reset_divergence().
    double max_divergence() const { return max_div_; }
    void reset_divergence() { max_div_ = 0.0; }

    StreamSolver& solver() { return solver_; }
    const SchemeConfig& scheme() const { return scheme_; }

private:
    SimState stage(const SimState& s, double dt);
    SchemeConfig scheme_;
    StreamSolver solver_;
    double max_div_ = 0.0;
};

SimState step(const SimState& s, double dt, const SchemeConfig& scheme);

struct RunHooks {
    /// Called after every completed step.
    std::function<void(const SimState&)> on_step;
    std::function<void(const SimState&, const DiagnosticsRecord&)> on_record;
    std::function<void(const SimState&)> on_snapshot;
};

struct RunResult {
    std::vector<DiagnosticsRecord> series;
    std::vector<SimState> snapshots;
};

/// Integrates from t = 0 to config.t_end. A record is emitted at t = 0 and
/// every output interval (the step is clamped to land on each output and
/// snapshot time). Deterministic for a fixed config.
RunResult run(const Config& config, const RunHooks& hooks = {});

/// Same as run() but starting from an explicit state.
RunResult run_from(SimState initial, const Config& config, const RunHooks& hooks = {});

}  // namespace axmb
