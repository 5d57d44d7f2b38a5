#pragma once

// Stokes stream-function recovery and the staggered, exactly solenoidal
// meridional velocity.
//
// The stream function obeys  d_rr psi - (1/r) d_r psi + d_zz psi = -r^2 Omega.
// Writing psi = r^2 phi turns the operator into r^2 (d_rr + (3/r) d_r + d_zz) phi,
// whose cell-centred stencil stays non-degenerate at the axis (the plain
// d_minus stencil decouples the innermost cell from its neighbour). The solver
// therefore works on phi: a real FFT in the periodic z direction followed by
// one tridiagonal solve in r per z-mode.

#include <complex>
#include <memory>
#include <stdexcept>
#include <vector>

#include "axmb/grid.hpp"
#include "axmb/state.hpp"

namespace axmb {

class EllipticError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class StreamSolver {
public:
    explicit StreamSolver(const Grid& g);
    ~StreamSolver();
    StreamSolver(const StreamSolver&) = delete;
    StreamSolver& operator=(const StreamSolver&) = delete;

    /// psi (even, dirichlet0) for the given Omega. Not thread-safe; use one
    /// solver per thread.
    ScalarField solve(const ScalarField& omega);

    const Grid& grid() const { return grid_; }

private:
    Grid grid_;
    std::size_t nmodes_;
    std::vector<double> lower_, upper_;
    // Thomas factors per mode: modified upper coefficient and inverse pivot.
    std::vector<double> cprime_, inv_pivot_;
    std::vector<std::complex<double>> work_;
    struct FftwState;
    std::unique_ptr<FftwState> fftw_;
};

/// Max-norm residual of the regularised five-point discretisation,
/// max |r^2 d_plus(psi / r^2) + r^2 Omega|.
double stream_residual(const ScalarField& psi, const ScalarField& omega, const Grid& g);

/// Convenience wrapper that builds a one-off solver.
ScalarField solve_stream(const ScalarField& omega, const Grid& g);

struct Velocity {
    ScalarField ur;  // odd, dirichlet0, cell centres
    ScalarField uz;  // even, neumann0, cell centres
    FaceVelocity face;
};

/// u_r = -(1/r) d_z psi, u_z = (1/r) d_r psi from corner values of psi. The
/// wall corner uses psi's boundary tag.
Velocity velocity_from_stream(const ScalarField& psi, const Grid& g);

/// (1/(r dr)) Delta_r(r u_r) + Delta_z(u_z)/dz per cell.
ScalarField discrete_divergence(const FaceVelocity& face, const Grid& g);

/// Max |div| divided by max(|u_r|, |u_z|, 1) over the faces.
double relative_divergence(const FaceVelocity& face, const Grid& g);

/// Re-derives psi and the velocity of s from s.omega.
void refresh_derived(SimState& s, StreamSolver& solver);

}  // namespace axmb
