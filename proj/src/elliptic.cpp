#include "axmb/elliptic.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>

namespace axmb {

namespace {

// FFTW planning is not re-entrant; execution with distinct buffers is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

constexpr double kResidualTolerance = 1e-10;

}  // namespace

struct StreamSolver::FftwState {
    double* real = nullptr;
    fftw_complex* spec = nullptr;
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;

    ~FftwState() {
        std::lock_guard lock(planner_mutex());
        if (forward) fftw_destroy_plan(forward);
        if (backward) fftw_destroy_plan(backward);
        if (real) fftw_free(real);
        if (spec) fftw_free(spec);
    }
};

StreamSolver::StreamSolver(const Grid& g) : grid_(g), nmodes_(g.nz() / 2 + 1), fftw_(std::make_unique<FftwState>()) {
    const std::size_t nr = g.nr(), nz = g.nz();
    const double idr2 = 1.0 / (g.dr() * g.dr());
    lower_.resize(nr);
    upper_.resize(nr);
    std::vector<double> diag(nr);
    for (std::size_t j = 0; j < nr; ++j) {
        const double a = 1.5 / (g.r(j) * g.dr());
        lower_[j] = idr2 - a;
        upper_[j] = idr2 + a;
        diag[j] = -2.0 * idr2;
    }
    // Mirror-even ghost at the axis, antisymmetric ghost (phi = 0 on the wall).
    diag[0] += lower_[0];
    lower_[0] = 0.0;
    diag[nr - 1] -= upper_[nr - 1];
    upper_[nr - 1] = 0.0;

    cprime_.resize(nmodes_ * nr);
    inv_pivot_.resize(nmodes_ * nr);
    const double idz2 = 1.0 / (g.dz() * g.dz());
    for (std::size_t m = 0; m < nmodes_; ++m) {
        const double s = std::sin(std::numbers::pi * static_cast<double>(m) / static_cast<double>(nz));
        const double lambda = 4.0 * idz2 * s * s;
        double cprev = 0.0;
        for (std::size_t j = 0; j < nr; ++j) {
            const double pivot = diag[j] - lambda - lower_[j] * cprev;
            inv_pivot_[m * nr + j] = 1.0 / pivot;
            cprev = upper_[j] / pivot;
            cprime_[m * nr + j] = cprev;
        }
    }
    work_.resize(nr);

    std::lock_guard lock(planner_mutex());
    fftw_->real = fftw_alloc_real(nr * nz);
    fftw_->spec = fftw_alloc_complex(nr * nmodes_);
    int n[] = {static_cast<int>(nz)};
    const int howmany = static_cast<int>(nr);
    const int stride = static_cast<int>(nr);
    // FFTW_ESTIMATE keeps plan selection, and hence rounding, deterministic.
    fftw_->forward = fftw_plan_many_dft_r2c(1, n, howmany, fftw_->real, nullptr, stride, 1, fftw_->spec, nullptr,
                                            stride, 1, FFTW_ESTIMATE);
    fftw_->backward = fftw_plan_many_dft_c2r(1, n, howmany, fftw_->spec, nullptr, stride, 1, fftw_->real, nullptr,
                                             stride, 1, FFTW_ESTIMATE);
    if (!fftw_->forward || !fftw_->backward) throw EllipticError("FFTW plan creation failed");
}

StreamSolver::~StreamSolver() = default;

ScalarField StreamSolver::solve(const ScalarField& omega) {
    const Grid& g = grid_;
    const std::size_t nr = g.nr(), nz = g.nz();
    if (omega.size() != g.size()) throw EllipticError("Omega does not match the solver grid");

    double* real = fftw_->real;
    for (std::size_t i = 0; i < g.size(); ++i) real[i] = -omega[i];
    fftw_execute_dft_r2c(fftw_->forward, real, fftw_->spec);

    auto* spec = reinterpret_cast<std::complex<double>*>(fftw_->spec);
    for (std::size_t m = 0; m < nmodes_; ++m) {
        const double* cp = &cprime_[m * nr];
        const double* ip = &inv_pivot_[m * nr];
        std::complex<double> prev{0.0, 0.0};
        for (std::size_t j = 0; j < nr; ++j) {
            prev = (spec[j + nr * m] - lower_[j] * prev) * ip[j];
            work_[j] = prev;
        }
        for (std::size_t j = nr - 1; j-- > 0;) work_[j] -= cp[j] * work_[j + 1];
        for (std::size_t j = 0; j < nr; ++j) spec[j + nr * m] = work_[j];
    }
    fftw_execute_dft_c2r(fftw_->backward, fftw_->spec, real);

    ScalarField psi(g, Parity::even, Boundary::dirichlet0);
    const double inv_n = 1.0 / static_cast<double>(nz);
    for (std::size_t k = 0; k < nz; ++k)
        for (std::size_t j = 0; j < nr; ++j) {
            const double r = g.r(j);
            psi[g.index(j, k)] = r * r * real[g.index(j, k)] * inv_n;
        }

    const double res = stream_residual(psi, omega, g);
    double scale = 0.0;
    for (std::size_t k = 0; k < nz; ++k)
        for (std::size_t j = 0; j < nr; ++j) scale = std::max(scale, std::abs(g.r(j) * g.r(j) * omega[g.index(j, k)]));
    if (!(res <= kResidualTolerance * (scale + 1.0))) {
        std::ostringstream msg;
        msg << "stream-function solve failed: residual " << res << " exceeds " << kResidualTolerance * (scale + 1.0);
        throw EllipticError(msg.str());
    }
    return psi;
}

double stream_residual(const ScalarField& psi, const ScalarField& omega, const Grid& g) {
    ScalarField phi = times_r_pow(g, psi, -2);
    phi.boundary = Boundary::dirichlet0;
    const ScalarField lap = d_plus(phi, g);
    double res = 0.0;
    for (std::size_t k = 0; k < g.nz(); ++k)
        for (std::size_t j = 0; j < g.nr(); ++j) {
            const double r2 = g.r(j) * g.r(j);
            const std::size_t i = g.index(j, k);
            res = std::max(res, std::abs(r2 * lap[i] + r2 * omega[i]));
        }
    return res;
}

ScalarField solve_stream(const ScalarField& omega, const Grid& g) {
    StreamSolver solver(g);
    return solver.solve(omega);
}

Velocity velocity_from_stream(const ScalarField& psi, const Grid& g) {
    const std::size_t nr = g.nr(), nz = g.nz();
    ScalarField phi = times_r_pow(g, psi, -2);
    phi.parity = Parity::even;
    phi.boundary = psi.boundary;

    // Corner (j,k): r = j*dr, z = top of cell k. phi is interpolated with
    // tensor cubic weights (-1, 9, 9, -1)/16 so every corner carries an
    // O(h^4) error; with plain four-cell averages the O(h^2) bias would not
    // cancel against the exact wall value and u_z would be first order in
    // the wall cell. The even axis mirror is exact for phi. At a dirichlet0
    // wall the last interior corner uses the one-sided cubic through the
    // three nearest cells and phi(R) = 0.
    std::vector<double> zf(nr * nz);
    for (std::size_t k = 0; k < nz; ++k) {
        const double* a0 = phi.values.data() + g.index(0, g.km(k));
        const double* a1 = phi.values.data() + g.index(0, k);
        const double* a2 = phi.values.data() + g.index(0, g.kp(k));
        const double* a3 = phi.values.data() + g.index(0, g.kp(g.kp(k)));
        double* out = &zf[nr * k];
        for (std::size_t j = 0; j < nr; ++j) out[j] = (9.0 * (a1[j] + a2[j]) - a0[j] - a3[j]) * 0.0625;
    }
    const std::size_t nc = nr + 1;
    std::vector<double> corner(nc * nz, 0.0);
    const bool dirichlet = phi.boundary == Boundary::dirichlet0;
    std::vector<double> rf2(nc);
    for (std::size_t j = 0; j <= nr; ++j) rf2[j] = g.r_face(j) * g.r_face(j);
    for (std::size_t k = 0; k < nz; ++k) {
        const double* f = &zf[nr * k];
        double* c = &corner[nc * k];
        c[1] = rf2[1] * (9.0 * (f[0] + f[1]) - f[0] - f[2]) * 0.0625;
        for (std::size_t j = 2; j + 1 < nr; ++j) c[j] = rf2[j] * (9.0 * (f[j - 1] + f[j]) - f[j - 2] - f[j + 1]) * 0.0625;
        if (dirichlet) {
            c[nr - 1] = rf2[nr - 1] * (-0.05 * f[nr - 3] + 0.5 * f[nr - 2] + 0.75 * f[nr - 1]);
            c[nr] = 0.0;
        } else {
            c[nr - 1] = rf2[nr - 1] * (9.0 * (f[nr - 2] + f[nr - 1]) - f[nr - 3] - f[nr - 1]) * 0.0625;
            c[nr] = rf2[nr] * (9.0 * f[nr - 1] - f[nr - 2]) * 0.125;
        }
    }

    Velocity v{ScalarField(g, Parity::odd, Boundary::dirichlet0), ScalarField(g, Parity::even, Boundary::neumann0), {}};
    v.face.ur.assign(nc * nz, 0.0);
    v.face.uz.assign(nr * nz, 0.0);
    std::vector<double> inv_rf_dz(nc, 0.0), inv_r_dr(nr);
    for (std::size_t j = 1; j <= nr; ++j) inv_rf_dz[j] = 1.0 / (g.r_face(j) * g.dz());
    for (std::size_t j = 0; j < nr; ++j) inv_r_dr[j] = 1.0 / (g.r(j) * g.dr());
    for (std::size_t k = 0; k < nz; ++k) {
        const std::size_t km = g.km(k);
        const double* c = &corner[nc * k];
        const double* cm = &corner[nc * km];
        double* ur = &v.face.ur[nc * k];
        double* uz = &v.face.uz[nr * k];
        for (std::size_t j = 1; j <= nr; ++j) ur[j] = -(c[j] - cm[j]) * inv_rf_dz[j];
        for (std::size_t j = 0; j < nr; ++j) uz[j] = (c[j + 1] - c[j]) * inv_r_dr[j];
    }
    for (std::size_t k = 0; k < nz; ++k) {
        const std::size_t km = g.km(k);
        for (std::size_t j = 0; j < nr; ++j) {
            v.ur[g.index(j, k)] = 0.5 * (v.face.ur[j + nc * k] + v.face.ur[j + 1 + nc * k]);
            v.uz[g.index(j, k)] = 0.5 * (v.face.uz[j + nr * k] + v.face.uz[j + nr * km]);
        }
    }
    return v;
}

ScalarField discrete_divergence(const FaceVelocity& face, const Grid& g) {
    const std::size_t nr = g.nr(), nz = g.nz(), nc = nr + 1;
    ScalarField div(g);
    std::vector<double> inv_vol(nr);
    for (std::size_t j = 0; j < nr; ++j) inv_vol[j] = 1.0 / (g.r(j) * g.dr());
    const double idz = 1.0 / g.dz();
    for (std::size_t k = 0; k < nz; ++k) {
        const std::size_t km = g.km(k);
        const double* ur = &face.ur[nc * k];
        const double* uz = &face.uz[nr * k];
        const double* uzm = &face.uz[nr * km];
        double* d = &div[g.index(0, k)];
        for (std::size_t j = 0; j < nr; ++j) {
            const double radial = (g.r_face(j + 1) * ur[j + 1] - g.r_face(j) * ur[j]) * inv_vol[j];
            d[j] = radial + (uz[j] - uzm[j]) * idz;
        }
    }
    return div;
}

double relative_divergence(const FaceVelocity& face, const Grid& g) {
    double umax = 1.0;
    for (double v : face.ur) umax = std::max(umax, std::abs(v));
    for (double v : face.uz) umax = std::max(umax, std::abs(v));
    return discrete_divergence(face, g).max_abs() / umax;
}

void refresh_derived(SimState& s, StreamSolver& solver) {
    s.psi = solver.solve(s.omega);
    Velocity v = velocity_from_stream(s.psi, s.g());
    s.ur = std::move(v.ur);
    s.uz = std::move(v.uz);
    s.face = std::move(v.face);
}

}  // namespace axmb
