#include "axmb/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace axmb {

Grid::Grid(std::size_t nr, std::size_t nz, double radius, double length)
    : nr_(nr), nz_(nz), radius_(radius), length_(length) {
    if (nr < 4 || nz < 4)
        throw GridError("grid needs at least 4 cells in each direction (got Nr=" + std::to_string(nr) +
                        ", Nz=" + std::to_string(nz) + ")");
    if (!(radius > 0.0) || !(length > 0.0) || !std::isfinite(radius) || !std::isfinite(length))
        throw GridError("grid extents R and Lz must be positive and finite");
    dr_ = radius / static_cast<double>(nr);
    dz_ = length / static_cast<double>(nz);
    r_.resize(nr);
    vol_.resize(nr);
    for (std::size_t j = 0; j < nr; ++j) {
        r_[j] = (static_cast<double>(j) + 0.5) * dr_;
        vol_[j] = 2.0 * std::numbers::pi * r_[j] * dr_ * dz_;
    }
}

Grid build_grid(std::size_t nr, std::size_t nz, double radius, double length) {
    return Grid(nr, nz, radius, length);
}

bool ScalarField::all_finite() const {
    return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

double ScalarField::max_abs() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

ScalarField axpby(double a, const ScalarField& x, double b, const ScalarField& y) {
    ScalarField out = x;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a * x[i] + b * y[i];
    return out;
}

ScalarField scaled(double a, const ScalarField& x) {
    ScalarField out = x;
    for (double& v : out.values) v *= a;
    return out;
}

ScalarField multiply(const ScalarField& x, const ScalarField& y) {
    ScalarField out = x;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] * y[i];
    out.parity = x.parity == y.parity ? Parity::even : Parity::odd;
    return out;
}

ScalarField times_r_pow(const Grid& g, const ScalarField& x, int power) {
    ScalarField out = x;
    std::vector<double> w(g.nr());
    for (std::size_t j = 0; j < g.nr(); ++j) {
        double p = 1.0;
        for (int i = 0; i < std::abs(power); ++i) p *= g.r(j);
        w[j] = power < 0 ? 1.0 / p : p;
    }
    for (std::size_t k = 0; k < g.nz(); ++k) {
        double* row = &out[g.index(0, k)];
        for (std::size_t j = 0; j < g.nr(); ++j) row[j] *= w[j];
    }
    if (power % 2 != 0) out.parity = x.parity == Parity::even ? Parity::odd : Parity::even;
    return out;
}

namespace {

Boundary flipped(Boundary b) {
    return b == Boundary::dirichlet0 ? Boundary::neumann0 : Boundary::dirichlet0;
}

// d_rr f + (c/r) d_r f on the centred three-point stencil.
ScalarField radial_operator(const ScalarField& f, const Grid& g, double c) {
    ScalarField out(g, f.parity, f.boundary);
    const double idr2 = 1.0 / (g.dr() * g.dr());
    const std::size_t nr = g.nr();
    // out_j = lo_j f_{j-1} - 2 idr2 f_j + hi_j f_{j+1}
    std::vector<double> lo(nr), hi(nr);
    for (std::size_t j = 0; j < nr; ++j) {
        const double adv = c / (g.r(j) * 2.0 * g.dr());
        lo[j] = idr2 - adv;
        hi[j] = idr2 + adv;
    }
    const double axis = f.parity == Parity::even ? 1.0 : -1.0;
    const double wall = f.boundary == Boundary::neumann0 ? 1.0 : -1.0;
    for (std::size_t k = 0; k < g.nz(); ++k) {
        const double* in = f.values.data() + g.index(0, k);
        double* o = &out[g.index(0, k)];
        o[0] = lo[0] * axis * in[0] - 2.0 * idr2 * in[0] + hi[0] * in[1];
        for (std::size_t j = 1; j + 1 < nr; ++j) o[j] = lo[j] * in[j - 1] - 2.0 * idr2 * in[j] + hi[j] * in[j + 1];
        const std::size_t e = nr - 1;
        o[e] = lo[e] * in[e - 1] - 2.0 * idr2 * in[e] + hi[e] * wall * in[e];
    }
    return out;
}

void add_d2z(ScalarField& out, const ScalarField& f, const Grid& g) {
    const double idz2 = 1.0 / (g.dz() * g.dz());
    for (std::size_t k = 0; k < g.nz(); ++k) {
        const std::size_t kp = g.kp(k), km = g.km(k);
        for (std::size_t j = 0; j < g.nr(); ++j)
            out[g.index(j, k)] += (f[g.index(j, kp)] - 2.0 * f[g.index(j, k)] + f[g.index(j, km)]) * idz2;
    }
}

}  // namespace

ScalarField ddr(const ScalarField& f, const Grid& g) {
    ScalarField out(g, f.parity == Parity::even ? Parity::odd : Parity::even, flipped(f.boundary));
    const long nr = static_cast<long>(g.nr());
    const double inv = 1.0 / (2.0 * g.dr());
    for (std::size_t k = 0; k < g.nz(); ++k)
        for (long j = 0; j < nr; ++j)
            out[g.index(static_cast<std::size_t>(j), k)] = (f.at(g, j + 1, k) - f.at(g, j - 1, k)) * inv;
    return out;
}

ScalarField ddz(const ScalarField& f, const Grid& g) {
    ScalarField out(g, f.parity, f.boundary);
    const double inv = 1.0 / (2.0 * g.dz());
    for (std::size_t k = 0; k < g.nz(); ++k) {
        const std::size_t kp = g.kp(k), km = g.km(k);
        for (std::size_t j = 0; j < g.nr(); ++j)
            out[g.index(j, k)] = (f[g.index(j, kp)] - f[g.index(j, km)]) * inv;
    }
    return out;
}

ScalarField d2r(const ScalarField& f, const Grid& g) { return radial_operator(f, g, 0.0); }

ScalarField d2z(const ScalarField& f, const Grid& g) {
    ScalarField out(g, f.parity, f.boundary);
    add_d2z(out, f, g);
    return out;
}

ScalarField lap_cyl(const ScalarField& f, const Grid& g) {
    ScalarField out = radial_operator(f, g, 1.0);
    add_d2z(out, f, g);
    return out;
}

ScalarField d_plus(const ScalarField& f, const Grid& g) {
    ScalarField out = radial_operator(f, g, 3.0);
    add_d2z(out, f, g);
    return out;
}

ScalarField d_minus(const ScalarField& f, const Grid& g) {
    ScalarField out = radial_operator(f, g, -1.0);
    add_d2z(out, f, g);
    return out;
}

double cyl_integral(const ScalarField& f, const Grid& g) {
    double sum = 0.0;
    for (std::size_t k = 0; k < g.nz(); ++k)
        for (std::size_t j = 0; j < g.nr(); ++j) sum += f[g.index(j, k)] * g.volume(j);
    return sum;
}

double cyl_lp_norm(const ScalarField& f, const Grid& g, double p) {
    if (std::isinf(p) && p > 0) return f.max_abs();
    if (!(p >= 1.0)) throw GridError("L^p norm requires p >= 1 (got " + std::to_string(p) + ")");
    const double m = f.max_abs();
    if (m == 0.0) return 0.0;
    // Scale by the maximum so large p cannot overflow.
    double sum = 0.0;
    for (std::size_t k = 0; k < g.nz(); ++k)
        for (std::size_t j = 0; j < g.nr(); ++j) {
            const double a = std::abs(f[g.index(j, k)]) / m;
            sum += (p == 2.0 ? a * a : std::pow(a, p)) * g.volume(j);
        }
    return m * (p == 2.0 ? std::sqrt(sum) : std::pow(sum, 1.0 / p));
}

}  // namespace axmb
