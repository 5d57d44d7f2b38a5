#pragma once

#include <cmath>
#include <memory>
#include <span>
#include <vector>

#include "axmb/grid.hpp"
#include "axmb/state.hpp"

namespace axmb::test {

inline std::shared_ptr<const Grid> make_grid(std::size_t nr, std::size_t nz, double radius, double length) {
    return std::make_shared<const Grid>(nr, nz, radius, length);
}

/// Least-squares slope of log(err) against log(h): err ~ h^p gives p.
inline double convergence_slope(std::span<const double> h, std::span<const double> err) {
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

inline double max_abs_diff(const ScalarField& a, const ScalarField& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

/// Bump family used across the suites: small enough to run quickly, decays
/// below 1e-12 at the boundaries for R = Lz = 4.
inline InitialData bump_data(double swirl = 0.5, double magnetic = 0.1, double thermal = 0.1, double sigma = 0.35) {
    InitialData d;
    d.swirl = {ProfileKind::swirl_bump, swirl, sigma, 0.0};
    d.magnetic = {ProfileKind::magnetic_bump, magnetic, sigma, 0.1};
    d.thermal = {ProfileKind::thermal_bump, thermal, sigma, -0.1};
    return d;
}

}  // namespace axmb::test
