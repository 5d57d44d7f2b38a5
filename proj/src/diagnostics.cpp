#include "axmb/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "axmb/dynamics.hpp"
#include "axmb/elliptic.hpp"

namespace axmb {

namespace {

double max_of(const ScalarField& f) { return f.max_abs(); }

// Pointwise Euclidean norm of several fields.
ScalarField pointwise_norm(const Grid& g, std::initializer_list<const ScalarField*> parts) {
    ScalarField out(g);
    for (const ScalarField* p : parts)
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += (*p)[i] * (*p)[i];
    for (double& v : out.values) v = std::sqrt(v);
    return out;
}

double integral_of_square(const ScalarField& f, const Grid& g) {
    double sum = 0.0;
    for (std::size_t k = 0; k < g.nz(); ++k)
        for (std::size_t j = 0; j < g.nr(); ++j) {
            const double v = f[g.index(j, k)];
            sum += v * v * g.volume(j);
        }
    return sum;
}

double integral_of_product(const ScalarField& a, const ScalarField& b, const Grid& g) {
    double sum = 0.0;
    for (std::size_t k = 0; k < g.nz(); ++k)
        for (std::size_t j = 0; j < g.nr(); ++j) {
            const std::size_t i = g.index(j, k);
            sum += a[i] * b[i] * g.volume(j);
        }
    return sum;
}

ScalarField magnetic_swirl(const SimState& s) {
    ScalarField h = times_r_pow(s.g(), s.hfield, 1);
    h.boundary = Boundary::dirichlet0;
    return h;
}

}  // namespace

double bkm_integrand(const SimState& s) {
    auto [omega_r, omega_z] = swirl_vorticity(s);
    return pointwise_norm(s.g(), {&omega_r, &omega_z}).max_abs();
}

double bkm_integrand_from_swirl(const SimState& s) {
    const Grid& g = s.g();
    const ScalarField u_theta = derived_swirl(s).first;
    // J = omega_r / r = -d_z u_theta / r
    ScalarField j = times_r_pow(g, ddz(u_theta, g), -1);
    // omega_z / r = (1/r^2) d_r (r u_theta)
    ScalarField ru = times_r_pow(g, u_theta, 1);
    ru.boundary = s.gamma.boundary;
    ScalarField wz_over_r = times_r_pow(g, ddr(ru, g), -2);
    double best = 0.0;
    for (std::size_t k = 0; k < g.nz(); ++k)
        for (std::size_t jj = 0; jj < g.nr(); ++jj) {
            const std::size_t i = g.index(jj, k);
            best = std::max(best, g.r(jj) * std::sqrt(j[i] * j[i] + wz_over_r[i] * wz_over_r[i]));
        }
    return best;
}

SwirlRatio swirl_ratio_check(const SimState& s, double tol) {
    SwirlRatio out;
    out.lhs = max_of(derived_swirl(s).second);
    out.rhs = 0.5 * max_of(swirl_vorticity(s).second);
    out.satisfied = out.lhs <= out.rhs * (1.0 + tol);
    return out;
}

Reformulated reformulated_quantities(const SimState& s) {
    const Grid& g = s.g();
    Reformulated out;
    out.omega = s.omega;
    out.j = times_r_pow(g, ddz(s.gamma, g), -2);
    for (double& v : out.j.values) v = -v;
    out.n = times_r_pow(g, ddr(s.rho, g), -1);
    out.grad_h_r = ddr(s.hfield, g);
    out.grad_h_z = ddz(s.hfield, g);
    return out;
}

RieszRatios riesz_ratio(const SimState& s, double p) {
    if (!(p > 1.0) || std::isinf(p)) {
        std::ostringstream msg;
        msg << "Riesz ratio needs 1 < p < inf (got " << p << ")";
        throw std::invalid_argument(msg.str());
    }
    const Grid& g = s.g();
    constexpr double kAbsent = 1e-14;
    RieszRatios out;

    const ScalarField a = ddr(s.ur, g), b = ddz(s.ur, g), c = ddr(s.uz, g), d = ddz(s.uz, g);
    const double num = cyl_lp_norm(pointwise_norm(g, {&a, &b, &c, &d}), g, p);
    const double den = cyl_lp_norm(times_r_pow(g, s.omega, 1), g, p);
    if (den >= kAbsent) out.velocity_gradient = num / den;

    ScalarField w = times_r_pow(g, s.ur, -1);
    const ScalarField wr = ddr(w, g), wz = ddz(w, g);
    const double num2 = cyl_lp_norm(pointwise_norm(g, {&wr, &wz}), g, p);
    const double den2 = cyl_lp_norm(s.omega, g, p);
    if (den2 >= kAbsent) out.ur_over_r = num2 / den2;
    return out;
}

double h3_proxy(const SimState& s) {
    const Grid& g = s.g();
    const ScalarField u_theta = derived_swirl(s).first;
    const ScalarField h_theta = magnetic_swirl(s);
    double total = 0.0;
    for (const ScalarField* f : {&s.ur, &u_theta, &s.uz, &h_theta, &s.rho}) {
        ScalarField dr_pow = *f;
        for (int a = 0; a <= 3; ++a) {
            ScalarField mixed = dr_pow;
            for (int b = 0; a + b <= 3; ++b) {
                total += integral_of_square(mixed, g);
                if (a + b < 3) mixed = ddz(mixed, g);
            }
            if (a < 3) dr_pow = ddr(dr_pow, g);
        }
    }
    return total;
}

double kinetic_l2_squared(const SimState& s) {
    const Grid& g = s.g();
    return integral_of_square(s.ur, g) + integral_of_square(derived_swirl(s).first, g) + integral_of_square(s.uz, g);
}

double magnetic_l2_squared(const SimState& s) { return integral_of_square(magnetic_swirl(s), s.g()); }

double energy_residual(const SimState& s, const SchemeConfig& scheme, StreamSolver* solver) {
    const Grid& g = s.g();
    std::unique_ptr<StreamSolver> own;
    if (!solver) {
        own = std::make_unique<StreamSolver>(g);
        solver = own.get();
    }
    const Tendencies d = rhs(s, scheme);
    const Velocity dv = velocity_from_stream(solver->solve(d.omega), g);

    const ScalarField u_theta = derived_swirl(s).first;
    const ScalarField du_theta = times_r_pow(g, d.gamma, -1);
    const ScalarField h_theta = magnetic_swirl(s);
    const ScalarField dh_theta = times_r_pow(g, d.hfield, 1);

    const double dEdt = integral_of_product(s.ur, dv.ur, g) + integral_of_product(u_theta, du_theta, g) +
                        integral_of_product(s.uz, dv.uz, g) + integral_of_product(h_theta, dh_theta, g);
    const double work = scheme.buoyancy ? integral_of_product(s.rho, s.uz, g) : 0.0;

    const ScalarField hr = ddr(h_theta, g), hz = ddz(h_theta, g);
    const double grad_h = integral_of_square(hr, g) + integral_of_square(hz, g) +
                          integral_of_square(times_r_pow(g, h_theta, -1), g);

    double dissipation = 0.0;
    if (s.mu != 0.0) {
        auto [omega_r, omega_z] = swirl_vorticity(s);
        dissipation = s.mu * (integral_of_square(omega_r, g) + integral_of_square(omega_z, g) +
                              integral_of_square(times_r_pow(g, s.omega, 1), g));
    }
    return dEdt - work + grad_h + dissipation;
}

double support_radius(const SimState& s) {
    const Grid& g = s.g();
    double radius = 0.0;
    for (const ScalarField* f : {&s.gamma, &s.omega, &s.hfield, &s.rho}) {
        const double m = f->max_abs();
        if (m == 0.0) continue;
        for (std::size_t j = g.nr(); j-- > 0;) {
            if (g.r(j) <= radius) break;
            bool hit = false;
            for (std::size_t k = 0; k < g.nz() && !hit; ++k) hit = std::abs((*f)[g.index(j, k)]) > 1e-8 * m;
            if (hit) {
                radius = g.r(j);
                break;
            }
        }
    }
    return radius;
}

double bkm_accumulate(std::span<const DiagnosticsRecord> series) {
    double total = 0.0;
    for (std::size_t i = 1; i < series.size(); ++i) {
        const double dt = series[i].t - series[i - 1].t;
        if (!(dt > 0.0)) throw std::invalid_argument("bkm_accumulate: record times must be strictly increasing");
        total += 0.5 * dt * (series[i].bkm_integrand + series[i - 1].bkm_integrand);
    }
    return total;
}

DiagnosticsRecord make_record(const SimState& s, const SchemeConfig& scheme, double dt,
                              const DiagnosticsRecord* previous, double div_max, StreamSolver* solver) {
    const Grid& g = s.g();
    DiagnosticsRecord r;
    r.t = s.t;
    r.dt = dt;
    r.l2_u = std::sqrt(kinetic_l2_squared(s));
    r.l2_h = std::sqrt(magnetic_l2_squared(s));
    r.l2_rho = cyl_lp_norm(s.rho, g, 2.0);
    for (std::size_t i = 0; i < kTrackedExponents.size(); ++i) {
        r.lp_H[i] = cyl_lp_norm(s.hfield, g, kTrackedExponents[i]);
        r.lp_rho[i] = cyl_lp_norm(s.rho, g, kTrackedExponents[i]);
    }
    r.linf_gamma = s.gamma.max_abs();
    r.bkm_integrand = bkm_integrand(s);
    r.bkm_integral = previous ? previous->bkm_integral + 0.5 * (s.t - previous->t) *
                                                             (r.bkm_integrand + previous->bkm_integrand)
                              : 0.0;
    const SwirlRatio ratio = swirl_ratio_check(s);
    r.linf_q = ratio.lhs;
    r.half_linf_omega_z = ratio.rhs;
    r.riesz_p2 = riesz_ratio(s, 2.0).velocity_gradient;
    r.l2l6_omega = std::max(cyl_lp_norm(s.omega, g, 2.0), cyl_lp_norm(s.omega, g, 6.0));
    const Reformulated q = reformulated_quantities(s);
    r.l2_J = cyl_lp_norm(q.j, g, 2.0);
    r.l2_N = cyl_lp_norm(q.n, g, 2.0);
    r.l2_gradH = std::sqrt(integral_of_square(q.grad_h_r, g) + integral_of_square(q.grad_h_z, g));
    r.h3_proxy = h3_proxy(s);
    r.energy_residual = energy_residual(s, scheme, solver);
    r.div_max = div_max;
    r.support_radius = support_radius(s);
    r.rho_mass = cyl_integral(s.rho, g);
    return r;
}

LedgerReport energy_ledger(std::span<const DiagnosticsRecord> series, const LedgerOptions& opts) {
    LedgerReport report;
    if (series.empty()) return report;
    static const char* names[] = {"L2", "L4", "L6", "Linf"};
    auto flag = [&](std::size_t i, std::string what) { report.violations.push_back({i, series[i].t, std::move(what)}); };

    for (std::size_t i = 1; i < series.size(); ++i) {
        const DiagnosticsRecord& a = series[i - 1];
        const DiagnosticsRecord& b = series[i];
        for (std::size_t p = 0; p < kTrackedExponents.size(); ++p) {
            const bool inf = p + 1 == kTrackedExponents.size();
            auto check = [&](double before, double after, const char* field) {
                const double allowed = inf ? before + opts.linf_abs_tol : before * (1.0 + opts.lp_rel_tol);
                if (after > allowed) {
                    std::ostringstream msg;
                    msg << names[p] << " norm of " << field << " increased from " << before << " to " << after;
                    flag(i, msg.str());
                }
            };
            check(a.lp_H[p], b.lp_H[p], "H");
            check(a.lp_rho[p], b.lp_rho[p], "rho");
        }
    }

    const double t0 = series.front().t;
    const double horizon = series.back().t - t0;
    for (const DiagnosticsRecord& r : series) {
        const double g = (r.l2_u * r.l2_u + r.l2_h * r.l2_h) / ((1.0 + r.t) * (1.0 + r.t));
        report.growth_max = std::max(report.growth_max, g);
        if (r.t - t0 <= 0.1 * horizon) report.growth_early = std::max(report.growth_early, g);
    }
    if (report.growth_max > 2.0 * report.growth_early) {
        std::ostringstream msg;
        msg << "||(u,h)||^2/(1+t)^2 reached " << report.growth_max << ", more than twice its early value "
            << report.growth_early;
        flag(series.size() - 1, msg.str());
    }

    for (std::size_t i = 0; i < series.size(); ++i)
        if (!(std::abs(series[i].energy_residual) <= opts.residual_tol)) {
            std::ostringstream msg;
            msg << "energy residual " << series[i].energy_residual << " exceeds " << opts.residual_tol;
            flag(i, msg.str());
        }
    return report;
}

}  // namespace axmb
