#include "axmb/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

namespace axmb {

std::string to_string(Advection a) { return a == Advection::upwind1 ? "upwind1" : "centered2"; }

Advection advection_from_string(const std::string& s) {
    if (s == "centered2") return Advection::centered2;
    if (s == "upwind1") return Advection::upwind1;
    throw std::invalid_argument("unknown advection scheme '" + s + "' (expected centered2 or upwind1)");
}

void SchemeConfig::validate() const {
    if (!(cfl_adv > 0.0 && cfl_adv <= 1.0)) throw std::invalid_argument("cfl_adv must lie in (0, 1]");
    if (!(cfl_diff > 0.0 && cfl_diff <= 0.5)) throw std::invalid_argument("cfl_diff must lie in (0, 0.5]");
}

double Config::output_interval() const { return dt_out > 0.0 ? dt_out : t_end / 100.0; }

ScalarField advect(const ScalarField& f, const FaceVelocity& face, const Grid& g, Advection scheme) {
    const std::size_t nr = g.nr(), nz = g.nz(), nc = nr + 1;
    const bool upwind = scheme == Advection::upwind1;
    auto face_value = [upwind](double u, double left, double right) {
        if (upwind) return u > 0.0 ? left : right;
        return 0.5 * (left + right);
    };
    const double wall = f.boundary == Boundary::neumann0 ? 1.0 : -1.0;

    // r_face * u_r * f at radial faces (the axis face carries nothing).
    std::vector<double> fr(nc), fz_prev(nr), fz_here(nr);
    auto axial_fluxes = [&](std::size_t k, std::vector<double>& out) {
        const double* a = f.values.data() + g.index(0, k);
        const double* b = f.values.data() + g.index(0, g.kp(k));
        const double* u = &face.uz[nr * k];
        for (std::size_t j = 0; j < nr; ++j) out[j] = u[j] * face_value(u[j], a[j], b[j]);
    };

    ScalarField out(g, f.parity, f.boundary);
    const double idz = 1.0 / g.dz();
    std::vector<double> inv_vol(nr);
    for (std::size_t j = 0; j < nr; ++j) inv_vol[j] = 1.0 / (g.r(j) * g.dr());
    axial_fluxes(nz - 1, fz_prev);
    for (std::size_t k = 0; k < nz; ++k) {
        const double* row = f.values.data() + g.index(0, k);
        const double* u = &face.ur[nc * k];
        fr[0] = 0.0;
        for (std::size_t j = 1; j < nr; ++j) fr[j] = g.r_face(j) * u[j] * face_value(u[j], row[j - 1], row[j]);
        fr[nr] = g.r_face(nr) * u[nr] * face_value(u[nr], row[nr - 1], wall * row[nr - 1]);
        axial_fluxes(k, fz_here);
        double* o = &out[g.index(0, k)];
        for (std::size_t j = 0; j < nr; ++j) {
            const double radial = (fr[j + 1] - fr[j]) * inv_vol[j];
            const double axial = (fz_here[j] - fz_prev[j]) * idz;
            o[j] = -(radial + axial);
        }
        std::swap(fz_prev, fz_here);
    }
    return out;
}

namespace {

void add_scaled(ScalarField& acc, double a, const ScalarField& x) {
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += a * x[i];
}

}  // namespace

Tendencies rhs(const SimState& s, const SchemeConfig& scheme) {
    const Grid& g = s.g();
    Tendencies out;

    out.gamma = advect(s.gamma, s.face, g, scheme.advection);
    if (s.mu != 0.0) add_scaled(out.gamma, s.mu, d_minus(s.gamma, g));

    out.omega = advect(s.omega, s.face, g, scheme.advection);
    if (scheme.swirl_source) {
        ScalarField q = times_r_pow(g, s.gamma, -2);
        add_scaled(out.omega, 1.0, ddz(multiply(q, q), g));
    }
    if (scheme.magnetic_source) add_scaled(out.omega, -1.0, ddz(multiply(s.hfield, s.hfield), g));
    if (scheme.buoyancy) add_scaled(out.omega, -1.0, times_r_pow(g, ddr(s.rho, g), -1));
    if (s.mu != 0.0) add_scaled(out.omega, s.mu, d_plus(s.omega, g));

    out.hfield = advect(s.hfield, s.face, g, scheme.advection);
    add_scaled(out.hfield, 1.0, d_plus(s.hfield, g));

    out.rho = advect(s.rho, s.face, g, scheme.advection);
    add_scaled(out.rho, 1.0, lap_cyl(s.rho, g));
    return out;
}

double cfl_dt(const SimState& s, const SchemeConfig& scheme) {
    const Grid& g = s.g();
    constexpr double kVelocityFloor = 1e-14;
    double umax = std::max(s.ur.max_abs(), s.uz.max_abs());
    for (std::size_t k = 0; k < g.nz(); ++k)
        for (std::size_t j = 0; j < g.nr(); ++j) umax = std::max(umax, std::abs(s.gamma[g.index(j, k)] / g.r(j)));
    const double h = g.h_min();
    const double adv = scheme.cfl_adv * h / std::max(umax, kVelocityFloor);
    const double diff = scheme.cfl_diff * h * h / std::max(1.0, s.mu);
    return std::min(adv, diff);
}

Stepper::Stepper(const Grid& g, SchemeConfig scheme) : scheme_(scheme), solver_(g) { scheme_.validate(); }

namespace {

void check_finite(const ScalarField& f, const char* name, double t) {
    if (!f.all_finite()) {
        std::ostringstream msg;
        msg << "non-finite value in field " << name << " at t = " << t;
        throw StepError(msg.str());
    }
}

// Copies everything except the derived fields, which the caller re-solves.
SimState evolved_copy(const SimState& s) {
    SimState out;
    out.grid = s.grid;
    out.t = s.t;
    out.mu = s.mu;
    out.gamma = s.gamma;
    out.omega = s.omega;
    out.hfield = s.hfield;
    out.rho = s.rho;
    return out;
}

// a*x + b*y applied in place to the four evolved fields of y.
void combine(double a, const SimState& x, double b, SimState& y) {
    auto mix = [a, b](const ScalarField& xf, ScalarField& yf) {
        for (std::size_t i = 0; i < yf.size(); ++i) yf[i] = a * xf[i] + b * yf[i];
    };
    mix(x.gamma, y.gamma);
    mix(x.omega, y.omega);
    mix(x.hfield, y.hfield);
    mix(x.rho, y.rho);
}

}  // namespace

SimState Stepper::stage(const SimState& s, double dt) {
    Tendencies k = rhs(s, scheme_);
    SimState out = evolved_copy(s);
    add_scaled(out.gamma, dt, k.gamma);
    add_scaled(out.omega, dt, k.omega);
    add_scaled(out.hfield, dt, k.hfield);
    add_scaled(out.rho, dt, k.rho);
    return out;
}

SimState Stepper::step(const SimState& s, double dt) {
    auto finish = [&](SimState& st, double t) {
        check_finite(st.gamma, "Gamma", t);
        check_finite(st.omega, "Omega", t);
        check_finite(st.hfield, "H", t);
        check_finite(st.rho, "rho", t);
        refresh_derived(st, solver_);
        check_finite(st.ur, "u_r", t);
        check_finite(st.uz, "u_z", t);
        max_div_ = std::max(max_div_, relative_divergence(st.face, st.g()));
    };

    check_finite(s.gamma, "Gamma", s.t);
    check_finite(s.omega, "Omega", s.t);
    check_finite(s.hfield, "H", s.t);
    check_finite(s.rho, "rho", s.t);

    SimState s1 = stage(s, dt);
    finish(s1, s.t + dt);
    SimState s2 = stage(s1, dt);
    combine(0.75, s, 0.25, s2);
    s2.t = s.t;
    finish(s2, s.t + 0.5 * dt);
    SimState s3 = stage(s2, dt);
    combine(1.0 / 3.0, s, 2.0 / 3.0, s3);
    s3.t = s.t + dt;
    finish(s3, s3.t);
    return s3;
}

SimState step(const SimState& s, double dt, const SchemeConfig& scheme) {
    Stepper stepper(s.g(), scheme);
    return stepper.step(s, dt);
}

RunResult run(const Config& config, const RunHooks& hooks) {
    auto grid = std::make_shared<const Grid>(config.nr, config.nz, config.radius, config.length);
    return run_from(init_from_profiles(grid, config.initial, config.mu), config, hooks);
}

RunResult run_from(SimState state, const Config& config, const RunHooks& hooks) {
    config.scheme.validate();
    if (!(config.t_end >= 0.0)) throw std::invalid_argument("final time T must be non-negative");
    const double t_end = config.t_end;
    const double interval = config.output_interval();
    if (t_end > 0.0 && !(interval > 0.0)) throw std::invalid_argument("dt_out must be positive");

    std::vector<double> snaps;
    for (double ts : config.snapshot_times)
        if (ts >= 0.0 && ts <= t_end) snaps.push_back(ts);
    std::sort(snaps.begin(), snaps.end());
    snaps.erase(std::unique(snaps.begin(), snaps.end()), snaps.end());

    RunResult result;
    Stepper stepper(state.g(), config.scheme);
    const double eps = 1e-12 * std::max(1.0, t_end);

    auto emit_record = [&](double dt) {
        const DiagnosticsRecord* prev = result.series.empty() ? nullptr : &result.series.back();
        const double div = std::max(stepper.max_divergence(), relative_divergence(state.face, state.g()));
        result.series.push_back(make_record(state, config.scheme, dt, prev, div, &stepper.solver()));
        stepper.reset_divergence();
        if (hooks.on_record) hooks.on_record(state, result.series.back());
    };
    std::size_t snap_index = 0;
    auto emit_snapshots = [&]() {
        while (snap_index < snaps.size() && snaps[snap_index] <= state.t + eps) {
            result.snapshots.push_back(state);
            if (hooks.on_snapshot) hooks.on_snapshot(state);
            ++snap_index;
        }
    };

    emit_record(0.0);
    emit_snapshots();

    std::size_t out_index = 1;
    auto output_time = [&](std::size_t n) { return std::min(static_cast<double>(n) * interval, t_end); };
    double last_dt = 0.0;
    while (state.t < t_end - eps) {
        const double next_out = output_time(out_index);
        const double next_snap = snap_index < snaps.size() ? snaps[snap_index] : t_end;
        const double next_event = std::min(next_out, next_snap);
        double dt = cfl_dt(state, config.scheme);
        bool lands = false;
        if (state.t + dt >= next_event - eps) {
            dt = next_event - state.t;
            lands = true;
        }
        state = stepper.step(state, dt);
        last_dt = dt;
        if (lands) state.t = next_event;
        if (hooks.on_step) hooks.on_step(state);
        if (lands && next_out <= next_event + eps) {
            emit_record(last_dt);
            ++out_index;
        }
        emit_snapshots();
    }
    return result;
}

}  // namespace axmb
