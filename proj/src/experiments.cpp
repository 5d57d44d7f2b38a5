#include "axmb/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <limits>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "axmb/dynamics.hpp"

namespace axmb {

LogLogFit fit_loglog(std::span<const std::pair<double, double>> points) {
    if (points.size() < 2) throw std::invalid_argument("fit_loglog needs at least two points");
    double sx = 0, sy = 0;
    for (auto [mu, err] : points) {
        if (!(mu > 0.0) || !(err > 0.0)) throw std::invalid_argument("fit_loglog needs positive mu and error values");
        sx += std::log(mu);
        sy += std::log(err);
    }
    const double n = static_cast<double>(points.size());
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (auto [mu, err] : points) {
        const double dx = std::log(mu) - mx, dy = std::log(err) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_loglog needs at least two distinct mu values");
    LogLogFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return fit;
}

ExperimentResult assemble_result(std::vector<double> mu_values, std::vector<FieldErrors> errors, double floor,
                                 double sample_interval) {
    if (mu_values.size() != errors.size()) throw std::invalid_argument("one error triple per mu is required");
    std::vector<std::size_t> order(mu_values.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return mu_values[a] > mu_values[b]; });

    ExperimentResult r;
    r.floor = floor;
    r.sample_interval = sample_interval;
    for (std::size_t i : order) {
        if (!r.mu_values.empty() && r.mu_values.back() == mu_values[i])
            throw std::invalid_argument("mu values must be distinct");
        r.mu_values.push_back(mu_values[i]);
        r.errors.push_back(errors[i]);
    }
    std::vector<std::pair<double, double>> passing;
    double min_err = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < r.mu_values.size(); ++i) {
        const double e = r.errors[i].sum();
        const bool ok = e >= 10.0 * floor;
        r.point_floor_ok.push_back(ok);
        if (r.mu_values[i] > 0.0) {
            min_err = std::min(min_err, e);
            if (ok && e > 0.0) passing.emplace_back(r.mu_values[i], e);
        }
    }
    r.floor_ok = std::isfinite(min_err) && min_err >= 10.0 * floor;
    if (passing.size() >= 3) r.fit = fit_loglog(passing);
    return r;
}

namespace {

// The quantities compared between runs.
struct Sample {
    double t = 0.0;
    ScalarField ur, ut, uz, ht, rho;
};

Sample sample_of(const SimState& s) {
    auto [u_theta, q] = derived_swirl(s);
    (void)q;
    return Sample{s.t, s.ur, std::move(u_theta), s.uz, times_r_pow(s.g(), s.hfield, 1), s.rho};
}

double l2_diff(const Grid& g, std::initializer_list<std::pair<const ScalarField*, const ScalarField*>> parts) {
    double sum = 0.0;
    for (auto [a, b] : parts)
        for (std::size_t k = 0; k < g.nz(); ++k)
            for (std::size_t j = 0; j < g.nr(); ++j) {
                const std::size_t i = g.index(j, k);
                const double d = (*a)[i] - (*b)[i];
                sum += d * d * g.volume(j);
            }
    return std::sqrt(sum);
}

void accumulate(FieldErrors& e, const Grid& g, const Sample& a, const Sample& b) {
    const double tol = 1e-9 * std::max(1.0, std::abs(a.t));
    if (std::abs(a.t - b.t) > tol) {
        std::ostringstream msg;
        msg << "record times diverged between runs (" << a.t << " vs " << b.t << ")";
        throw std::runtime_error(msg.str());
    }
    e.u = std::max(e.u, l2_diff(g, {{&a.ur, &b.ur}, {&a.ut, &b.ut}, {&a.uz, &b.uz}}));
    e.h = std::max(e.h, l2_diff(g, {{&a.ht, &b.ht}}));
    e.rho = std::max(e.rho, l2_diff(g, {{&a.rho, &b.rho}}));
}

// Coarse centre (j,k) sits on the corner shared by fine cells 2j..2j+1 and
// 2k..2k+1. Tensor-product cubic weights (-1, 9, 9, -1)/16 over fine cells
// 2j-1..2j+2 reproduce the point value to fourth order, so the floor measures
// the dynamics rather than the O(h^2) gap between point samples and cell means.
// Fine ghosts follow the field's axis parity and wall tag; z is periodic.
ScalarField restrict_to(const Grid& coarse, const Grid& fine, const ScalarField& f) {
    static constexpr double w[4] = {-1.0 / 16.0, 9.0 / 16.0, 9.0 / 16.0, -1.0 / 16.0};
    const long nzf = static_cast<long>(fine.nz());
    ScalarField out(coarse, f.parity, f.boundary);
    for (std::size_t k = 0; k < coarse.nz(); ++k)
        for (std::size_t j = 0; j < coarse.nr(); ++j) {
            double sum = 0.0;
            for (int b = 0; b < 4; ++b) {
                const long kf = ((2 * static_cast<long>(k) - 1 + b) % nzf + nzf) % nzf;
                for (int a = 0; a < 4; ++a) {
                    const long jf = 2 * static_cast<long>(j) - 1 + a;
                    double v;
                    if (jf < 0) {
                        v = f.at(fine, -jf - 1, static_cast<std::size_t>(kf));
                        if (f.parity == Parity::odd) v = -v;
                    } else if (jf >= static_cast<long>(fine.nr())) {
                        const long mirror = 2 * static_cast<long>(fine.nr()) - 1 - jf;
                        v = f.at(fine, mirror, static_cast<std::size_t>(kf));
                        if (f.boundary == Boundary::dirichlet0) v = -v;
                    } else {
                        v = f.at(fine, jf, static_cast<std::size_t>(kf));
                    }
                    sum += w[a] * w[b] * v;
                }
            }
            out[coarse.index(j, k)] = sum;
        }
    return out;
}

}  // namespace

ExperimentResult inviscid_limit(const Config& config, std::vector<double> mu_list,
                                const InviscidLimitOptions& options) {
    for (double mu : mu_list)
        if (!(mu >= 0.0) || !std::isfinite(mu)) throw std::invalid_argument("mu values must be finite and non-negative");
    std::sort(mu_list.begin(), mu_list.end(), std::greater<>());
    if (std::adjacent_find(mu_list.begin(), mu_list.end()) != mu_list.end())
        throw std::invalid_argument("mu values must be distinct");

    auto grid = std::make_shared<const Grid>(config.nr, config.nz, config.radius, config.length);

    Config reference_config = config;
    reference_config.mu = 0.0;
    reference_config.snapshot_times.clear();
    // Shared, immutable after the reference run completes.
    auto reference = std::make_shared<std::vector<Sample>>();
    {
        RunHooks hooks;
        hooks.on_record = [&](const SimState& s, const DiagnosticsRecord&) { reference->push_back(sample_of(s)); };
        run_from(init_from_profiles(grid, config.initial, 0.0), reference_config, hooks);
    }
    std::shared_ptr<const std::vector<Sample>> ref = reference;

    auto ladder_run = [&, ref](double mu) {
        Config c = reference_config;
        c.mu = mu;
        FieldErrors e;
        std::size_t index = 0;
        RunHooks hooks;
        hooks.on_record = [&](const SimState& s, const DiagnosticsRecord&) {
            if (index >= ref->size()) throw std::runtime_error("ladder run produced more records than the reference");
            accumulate(e, *grid, sample_of(s), (*ref)[index++]);
        };
        run_from(init_from_profiles(grid, c.initial, mu), c, hooks);
        return e;
    };

    unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    std::vector<FieldErrors> errors(mu_list.size());
    for (std::size_t start = 0; start < mu_list.size(); start += threads) {
        std::vector<std::future<FieldErrors>> batch;
        const std::size_t end = std::min(mu_list.size(), start + threads);
        for (std::size_t i = start; i < end; ++i) batch.push_back(std::async(std::launch::async, ladder_run, mu_list[i]));
        for (std::size_t i = start; i < end; ++i) {
            errors[i] = batch[i - start].get();
            if (options.on_result) options.on_result(mu_list[i], errors[i]);
        }
    }

    const double floor = options.floor_override ? *options.floor_override : refinement_floor(config);
    return assemble_result(mu_list, errors, floor, config.output_interval());
}

double refinement_floor(const Config& config) {
    Config coarse_config = config;
    coarse_config.mu = 0.0;
    coarse_config.snapshot_times.clear();
    Config fine_config = coarse_config;
    fine_config.nr *= 2;
    fine_config.nz *= 2;

    auto coarse = std::make_shared<const Grid>(coarse_config.nr, coarse_config.nz, config.radius, config.length);
    auto fine = std::make_shared<const Grid>(fine_config.nr, fine_config.nz, config.radius, config.length);

    std::vector<Sample> coarse_samples;
    {
        RunHooks hooks;
        hooks.on_record = [&](const SimState& s, const DiagnosticsRecord&) { coarse_samples.push_back(sample_of(s)); };
        run_from(init_from_profiles(coarse, config.initial, 0.0), coarse_config, hooks);
    }
    FieldErrors e;
    std::size_t index = 0;
    RunHooks hooks;
    hooks.on_record = [&](const SimState& s, const DiagnosticsRecord&) {
        if (index >= coarse_samples.size()) throw std::runtime_error("refinement run produced extra records");
        Sample f = sample_of(s);
        Sample r{f.t,
                 restrict_to(*coarse, *fine, f.ur),
                 restrict_to(*coarse, *fine, f.ut),
                 restrict_to(*coarse, *fine, f.uz),
                 restrict_to(*coarse, *fine, f.ht),
                 restrict_to(*coarse, *fine, f.rho)};
        accumulate(e, *coarse, r, coarse_samples[index++]);
    };
    run_from(init_from_profiles(fine, config.initial, 0.0), fine_config, hooks);
    return e.sum();
}

void write_experiment(const ExperimentResult& result, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / "inviscid_limit.csv");
        if (!out) throw std::runtime_error("cannot write " + (dir / "inviscid_limit.csv").string());
        out.precision(17);
        out << "# sup_t sampled every " << result.sample_interval << "\n";
        out << "# floor " << result.floor << " floor_ok " << (result.floor_ok ? 1 : 0) << "\n";
        if (result.fit)
            out << "# slope " << result.fit->slope << " intercept " << result.fit->intercept << " r_squared "
                << result.fit->r_squared << "\n";
        else
            out << "# slope undefined (fewer than 3 points above 10x floor)\n";
        out << "mu,err_u,err_h,err_rho,err_sum,floor_ok\n";
        for (std::size_t i = 0; i < result.mu_values.size(); ++i) {
            const FieldErrors& e = result.errors[i];
            out << result.mu_values[i] << ',' << e.u << ',' << e.h << ',' << e.rho << ',' << e.sum() << ','
                << (result.point_floor_ok[i] ? 1 : 0) << "\n";
        }
    }
    std::ofstream dat(dir / "inviscid_limit_loglog.dat");
    if (!dat) throw std::runtime_error("cannot write " + (dir / "inviscid_limit_loglog.dat").string());
    dat.precision(17);
    dat << "# mu err_sum   (plot with: set logscale xy; plot 'inviscid_limit_loglog.dat' using 1:2)\n";
    for (std::size_t i = 0; i < result.mu_values.size(); ++i)
        if (result.mu_values[i] > 0.0) dat << result.mu_values[i] << ' ' << result.errors[i].sum() << "\n";
}

}  // namespace axmb
