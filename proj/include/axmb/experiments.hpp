#pragma once

// Vanishing-viscosity study: runs the same initial data at mu = 0 and along a
// ladder of viscosities, measures sup_t L^2 distances of (u, h, rho) and fits
// the rate in mu.

#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "axmb/config.hpp"

namespace axmb {

struct FieldErrors {
    double u = 0.0;
    double h = 0.0;
    double rho = 0.0;
    double sum() const { return u + h + rho; }
};

struct LogLogFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

/// Ordinary least squares on (log mu, log error). Needs >= 2 points, all
/// coordinates positive; throws std::invalid_argument otherwise.
LogLogFit fit_loglog(std::span<const std::pair<double, double>> points);

struct ExperimentResult {
    std::vector<double> mu_values;       // strictly decreasing
    std::vector<FieldErrors> errors;     // one per mu
    std::vector<bool> point_floor_ok;    // error sum >= 10 * floor
    std::optional<LogLogFit> fit;        // present when >= 3 points pass the floor
    double floor = 0.0;
    bool floor_ok = false;               // min error sum >= 10 * floor
    double sample_interval = 0.0;        // diagnostic cadence used for sup_t
};

/// Assembles a result from measured (or fabricated) errors: orders by
/// decreasing mu, applies the floor gate and fits the floor-passing points
/// with mu > 0.
ExperimentResult assemble_result(std::vector<double> mu_values, std::vector<FieldErrors> errors, double floor,
                                 double sample_interval = 0.0);

struct InviscidLimitOptions {
    /// Skip the 2N refinement run and use this floor instead.
    std::optional<double> floor_override;
    /// Worker threads for the ladder runs; 0 means hardware concurrency.
    unsigned threads = 0;
    /// Called on the calling thread as each ladder run finishes, in mu order.
    /// Lets callers keep a partial table if a later run aborts.
    std::function<void(double mu, const FieldErrors&)> on_result;
};

/// Reference run at mu = 0, one run per entry of mu_list with the same grid,
/// scheme and initial data, errors as the max over the shared record times.
/// mu_list entries must be non-negative and distinct; order is irrelevant.
ExperimentResult inviscid_limit(const Config& config, std::vector<double> mu_list,
                                const InviscidLimitOptions& options = {});

/// sup_t L^2 distance between the mu = 0 runs at N and 2N, with the fine
/// solution volume-averaged onto the coarse cells (sum over u, h, rho).
double refinement_floor(const Config& config);

/// Writes inviscid_limit.csv (table plus fit summary) and inviscid_limit_loglog.dat
/// (two columns, mu and error sum) into dir.
void write_experiment(const ExperimentResult& result, const std::filesystem::path& dir);

}  // namespace axmb
