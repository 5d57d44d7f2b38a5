#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "axmb/state.hpp"

namespace axmb {

enum class Advection { centered2, upwind1 };

std::string to_string(Advection a);
Advection advection_from_string(const std::string& s);

struct SchemeConfig {
    Advection advection = Advection::centered2;
    double cfl_adv = 0.4;
    double cfl_diff = 0.2;
    bool buoyancy = true;
    bool magnetic_source = true;
    bool swirl_source = true;

    /// Throws std::invalid_argument unless 0 < cfl_adv <= 1 and 0 < cfl_diff <= 0.5.
    void validate() const;

    bool operator==(const SchemeConfig&) const = default;
};

/// Everything a run needs. Mirrors the sections of the text config format.
struct Config {
    // [grid]
    std::size_t nr = 0;
    std::size_t nz = 0;
    double radius = 0.0;
    double length = 0.0;
    // [time]
    double t_end = 0.0;
    double dt_out = 0.0;  // 0 selects T/100
    // [physics]
    double mu = 0.0;
    // [initial.*]
    InitialData initial;
    // [output]
    std::string directory = "out";
    std::vector<double> snapshot_times;

    SchemeConfig scheme;

    /// Output cadence actually used (dt_out, or T/100 when unset).
    double output_interval() const;

    bool operator==(const Config&) const = default;
};

}  // namespace axmb
