#pragma once

// Text configuration, AXMB binary snapshots and the CSV time series.
//
// Snapshot layout (all little-endian):
//   offset  0  char[4]  "AXMB"
//   offset  4  u32      format version (1)
//   offset  8  u64      Nr
//   offset 16  u64      Nz
//   offset 24  f64      R
//   offset 32  f64      Lz
//   offset 40  f64      t
//   offset 48  f64      mu
//   offset 56  f64[Nr*Nz] x 4   Gamma, Omega, H, rho (r index fastest)
// Derived fields are not stored; read_snapshot re-solves for them.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "axmb/config.hpp"
#include "axmb/diagnostics.hpp"
#include "axmb/state.hpp"

namespace axmb {

class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& msg, std::size_t line)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + msg : msg), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class SnapshotError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parses the `[section]` / `key = value` format. Unknown keys, malformed
/// numbers and out-of-range values are rejected with their line number.
/// Required: [grid] Nr, Nz, R, Lz and [time] T.
Config parse_config(const std::string& text);
Config load_config(const std::filesystem::path& path);

/// Emits a config that parse_config() maps back to an equal Config.
std::string serialize_config(const Config& c);

inline constexpr std::uint32_t kSnapshotVersion = 1;
inline constexpr std::size_t kSnapshotHeaderBytes = 56;

void write_snapshot(const SimState& s, const std::filesystem::path& path);
SimState read_snapshot(const std::filesystem::path& path);

/// The CSV columns, in order.
const std::vector<std::string>& timeseries_columns();
std::string timeseries_header();
std::string timeseries_row(const DiagnosticsRecord& r);

/// Appends one row; writes the header first when the file is new or empty.
void append_timeseries(const DiagnosticsRecord& r, const std::filesystem::path& path);

/// Reads back a series file. Only the CSV columns are populated; an empty
/// riesz_p2 cell maps to an absent value.
std::vector<DiagnosticsRecord> read_timeseries(const std::filesystem::path& path);

}  // namespace axmb
