#include "axmb/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "axmb/dynamics.hpp"
#include "axmb/elliptic.hpp"

namespace axmb {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string& text, const std::string& key, std::size_t line) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || text.empty())
        throw ConfigError("malformed number '" + text + "' for key '" + key + "'", line);
    if (!std::isfinite(v)) throw ConfigError("non-finite value for key '" + key + "'", line);
    return v;
}

std::size_t parse_count(const std::string& text, const std::string& key, std::size_t line) {
    std::size_t v = 0;
    const char* first = text.data();
    const char* last = first + text.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || text.empty())
        throw ConfigError("malformed integer '" + text + "' for key '" + key + "'", line);
    return v;
}

bool parse_toggle(const std::string& text, const std::string& key, std::size_t line) {
    if (text == "on" || text == "true" || text == "1") return true;
    if (text == "off" || text == "false" || text == "0") return false;
    throw ConfigError("expected on/off for key '" + key + "', got '" + text + "'", line);
}

struct Entry {
    std::string value;
    std::size_t line;
};

}  // namespace

Config parse_config(const std::string& text) {
    // section -> key -> entry
    std::map<std::string, std::map<std::string, Entry>> entries;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("malformed section header '" + line + "'", line_no);
            section = trim(line.substr(1, line.size() - 2));
            static const std::set<std::string> known = {"grid",           "time",           "physics",
                                                        "initial.swirl",  "initial.vorticity",
                                                        "initial.magnetic", "initial.thermal", "output"};
            if (!known.contains(section)) throw ConfigError("unknown section [" + section + "]", line_no);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("expected 'key = value', got '" + line + "'", line_no);
        if (section.empty()) throw ConfigError("key outside of any section", line_no);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        auto& sec = entries[section];
        if (sec.contains(key)) throw ConfigError("duplicate key '" + key + "' in [" + section + "]", line_no);
        sec[key] = Entry{value, line_no};
    }

    Config c;
    auto take = [&](const std::string& sec, const std::string& key) -> const Entry* {
        auto s = entries.find(sec);
        if (s == entries.end()) return nullptr;
        auto k = s->second.find(key);
        return k == s->second.end() ? nullptr : &k->second;
    };
    auto required = [&](const std::string& sec, const std::string& key) -> const Entry& {
        const Entry* e = take(sec, key);
        if (!e) throw ConfigError("missing required key '" + key + "' in [" + sec + "]", 0);
        return *e;
    };
    auto positive = [](double v, const std::string& key, std::size_t line) {
        if (!(v > 0.0)) throw ConfigError("'" + key + "' must be positive", line);
        return v;
    };

    using Handler = std::function<void(const Entry&)>;
    std::map<std::string, std::map<std::string, Handler>> handlers;

    handlers["grid"]["Nr"] = [&](const Entry& e) {
        c.nr = parse_count(e.value, "Nr", e.line);
        if (c.nr < 4) throw ConfigError("'Nr' must be at least 4", e.line);
    };
    handlers["grid"]["Nz"] = [&](const Entry& e) {
        c.nz = parse_count(e.value, "Nz", e.line);
        if (c.nz < 4) throw ConfigError("'Nz' must be at least 4", e.line);
    };
    handlers["grid"]["R"] = [&](const Entry& e) { c.radius = positive(parse_double(e.value, "R", e.line), "R", e.line); };
    handlers["grid"]["Lz"] = [&](const Entry& e) {
        c.length = positive(parse_double(e.value, "Lz", e.line), "Lz", e.line);
    };
    handlers["time"]["T"] = [&](const Entry& e) {
        c.t_end = parse_double(e.value, "T", e.line);
        if (c.t_end < 0.0) throw ConfigError("'T' must be non-negative", e.line);
    };
    handlers["time"]["dt_out"] = [&](const Entry& e) {
        c.dt_out = positive(parse_double(e.value, "dt_out", e.line), "dt_out", e.line);
    };
    handlers["time"]["cfl_adv"] = [&](const Entry& e) {
        c.scheme.cfl_adv = parse_double(e.value, "cfl_adv", e.line);
        if (!(c.scheme.cfl_adv > 0.0 && c.scheme.cfl_adv <= 1.0))
            throw ConfigError("'cfl_adv' must lie in (0, 1]", e.line);
    };
    handlers["time"]["cfl_diff"] = [&](const Entry& e) {
        c.scheme.cfl_diff = parse_double(e.value, "cfl_diff", e.line);
        if (!(c.scheme.cfl_diff > 0.0 && c.scheme.cfl_diff <= 0.5))
            throw ConfigError("'cfl_diff' must lie in (0, 0.5]", e.line);
    };
    handlers["physics"]["mu"] = [&](const Entry& e) {
        c.mu = parse_double(e.value, "mu", e.line);
        if (c.mu < 0.0) throw ConfigError("'mu' must be non-negative", e.line);
    };
    handlers["physics"]["buoyancy"] = [&](const Entry& e) { c.scheme.buoyancy = parse_toggle(e.value, "buoyancy", e.line); };
    handlers["physics"]["magnetic_source"] = [&](const Entry& e) {
        c.scheme.magnetic_source = parse_toggle(e.value, "magnetic_source", e.line);
    };
    handlers["physics"]["swirl_source"] = [&](const Entry& e) {
        c.scheme.swirl_source = parse_toggle(e.value, "swirl_source", e.line);
    };
    auto profile_handlers = [&](const std::string& sec, InitialProfile& p) {
        handlers[sec]["kind"] = [&p](const Entry& e) {
            try {
                p.kind = profile_kind_from_string(e.value);
            } catch (const ProfileError& err) {
                throw ConfigError(err.what(), e.line);
            }
        };
        handlers[sec]["amplitude"] = [&p](const Entry& e) { p.amplitude = parse_double(e.value, "amplitude", e.line); };
        handlers[sec]["sigma"] = [&p, positive](const Entry& e) {
            p.sigma = positive(parse_double(e.value, "sigma", e.line), "sigma", e.line);
        };
        handlers[sec]["z_center"] = [&p](const Entry& e) { p.z_center = parse_double(e.value, "z_center", e.line); };
    };
    profile_handlers("initial.swirl", c.initial.swirl);
    profile_handlers("initial.vorticity", c.initial.vorticity);
    profile_handlers("initial.magnetic", c.initial.magnetic);
    profile_handlers("initial.thermal", c.initial.thermal);
    handlers["output"]["directory"] = [&](const Entry& e) {
        if (e.value.empty()) throw ConfigError("'directory' must not be empty", e.line);
        c.directory = e.value;
    };
    handlers["output"]["snapshot_times"] = [&](const Entry& e) {
        c.snapshot_times.clear();
        std::stringstream ss(e.value);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item.empty()) continue;
            const double t = parse_double(item, "snapshot_times", e.line);
            if (t < 0.0) throw ConfigError("snapshot times must be non-negative", e.line);
            c.snapshot_times.push_back(t);
        }
    };
    handlers["output"]["scheme"] = [&](const Entry& e) {
        try {
            c.scheme.advection = advection_from_string(e.value);
        } catch (const std::invalid_argument& err) {
            throw ConfigError(err.what(), e.line);
        }
    };

    // Report unknown keys in file order.
    std::vector<std::pair<std::size_t, std::string>> unknown;
    for (const auto& [sec, keys] : entries)
        for (const auto& [key, e] : keys)
            if (!handlers[sec].contains(key)) unknown.emplace_back(e.line, "unknown key '" + key + "' in [" + sec + "]");
    if (!unknown.empty()) {
        std::sort(unknown.begin(), unknown.end());
        throw ConfigError(unknown.front().second, unknown.front().first);
    }

    for (const char* key : {"Nr", "Nz", "R", "Lz"}) required("grid", key);
    required("time", "T");
    for (auto& [sec, keys] : entries)
        for (auto& [key, e] : keys) handlers[sec][key](e);

    if (!c.snapshot_times.empty())
        for (double t : c.snapshot_times)
            if (t > c.t_end) throw ConfigError("snapshot time " + format_double(t) + " lies beyond T", take("output", "snapshot_times")->line);
    return c;
}

Config load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const Config& c) {
    std::ostringstream out;
    auto onoff = [](bool b) { return b ? "on" : "off"; };
    out << "[grid]\n"
        << "Nr = " << c.nr << "\n"
        << "Nz = " << c.nz << "\n"
        << "R = " << format_double(c.radius) << "\n"
        << "Lz = " << format_double(c.length) << "\n\n"
        << "[time]\n"
        << "T = " << format_double(c.t_end) << "\n";
    if (c.dt_out > 0.0) out << "dt_out = " << format_double(c.dt_out) << "\n";
    out << "cfl_adv = " << format_double(c.scheme.cfl_adv) << "\n"
        << "cfl_diff = " << format_double(c.scheme.cfl_diff) << "\n\n"
        << "[physics]\n"
        << "mu = " << format_double(c.mu) << "\n"
        << "buoyancy = " << onoff(c.scheme.buoyancy) << "\n"
        << "magnetic_source = " << onoff(c.scheme.magnetic_source) << "\n"
        << "swirl_source = " << onoff(c.scheme.swirl_source) << "\n";
    auto profile = [&](const char* name, const InitialProfile& p) {
        out << "\n[initial." << name << "]\n"
            << "kind = " << to_string(p.kind) << "\n"
            << "amplitude = " << format_double(p.amplitude) << "\n"
            << "sigma = " << format_double(p.sigma) << "\n"
            << "z_center = " << format_double(p.z_center) << "\n";
    };
    profile("swirl", c.initial.swirl);
    profile("vorticity", c.initial.vorticity);
    profile("magnetic", c.initial.magnetic);
    profile("thermal", c.initial.thermal);
    out << "\n[output]\n"
        << "directory = " << c.directory << "\n"
        << "scheme = " << to_string(c.scheme.advection) << "\n";
    if (!c.snapshot_times.empty()) {
        out << "snapshot_times = ";
        for (std::size_t i = 0; i < c.snapshot_times.size(); ++i)
            out << (i ? ", " : "") << format_double(c.snapshot_times[i]);
        out << "\n";
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Snapshots

namespace {

void put_u32(std::vector<unsigned char>& buf, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<unsigned char>(v >> (8 * i)));
}
void put_u64(std::vector<unsigned char>& buf, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf.push_back(static_cast<unsigned char>(v >> (8 * i)));
}
void put_f64(std::vector<unsigned char>& buf, double v) { put_u64(buf, std::bit_cast<std::uint64_t>(v)); }

std::uint32_t get_u32(const unsigned char* p) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
    return v;
}
std::uint64_t get_u64(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return v;
}
double get_f64(const unsigned char* p) { return std::bit_cast<double>(get_u64(p)); }

}  // namespace

void write_snapshot(const SimState& s, const std::filesystem::path& path) {
    const Grid& g = s.g();
    std::vector<unsigned char> buf;
    buf.reserve(kSnapshotHeaderBytes + 4 * 8 * g.size());
    for (char c : {'A', 'X', 'M', 'B'}) buf.push_back(static_cast<unsigned char>(c));
    put_u32(buf, kSnapshotVersion);
    put_u64(buf, g.nr());
    put_u64(buf, g.nz());
    put_f64(buf, g.radius());
    put_f64(buf, g.length());
    put_f64(buf, s.t);
    put_f64(buf, s.mu);
    for (const ScalarField* f : {&s.gamma, &s.omega, &s.hfield, &s.rho})
        for (double v : f->values) put_f64(buf, v);

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open snapshot for writing: " + path.string());
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!out) throw IoError("failed writing snapshot " + path.string());
}

SimState read_snapshot(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open snapshot " + path.string());
    std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    if (buf.size() < 8) throw SnapshotError("truncated snapshot: " + std::to_string(buf.size()) + " bytes, header needs " +
                                            std::to_string(kSnapshotHeaderBytes));
    if (std::memcmp(buf.data(), "AXMB", 4) != 0) throw SnapshotError("bad magic: not an AXMB snapshot");
    const std::uint32_t version = get_u32(buf.data() + 4);
    if (version != kSnapshotVersion)
        throw SnapshotError("unsupported snapshot version " + std::to_string(version) + " (reader supports " +
                            std::to_string(kSnapshotVersion) + ")");
    if (buf.size() < kSnapshotHeaderBytes)
        throw SnapshotError("truncated snapshot: expected at least " + std::to_string(kSnapshotHeaderBytes) +
                            " header bytes, got " + std::to_string(buf.size()));

    const std::uint64_t nr = get_u64(buf.data() + 8);
    const std::uint64_t nz = get_u64(buf.data() + 16);
    constexpr std::uint64_t kMaxBytes = std::numeric_limits<std::uint64_t>::max() / 2;
    if (nr == 0 || nz == 0 || nr > kMaxBytes / nz || nr * nz > kMaxBytes / 32 ||
        nr * nz > std::numeric_limits<std::size_t>::max() / 32)
        throw SnapshotError("dimension overflow: Nr=" + std::to_string(nr) + ", Nz=" + std::to_string(nz));
    const std::uint64_t expected = kSnapshotHeaderBytes + 32 * nr * nz;
    if (buf.size() != expected)
        throw SnapshotError("truncated snapshot: expected " + std::to_string(expected) + " bytes, got " +
                            std::to_string(buf.size()));

    const double radius = get_f64(buf.data() + 24);
    const double length = get_f64(buf.data() + 32);
    auto grid = std::make_shared<const Grid>(nr, nz, radius, length);
    SimState s = make_empty_state(grid, get_f64(buf.data() + 48));
    s.t = get_f64(buf.data() + 40);
    const unsigned char* p = buf.data() + kSnapshotHeaderBytes;
    for (ScalarField* f : {&s.gamma, &s.omega, &s.hfield, &s.rho})
        for (double& v : f->values) {
            v = get_f64(p);
            p += 8;
        }
    StreamSolver solver(*grid);
    refresh_derived(s, solver);
    return s;
}

// ---------------------------------------------------------------------------
// Time series

namespace {

struct Column {
    const char* name;
    std::function<double(const DiagnosticsRecord&)> get;
    std::function<void(DiagnosticsRecord&, double)> set;
};

#define AXMB_COLUMN(name, member) \
    Column { #name, [](const DiagnosticsRecord& r) { return r.member; }, [](DiagnosticsRecord& r, double v) { r.member = v; } }

const std::vector<Column>& columns() {
    static const std::vector<Column> cols = {
        AXMB_COLUMN(t, t),
        AXMB_COLUMN(dt, dt),
        AXMB_COLUMN(l2_u, l2_u),
        AXMB_COLUMN(l2_h, l2_h),
        AXMB_COLUMN(l2_rho, l2_rho),
        AXMB_COLUMN(linf_rho, lp_rho[3]),
        AXMB_COLUMN(linf_H, lp_H[3]),
        AXMB_COLUMN(l2_H, lp_H[0]),
        AXMB_COLUMN(linf_Gamma, linf_gamma),
        AXMB_COLUMN(bkm_integrand, bkm_integrand),
        AXMB_COLUMN(bkm_integral, bkm_integral),
        AXMB_COLUMN(linf_q, linf_q),
        AXMB_COLUMN(half_linf_omega_z, half_linf_omega_z),
        Column{"riesz_p2", nullptr, nullptr},
        AXMB_COLUMN(l2l6_Omega, l2l6_omega),
        AXMB_COLUMN(l2_J, l2_J),
        AXMB_COLUMN(l2_N, l2_N),
        AXMB_COLUMN(l2_gradH, l2_gradH),
        AXMB_COLUMN(h3_proxy, h3_proxy),
        AXMB_COLUMN(energy_residual, energy_residual),
        AXMB_COLUMN(div_max, div_max),
        AXMB_COLUMN(support_radius, support_radius),
    };
    return cols;
}

#undef AXMB_COLUMN

}  // namespace

const std::vector<std::string>& timeseries_columns() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const Column& c : columns()) n.emplace_back(c.name);
        return n;
    }();
    return names;
}

std::string timeseries_header() {
    std::string out;
    for (const std::string& n : timeseries_columns()) out += (out.empty() ? "" : ",") + n;
    return out;
}

std::string timeseries_row(const DiagnosticsRecord& r) {
    std::string out;
    bool first = true;
    for (const Column& c : columns()) {
        if (!first) out += ',';
        first = false;
        if (!c.get) {
            if (r.riesz_p2) out += format_double(*r.riesz_p2);
        } else {
            out += format_double(c.get(r));
        }
    }
    return out;
}

void append_timeseries(const DiagnosticsRecord& r, const std::filesystem::path& path) {
    std::error_code ec;
    const bool fresh = !std::filesystem::exists(path, ec) || std::filesystem::file_size(path, ec) == 0;
    std::ofstream out(path, std::ios::app);
    if (!out) throw IoError("cannot open time series for writing: " + path.string());
    if (fresh) out << timeseries_header() << '\n';
    out << timeseries_row(r) << '\n';
    out.flush();
    if (!out) throw IoError("failed writing time series " + path.string());
}

std::vector<DiagnosticsRecord> read_timeseries(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open time series " + path.string());
    std::string line;
    if (!std::getline(in, line) || trim(line) != timeseries_header())
        throw IoError("time series header does not match the expected columns: " + path.string());
    std::vector<DiagnosticsRecord> out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
        if (cells.size() != columns().size())
            throw IoError("time series line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                          " cells, expected " + std::to_string(columns().size()));
        DiagnosticsRecord r;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            const Column& c = columns()[i];
            if (!c.set) {
                if (!cells[i].empty()) r.riesz_p2 = std::strtod(cells[i].c_str(), nullptr);
                continue;
            }
            c.set(r, std::strtod(cells[i].c_str(), nullptr));
        }
        out.push_back(r);
    }
    return out;
}

}  // namespace axmb
