#pragma once

#include <cstdio>
#include <fstream>
#include <string>

#include <json.hpp>

#include "pshlab/comparison.hpp"
#include "pshlab/lab.hpp"

namespace pshlab {

using Json = nlohmann::ordered_json;

/// Convention banner stamped into every structured output.
inline const char* convention_banner() { return "d^c = i(dbar - d)"; }

namespace detail {
inline std::string fmt_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}
}  // namespace detail

// ---------------------------------------------------------------------------
// GridFunction: flat binary layout and CSV
// ---------------------------------------------------------------------------

/// Header: magic "PSHG", version, n; per-axis lo/hi, h, per-axis counts;
/// payload: row-major values then a byte-packed validity bitmask.
inline void write_grid_binary(const GridFunction<double>& f, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidArgument("write_grid_binary: cannot open " + path);
    const char magic[4] = {'P', 'S', 'H', 'G'};
    out.write(magic, 4);
    const std::uint32_t version = 1, n = f.domain.n;
    out.write(reinterpret_cast<const char*>(&version), 4);
    out.write(reinterpret_cast<const char*>(&n), 4);
    for (int a = 0; a < f.domain.axes(); ++a) {
        out.write(reinterpret_cast<const char*>(&f.domain.lo[a]), 8);
        out.write(reinterpret_cast<const char*>(&f.domain.hi[a]), 8);
    }
    out.write(reinterpret_cast<const char*>(&f.domain.h), 8);
    for (int a = 0; a < f.domain.axes(); ++a) {
        const std::uint64_t c = f.domain.counts[a];
        out.write(reinterpret_cast<const char*>(&c), 8);
    }
    out.write(reinterpret_cast<const char*>(f.values.data()),
              static_cast<std::streamsize>(f.values.size() * 8));
    std::vector<std::uint8_t> bits((f.valid.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < f.valid.size(); ++i)
        if (f.valid[i]) bits[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
    out.write(reinterpret_cast<const char*>(bits.data()),
              static_cast<std::streamsize>(bits.size()));
}

inline GridFunction<double> read_grid_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("read_grid_binary: cannot open " + path);
    char magic[4];
    in.read(magic, 4);
    if (std::string(magic, 4) != "PSHG") throw InvalidArgument("read_grid_binary: bad magic");
    std::uint32_t version = 0, n = 0;
    in.read(reinterpret_cast<char*>(&version), 4);
    in.read(reinterpret_cast<char*>(&n), 4);
    if (version != 1 || (n != 1 && n != 2)) throw InvalidArgument("read_grid_binary: bad header");
    GridFunction<double> f;
    f.domain.n = static_cast<int>(n);
    f.domain.lo.resize(2 * n);
    f.domain.hi.resize(2 * n);
    for (std::uint32_t a = 0; a < 2 * n; ++a) {
        in.read(reinterpret_cast<char*>(&f.domain.lo[a]), 8);
        in.read(reinterpret_cast<char*>(&f.domain.hi[a]), 8);
    }
    in.read(reinterpret_cast<char*>(&f.domain.h), 8);
    f.domain.counts.resize(2 * n);
    for (std::uint32_t a = 0; a < 2 * n; ++a) {
        std::uint64_t c = 0;
        in.read(reinterpret_cast<char*>(&c), 8);
        f.domain.counts[a] = static_cast<std::int64_t>(c);
    }
    const std::int64_t total = f.domain.node_count();
    f.values.resize(total);
    in.read(reinterpret_cast<char*>(f.values.data()), total * 8);
    std::vector<std::uint8_t> bits((total + 7) / 8);
    in.read(reinterpret_cast<char*>(bits.data()), static_cast<std::streamsize>(bits.size()));
    if (!in) throw InvalidArgument("read_grid_binary: truncated file");
    f.valid.resize(total);
    for (std::int64_t i = 0; i < total; ++i)
        f.valid[i] = (bits[i / 8] >> (i % 8)) & 1u;
    return f;
}

inline void write_grid_csv(const GridFunction<double>& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InvalidArgument("write_grid_csv: cannot open " + path);
    out << (f.domain.n == 1 ? "x1,y1" : "x1,y1,x2,y2") << ",value,valid\n";
    const std::int64_t total = f.domain.node_count();
    for (std::int64_t i = 0; i < total; ++i) {
        const auto p = f.domain.point(i);
        for (int a = 0; a < f.domain.axes(); ++a) out << detail::fmt_g17(p[a]) << ",";
        out << detail::fmt_g17(f.values[i]) << "," << int(f.valid[i]) << "\n";
    }
}

// ---------------------------------------------------------------------------
// MeasureField: CSV + JSON summary
// ---------------------------------------------------------------------------

inline void write_measure_csv(const MeasureField<double>& mu, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InvalidArgument("write_measure_csv: cannot open " + path);
    out << (mu.domain.n == 1 ? "x1,y1" : "x1,y1,x2,y2") << ",density\n";
    const std::int64_t total = mu.domain.node_count();
    for (std::int64_t i = 0; i < total; ++i) {
        if (!mu.valid[i]) continue;
        const auto p = mu.domain.point(i);
        for (int a = 0; a < mu.domain.axes(); ++a) out << detail::fmt_g17(p[a]) << ",";
        out << detail::fmt_g17(mu.density[i]) << "\n";
    }
}

inline Json measure_summary_json(const MeasureField<double>& mu) {
    double mn = 0, mx = 0;
    bool any = false;
    for (std::int64_t i = 0; i < mu.density.size(); ++i) {
        if (!mu.valid[i]) continue;
        if (!any) {
            mn = mx = mu.density[i];
            any = true;
        }
        mn = std::min(mn, mu.density[i]);
        mx = std::max(mx, mu.density[i]);
    }
    return Json{{"total_mass", mu.total_mass()},
                {"min_density", mn},
                {"max_density", mx},
                {"clipped_nodes", mu.clipped_nodes},
                {"clip_threshold", mu.clip_threshold},
                {"atoms", mu.atoms.size()},
                {"provenance", to_string(mu.provenance)}};
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

inline void write_scan_csv(const ScanReport<double>& rep, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InvalidArgument("write_scan_csv: cannot open " + path);
    out << "j,value\n";
    for (std::size_t i = 0; i < rep.j.size(); ++i)
        out << rep.j[i] << "," << detail::fmt_g17(rep.values[i]) << "\n";
}

inline Json scan_to_json(const ScanReport<double>& rep) {
    return Json{{"id", rep.id},
                {"spec", rep.spec_desc},
                {"scheme", rep.scheme_desc},
                {"weight", rep.weight_desc},
                {"method", rep.method},
                {"a", rep.a},
                {"t", rep.t},
                {"j", rep.j},
                {"values", rep.values},
                {"thresholds", {{"tail_ratio", rep.rule.tail_ratio}, {"zero_floor", rep.rule.zero_floor}}},
                {"verdict", to_string(rep.verdict)},
                {"stats",
                 {{"first", rep.stats.first},
                  {"last", rep.stats.last},
                  {"ratio", rep.stats.ratio},
                  {"tail_monotone", rep.stats.tail_monotone}}}};
}

inline Json blocki_to_json(const BlockiReport<double>& rep) {
    return Json{{"I", rep.I},
                {"bound", rep.bound},
                {"holds", rep.holds},
                {"quad_abs_error", rep.quad_abs_error},
                {"quad_rel_error", rep.quad_rel_error}};
}

inline Json comparison_to_json(const ComparisonReport<double>& rep) {
    return Json{{"lhs", rep.lhs},
                {"rhs", rep.rhs},
                {"slack", rep.slack},
                {"tolerance", rep.tolerance},
                {"boundary_min", rep.boundary_min},
                {"holds", rep.holds},
                {"refused", rep.refused},
                {"region_nodes", rep.region_nodes}};
}

inline Json capacity_to_json(const CapacityReport<double>& rep) {
    Json cands = Json::array();
    for (const auto& c : rep.candidates) cands.push_back(Json{{"candidate", c.desc}, {"mass", c.mass}});
    return Json{{"best", rep.best}, {"k_nodes", rep.k_nodes}, {"candidates", cands}};
}

inline Json certificate_to_json(const CertificateReport<double>& rep) {
    return Json{{"satisfied", rep.satisfied},
                {"positivity_ok", rep.positivity_ok},
                {"leaves", rep.leaves},
                {"leaves_failing", rep.leaves_failing},
                {"leaf_omega_mass", rep.leaf_omega_mass},
                {"max_last_mass", rep.max_last_mass},
                {"direction", rep.direction},
                {"j", rep.j},
                {"thresholds", {{"tail_ratio", rep.rule.tail_ratio}}}};
}

inline Json weak_convergence_to_json(const WeakConvergenceReport<double>& rep) {
    Json tests = Json::array();
    for (const auto& t : rep.tests)
        tests.push_back(Json{{"test", t.test_desc},
                             {"pairings", t.pairings},
                             {"verdict", to_string(t.verdict)}});
    return Json{{"tests", tests}, {"thresholds", {{"tail_ratio", rep.rule.tail_ratio}}}};
}

}  // namespace pshlab
