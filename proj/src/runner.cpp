#include "runner.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "registry.hpp"

namespace pshlab {

const char* kVersion = "0.1.0";

namespace {

std::string hex16(std::uint64_t h) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::vector<Exclusion<double>> exclusions_from(const ExperimentConfig& cfg) {
    std::vector<Exclusion<double>> out;
    auto split_groups = [](const std::string& s) {
        std::vector<std::vector<double>> groups;
        std::stringstream ss(s);
        std::string group;
        while (std::getline(ss, group, ';')) {
            std::vector<double> nums;
            std::stringstream gs(group);
            double x;
            while (gs >> x) nums.push_back(x);
            if (!nums.empty()) groups.push_back(nums);
        }
        return groups;
    };
    for (const auto& g : split_groups(cfg.get("grid", "exclude-ball", ""))) {
        if (g.size() < 3) throw InvalidArgument("exclude-ball: expected center coords and radius");
        PointX<double> c(static_cast<int>(g.size()) - 1);
        for (std::size_t i = 0; i + 1 < g.size(); ++i) c[static_cast<int>(i)] = g[i];
        out.push_back(Exclusion<double>::ball(c, g.back()));
    }
    for (const auto& g : split_groups(cfg.get("grid", "exclude-disk", ""))) {
        if (g.size() != 4)
            throw InvalidArgument("exclude-disk: expected coord index, center x y, radius");
        out.push_back(Exclusion<double>::coord_disk(static_cast<int>(g[0]) - 1,
                                                    {g[1], g[2]}, g[3]));
    }
    return out;
}

GridDomain<double> grid_from(const ExperimentConfig& cfg) {
    const int n = cfg.get_int("grid", "n", 2);
    const double h = cfg.require_num("grid", "h");
    auto box = cfg.get_num_list("grid", "box");
    if (box.empty()) throw InvalidArgument("config: missing [grid] box");
    auto g = build_grid<double>(n, std::span<const double>(box), h, exclusions_from(cfg));

    const double ceiling_gib = cfg.get_num("limits", "memory-gib", 2.0);
    // a 4-D run holds roughly a dozen node-sized arrays at peak
    const double est_gib = static_cast<double>(g.node_count()) * 8.0 * 12.0 / (1024.0 * 1024.0 * 1024.0);
    if (est_gib > ceiling_gib) {
        std::ostringstream os;
        os << "grid of " << g.node_count() << " nodes needs about " << std::fixed
           << std::setprecision(2) << est_gib << " GiB (ceiling " << ceiling_gib
           << " GiB); raise [limits] memory-gib to override";
        throw ResourceLimitError(os.str());
    }
    return g;
}

RegionMask<double> region_from(const ExperimentConfig& cfg, const GridDomain<double>& g) {
    const std::string kind = cfg.get("region", "kind", "all");
    if (kind == "all") return region_all(g);
    if (kind == "polydisc") return region_polydisc(g, cfg.get_num("region", "radius", 1.0));
    if (kind == "ball") return region_ball(g, cfg.get_num("region", "radius", 1.0));
    throw InvalidArgument("config: unknown region kind '" + kind + "'");
}

VerdictRule<double> rule_from(const ExperimentConfig& cfg) {
    VerdictRule<double> r;
    r.tail_ratio = cfg.get_num("verdict", "tail-ratio", r.tail_ratio);
    r.zero_floor = cfg.get_num("verdict", "zero-floor", r.zero_floor);
    return r;
}

std::vector<int> j_range_from(const ExperimentConfig& cfg) {
    const int j0 = cfg.get_int("scheme", "j-first", 1);
    const int j1 = cfg.get_int("scheme", "j-last", 6);
    if (j0 < 1 || j1 < j0) throw InvalidArgument("config: bad j range");
    std::vector<int> js;
    for (int j = j0; j <= j1; ++j) js.push_back(j);
    return js;
}

ScanOptions<double> scan_options_from(const ExperimentConfig& cfg) {
    ScanOptions<double> opt;
    opt.rule = rule_from(cfg);
    const std::string w = cfg.get("scan", "weight", "shifted");
    if (w == "shifted") opt.weight = WeightKind::Shifted;
    else if (w == "plain") opt.weight = WeightKind::Plain;
    else throw InvalidArgument("config: unknown weight kind '" + w + "'");
    const std::string m = cfg.get("scan", "method", "auto");
    if (m == "auto") opt.method = ScanMethod::Auto;
    else if (m == "closed-form") opt.method = ScanMethod::ClosedForm;
    else if (m == "grid") opt.method = ScanMethod::Grid;
    else throw InvalidArgument("config: unknown scan method '" + m + "'");
    opt.prefer_finite_difference = cfg.get_bool("scan", "finite-difference", false);
    return opt;
}

struct Artifacts {
    Json result;
    std::string summary;
    const ScanReport<double>* scan = nullptr;
    const MeasureField<double>* density = nullptr;
};

}  // namespace

RunOutcome run_experiment(const ExperimentConfig& cfg, const std::string& out_dir,
                          std::uint64_t seed, int threads) {
    set_thread_count(threads);
    const std::string kind = cfg.require("experiment", "kind");

    Json result;
    std::ostringstream summary;
    ScanReport<double> scan_holder;
    MeasureField<double> density_holder;
    bool have_scan = false, have_density = false;

    if (kind == "ma-density") {
        const auto spec = registry::make_spec(cfg.require("spec", "name"));
        const auto g = grid_from(cfg);
        const auto f = sample(spec, g);
        const bool fd = cfg.get("density", "path", "auto") == "fd" || !spec.analytic();
        const auto F = fd ? complex_hessian(f) : sample_complex_hessian(spec, g);
        if (cfg.has("chi", "name")) {
            const auto chi = registry::make_chi(cfg.require("chi", "name"));
            density_holder = chi_pushforward_density(f, F, chi);
        } else {
            density_holder = ma_density(F);
        }
        have_density = true;
        result = Json{{"spec", spec.describe()}, {"measure", measure_summary_json(density_holder)}};
        summary << "ma-density of " << spec.describe() << ": total mass "
                << density_holder.total_mass() << " (" << to_string(density_holder.provenance)
                << ", clipped " << density_holder.clipped_nodes << ")";
    } else if (kind == "sequence-scan") {
        const auto spec = registry::make_spec(cfg.require("spec", "name"));
        const auto scheme = registry::make_scheme(cfg.require("scheme", "kind"));
        const auto g = grid_from(cfg);
        const auto U = region_from(cfg, g);
        scan_holder = weighted_ma_scan(spec, scheme, cfg.require_num("scan", "a"), U,
                                       j_range_from(cfg), scan_options_from(cfg));
        have_scan = true;
        result = scan_to_json(scan_holder);
        summary << "weighted scan of " << spec.describe() << ": verdict "
                << to_string(scan_holder.verdict) << ", last value " << scan_holder.stats.last;
    } else if (kind == "m1-scan") {
        const auto spec = registry::make_spec(cfg.require("spec", "name"));
        const auto scheme = registry::make_scheme(cfg.require("scheme", "kind"));
        const auto g = grid_from(cfg);
        const auto U = region_from(cfg, g);
        scan_holder = m1_truncated_scan(spec, scheme, cfg.require_num("scan", "t"), U,
                                        j_range_from(cfg), scan_options_from(cfg));
        have_scan = true;
        result = scan_to_json(scan_holder);
        summary << "m1 truncated scan of " << spec.describe() << ": verdict "
                << to_string(scan_holder.verdict) << ", last value " << scan_holder.stats.last;
    } else if (kind == "blocki") {
        const auto chi = registry::make_chi(cfg.get("blocki", "chi", "identity"));
        const std::complex<double> w0(cfg.get_num("blocki", "w0-re", 0.5),
                                      cfg.get_num("blocki", "w0-im", 0.0));
        const double r = cfg.get_num("blocki", "r", 0.1);
        const auto rep =
            blocki_integral(chi, w0, r, cfg.get_num("blocki", "rel-tol", 1e-6));
        result = blocki_to_json(rep);
        result["chi"] = chi.describe();
        summary << "blocki integral, chi = " << chi.describe() << ": I = " << rep.I
                << ", bound = " << rep.bound << ", holds = " << (rep.holds ? "true" : "false");
    } else if (kind == "cegrell") {
        const auto j = static_cast<std::int64_t>(cfg.get_num("cegrell", "j", 1));
        const double rho = cfg.get_num("cegrell", "rho", 1.0);
        const double mass = cegrell_mass<double>(j, rho);
        result = Json{{"j", j}, {"rho", rho}, {"mass", mass}};
        summary << "cegrell mass at j = " << j << ", rho = " << rho << ": " << mass;
        if (cfg.get_bool("cegrell", "grid-check", false)) {
            const auto g = grid_from(cfg);
            const auto vj = make_sequence(catalog::cegrell<double>(),
                                          SequenceSchemeD::log_shift(), static_cast<int>(j));
            const auto F = sample_complex_hessian(vj, g);
            const double est = integrate_measure(ma_density(F), region_polydisc(g, rho));
            result["grid_estimate"] = est;
            result["grid_relative_gap"] = std::abs(est - mass) / mass;
            summary << " (grid estimate " << est << ")";
        }
    } else if (kind == "compare") {
        const auto g = grid_from(cfg);
        const int q = cfg.get_int("compare", "q", 2);
        const std::string cur = cfg.get("compare", "current", "trivial");
        const auto T = cur == "trivial" ? CurrentSpecD::trivial(q)
                     : cur == "omega"   ? CurrentSpecD::omega_power(q)
                                        : throw InvalidArgument("unknown current: " + cur);
        if (cfg.get("compare", "mode", "exact") == "random") {
            const int cases = cfg.get_int("compare", "cases", 50);
            const auto suite = random_comparison_suite<double>(seed, cases, g, T, q);
            Json arr = Json::array();
            int held = 0;
            for (const auto& r : suite.reports) {
                arr.push_back(comparison_to_json(r));
                held += r.holds ? 1 : 0;
            }
            result = Json{{"cases", cases},
                          {"held", held},
                          {"all_hold", suite.all_hold},
                          {"rejected_draws", suite.rejected},
                          {"reports", arr}};
            summary << "random comparison suite: " << held << "/" << cases << " hold";
        } else {
            const auto u = registry::make_spec(cfg.require("compare", "u"));
            const auto v = registry::make_spec(cfg.require("compare", "v"));
            ComparisonOptions<double> copt;
            copt.delta_shift = cfg.get_num("compare", "delta", 0.0);
            const auto rep = comparison_check(u, v, T, q, g, copt);
            result = comparison_to_json(rep);
            if (rep.refused)
                throw PreconditionError("comparison boundary condition violated (min u - v = " +
                                        std::to_string(rep.boundary_min) + " on the shell)");
            summary << "comparison: lhs = " << rep.lhs << ", rhs = " << rep.rhs << ", holds = "
                    << (rep.holds ? "true" : "false");
        }
    } else if (kind == "capacity") {
        const auto g = grid_from(cfg);
        const int q = cfg.get_int("capacity", "q", 2);
        const std::string cur = cfg.get("capacity", "current", "trivial");
        const auto T = cur == "trivial" ? CurrentSpecD::trivial(q)
                     : cur == "omega"   ? CurrentSpecD::omega_power(q)
                                        : throw InvalidArgument("unknown current: " + cur);
        const std::string kkind = cfg.get("capacity", "k-kind", "ball");
        const double krad = cfg.get_num("capacity", "k-radius", 1.0);
        const auto K = kkind == "ball" ? region_ball(g, krad) : region_polydisc(g, krad);
        std::vector<PshSpecD> cands;
        std::stringstream ss(cfg.get("capacity", "candidates",
                                     "log-norm-envelope(r0=1,R=2);abs-sq-profile(a=0.2,b=0.05)"));
        std::string ref;
        while (std::getline(ss, ref, ';'))
            if (!ref.empty()) cands.push_back(registry::make_spec(ref));
        const auto rep = capacity_estimate(K, g, T, q, std::span<const PshSpecD>(cands));
        result = capacity_to_json(rep);
        summary << "capacity lower bound over " << cands.size() << " candidates: " << rep.best;
    } else if (kind == "certificate") {
        const auto spec = registry::make_spec(cfg.require("spec", "name"));
        const auto scheme = registry::make_scheme(cfg.require("scheme", "kind"));
        const auto g = grid_from(cfg);
        CertificateOptions<double> copt;
        copt.rule = rule_from(cfg);
        const int direction = cfg.get_int("certificate", "direction", 1) - 1;
        const auto rep = maximality_certificate(spec, scheme, direction, g, j_range_from(cfg), copt);
        result = certificate_to_json(rep);
        summary << "maximality certificate along z" << direction + 1 << ": "
                << (rep.satisfied ? "hypothesis satisfied" : "hypothesis fails") << " over "
                << rep.leaves << " leaves";
    } else {
        throw InvalidArgument("config: unknown experiment kind '" + kind + "'");
    }

    // computations done; write artifacts
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    Json report{{"kind", kind},
                {"config_hash", hex16(cfg.hash())},
                {"convention", convention_banner()},
                {"seed", seed},
                {"version", kVersion},
                {"result", result}};
    {
        std::ofstream out(fs::path(out_dir) / "report.json");
        out << report.dump(2) << "\n";
    }
    if (have_scan) write_scan_csv(scan_holder, (fs::path(out_dir) / "scan.csv").string());
    if (have_density && cfg.get_bool("output", "density-csv", false))
        write_measure_csv(density_holder, (fs::path(out_dir) / "density.csv").string());

    RunOutcome outcome;
    outcome.report = std::move(report);
    outcome.summary = summary.str();
    return outcome;
}

void print_catalog(std::ostream& os, bool json) {
    const auto rows = registry::catalog_listing();
    if (json) {
        Json arr = Json::array();
        for (const auto& r : rows)
            arr.push_back(Json{{"name", r.name}, {"kind", r.kind}, {"detail", r.detail}});
        os << arr.dump(2) << "\n";
        return;
    }
    std::size_t w = 0;
    for (const auto& r : rows) w = std::max(w, r.name.size());
    std::string last_kind;
    for (const auto& r : rows) {
        if (r.kind != last_kind) {
            os << "# " << r.kind << "\n";
            last_kind = r.kind;
        }
        os << "  " << r.name << std::string(w + 2 - r.name.size(), ' ') << r.detail << "\n";
    }
}

}  // namespace pshlab
