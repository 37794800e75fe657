#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "../src/config.hpp"
#include "../src/registry.hpp"
#include "../src/runner.hpp"

using namespace pshlab;
namespace fs = std::filesystem;

namespace {
std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}
}  // namespace

TEST_CASE("config parsing") {
    auto cfg = ExperimentConfig::parse_string(
        "# comment\n[experiment]\nkind = blocki\n\n[blocki]\nr = 0.1\nw0-re = 0.5\n");
    CHECK(cfg.require("experiment", "kind") == "blocki");
    CHECK(cfg.get_num("blocki", "r", 0) == 0.1);
    CHECK(cfg.get("missing", "key", "fallback") == "fallback");
    CHECK_THROWS_AS(cfg.require("experiment", "absent"), InvalidArgument);
    CHECK_THROWS_AS(ExperimentConfig::parse_string("[x]\nnokey\n"), InvalidArgument);
    CHECK_THROWS_AS(ExperimentConfig::parse_string("[bad\nk = v\n"), InvalidArgument);
    CHECK_THROWS_AS(cfg.require_num("experiment", "kind"), InvalidArgument);
}

TEST_CASE("registry resolves catalog references") {
    CHECK(registry::make_spec("blocki").dim() == 2);
    CHECK(registry::make_spec("abs-sq(n=1)").dim() == 1);
    CHECK(registry::make_spec("barrier-v(m=4)").describe().find("Re") != std::string::npos);
    CHECK_THROWS_AS(registry::make_spec("unknown-spec"), InvalidArgument);
    CHECK_THROWS_AS(registry::make_spec("abs-sq(n=oops)"), InvalidArgument);

    CHECK(registry::make_chi("exp-family(m=4)").m() == 4.0);
    CHECK(registry::make_chi("identity").chi1(-2.0) == 1.0);
    CHECK(registry::make_chi("constant(c=-2)").chi1(-1.0) == 0.0);
    CHECK_THROWS_AS(registry::make_chi("nope"), InvalidArgument);

    CHECK(registry::make_scheme("log-shift").kind == SequenceSchemeD::Kind::LogShift);
    CHECK(registry::make_scheme("max-cutoff(smoothing=0.2)").smoothing == 0.2);

    SUBCASE("listing is sorted, stable, and names the key entries") {
        auto rows = registry::catalog_listing();
        auto rows2 = registry::catalog_listing();
        REQUIRE(rows.size() == rows2.size());
        for (std::size_t i = 0; i < rows.size(); ++i) CHECK(rows[i].name == rows2[i].name);
        bool sorted = true;
        for (std::size_t i = 1; i < rows.size(); ++i)
            if (rows[i - 1].kind == rows[i].kind && rows[i - 1].name > rows[i].name) sorted = false;
        CHECK(sorted);
        auto has = [&](const std::string& n) {
            for (const auto& r : rows)
                if (r.name == n) return true;
            return false;
        };
        CHECK(has("blocki"));
        CHECK(has("cegrell"));
        CHECK(has("barrier-v"));
    }
}

TEST_CASE("runner: blocki experiment writes a complete report") {
    const fs::path dir = fs::temp_directory_path() / "pshlab_test_blocki";
    fs::remove_all(dir);
    auto cfg = ExperimentConfig::parse_string(
        "[experiment]\nkind = blocki\n[blocki]\nchi = identity\nw0-re = 0.5\nr = 0.1\n");
    auto outcome = run_experiment(cfg, dir.string(), 1, 1);
    CHECK(fs::exists(dir / "report.json"));
    const auto& res = outcome.report["result"];
    CHECK(res["bound"].get<double>() == doctest::Approx(190.503).epsilon(1e-4));
    CHECK(res["I"].get<double>() == doctest::Approx(1.15302).epsilon(1e-4));
    CHECK(outcome.report["convention"] == "d^c = i(dbar - d)");
    CHECK(outcome.report.contains("config_hash"));
    fs::remove_all(dir);
}

TEST_CASE("runner: cegrell mass with grid check") {
    const fs::path dir = fs::temp_directory_path() / "pshlab_test_cegrell";
    fs::remove_all(dir);
    auto cfg = ExperimentConfig::parse_string(
        "[experiment]\nkind = cegrell\n[cegrell]\nj = 1\nrho = 1\n");
    auto outcome = run_experiment(cfg, dir.string(), 0, 1);
    CHECK(outcome.report["result"]["mass"].get<double>() ==
          doctest::Approx(8 * M_PI * M_PI).epsilon(1e-12));
    fs::remove_all(dir);
}

TEST_CASE("runner: malformed config leaves no partial outputs") {
    const fs::path dir = fs::temp_directory_path() / "pshlab_test_bad";
    fs::remove_all(dir);
    auto cfg = ExperimentConfig::parse_string(
        "[experiment]\nkind = sequence-scan\n[spec]\nname = log-sum\n"
        "[grid]\nn = 2\nbox = -1 1 -1 1 -1 1 -1 1\nh = 0.2\n[scan]\na = 1.5\n");
    // missing [scheme] kind
    CHECK_THROWS_AS(run_experiment(cfg, dir.string(), 0, 1), InvalidArgument);
    CHECK_FALSE(fs::exists(dir / "report.json"));
    fs::remove_all(dir);
}

TEST_CASE("runner: memory ceiling refuses oversized grids") {
    auto cfg = ExperimentConfig::parse_string(
        "[experiment]\nkind = ma-density\n[spec]\nname = abs-sq\n"
        "[grid]\nn = 2\nbox = -1 1 -1 1 -1 1 -1 1\nh = 0.005\n");
    CHECK_THROWS_AS(run_experiment(cfg, "unused_out", 0, 1), ResourceLimitError);
}

TEST_CASE("runner: identical config and seed give identical bytes") {
    const std::string text =
        "[experiment]\nkind = sequence-scan\n[spec]\nname = log-sum\n[scheme]\nkind = max-cutoff\n"
        "j-first = 1\nj-last = 5\n[scan]\na = 1.5\n[region]\nkind = polydisc\nradius = 1\n"
        "[grid]\nn = 2\nbox = -1 1 -1 1 -1 1 -1 1\nh = 0.2\n";
    const fs::path d1 = fs::temp_directory_path() / "pshlab_det_1";
    const fs::path d2 = fs::temp_directory_path() / "pshlab_det_2";
    fs::remove_all(d1);
    fs::remove_all(d2);
    auto cfg = ExperimentConfig::parse_string(text);
    run_experiment(cfg, d1.string(), 7, 1);
    run_experiment(cfg, d2.string(), 7, 2);  // thread count must not matter
    CHECK(slurp(d1 / "report.json") == slurp(d2 / "report.json"));
    CHECK(slurp(d1 / "scan.csv") == slurp(d2 / "scan.csv"));
    CHECK(!slurp(d1 / "scan.csv").empty());
    fs::remove_all(d1);
    fs::remove_all(d2);
}

TEST_CASE("runner: random comparison suite end to end") {
    const fs::path dir = fs::temp_directory_path() / "pshlab_test_cmp";
    fs::remove_all(dir);
    auto cfg = ExperimentConfig::parse_string(
        "[experiment]\nkind = compare\n[compare]\nmode = random\ncases = 5\ncurrent = omega\nq = 1\n"
        "[grid]\nn = 2\nbox = -1 1 -1 1 -1 1 -1 1\nh = 0.2\n");
    auto outcome = run_experiment(cfg, dir.string(), 20250810, 1);
    CHECK(outcome.report["result"]["all_hold"].get<bool>());
    fs::remove_all(dir);
}

TEST_CASE("catalog printing") {
    std::ostringstream table, js;
    print_catalog(table, false);
    CHECK(table.str().find("blocki") != std::string::npos);
    CHECK(table.str().find("barrier-v") != std::string::npos);
    print_catalog(js, true);
    CHECK(js.str().find("\"name\"") != std::string::npos);
}
