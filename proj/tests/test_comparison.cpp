#include <doctest.h>

#include "oracles.hpp"
#include "pshlab/pshlab.hpp"

using namespace pshlab;

namespace {
std::vector<int> js(int lo, int hi) {
    std::vector<int> v;
    for (int j = lo; j <= hi; ++j) v.push_back(j);
    return v;
}
}  // namespace

TEST_CASE("comparison principle: exact ball instance") {
    // u = |z|^2 - 1, v = -1/2 on a box enclosing the unit ball of C^2:
    // {u < v} = {|z|^2 < 1/2}, lhs = 0, rhs = 32 vol = 4 pi^2
    auto g = build_grid<double>(2, {-1, 1, -1, 1, -1, 1, -1, 1}, 0.05);
    auto u = catalog::abs_sq<double>(2, -1.0);
    auto v = catalog::re_affine<double>(2, {}, -0.5);
    auto rep = comparison_check(u, v, CurrentSpecD::trivial(2), 2, g);
    CHECK_FALSE(rep.refused);
    CHECK(rep.boundary_min >= 0.5 - 1e-9);  // on the box shell |z|^2 >= ~1
    CHECK(rep.lhs == 0.0);
    CHECK(rep.rhs == doctest::Approx(4 * M_PI * M_PI).epsilon(0.02));
    CHECK(rep.holds);

    SUBCASE("u = v gives the empty region and holds") {
        auto r2 = comparison_check(u, u, CurrentSpecD::trivial(2), 2, g);
        CHECK(r2.region_nodes == 0);
        CHECK(r2.lhs == 0.0);
        CHECK(r2.rhs == 0.0);
        CHECK(r2.holds);
    }
    SUBCASE("violated boundary condition refuses") {
        // u - v = |z|^2 - 1 + 2 < 0 fails nowhere; swap roles instead:
        // v' = u + 1 exceeds u everywhere including the shell
        auto vbig = catalog::abs_sq<double>(2, 0.0);
        auto r3 = comparison_check(u, vbig, CurrentSpecD::trivial(2), 2, g);
        CHECK(r3.refused);
    }
}

TEST_CASE("randomized comparison suite holds under the fixed seed") {
    auto g = build_grid<double>(2, {-1, 1, -1, 1, -1, 1, -1, 1}, 0.1);
    auto suite = random_comparison_suite<double>(20250810, 50, g, CurrentSpecD::omega_power(1), 1);
    CHECK(suite.reports.size() == 50);
    int nonempty = 0;
    for (const auto& rep : suite.reports) {
        CHECK_FALSE(rep.refused);
        CHECK(rep.holds);
        nonempty += rep.region_nodes > 0 ? 1 : 0;
    }
    CHECK(suite.all_hold);
    CHECK(nonempty >= 40);  // the generator aims v above u near the center
}

TEST_CASE("comparison persists when the competitor shrinks") {
    auto g = build_grid<double>(2, {-1, 1, -1, 1, -1, 1, -1, 1}, 0.1);
    auto u = catalog::abs_sq<double>(2, -1.0);
    for (double c : {0.0, 0.1, 0.25, 0.45}) {
        auto v = catalog::re_affine<double>(2, {}, -0.5 - c);
        auto rep = comparison_check(u, v, CurrentSpecD::trivial(2), 2, g);
        CHECK_FALSE(rep.refused);
        CHECK(rep.holds);
    }
}

TEST_CASE("capacity estimates") {
    auto g = build_grid<double>(2, {-1.4, 1.4, -1.4, 1.4, -1.4, 1.4, -1.4, 1.4}, 0.1);
    const auto T = CurrentSpecD::trivial(2);

    SUBCASE("empty K gives zero") {
        auto K = make_region(g, [](const PointX<double>&) { return false; });
        std::vector<PshSpecD> cands{catalog::abs_sq_profile<double>(2, 0.1, 0.2)};
        auto rep = capacity_estimate(K, g, T, 2, std::span<const PshSpecD>(cands));
        CHECK(rep.best == 0.0);
    }
    SUBCASE("constant candidates contribute nothing") {
        auto K = region_ball(g, 1.0);
        std::vector<PshSpecD> cands{catalog::re_affine<double>(2, {}, 1.0)};
        auto rep = capacity_estimate(K, g, T, 2, std::span<const PshSpecD>(cands));
        CHECK(rep.best == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("radial envelope mass matches the radial oracle and grows with K") {
        // envelope (log|z| - log 1)/(log 3 - log 1), clamped and smoothed:
        // mass over {|z| < R} is 4 pi^2 g'(log R)^2
        const double eps = 0.05, slope = 1.0 / std::log(3.0);
        auto cand = catalog::log_norm_envelope<double>(2, 1.0, 3.0, eps);
        std::vector<PshSpecD> cands{cand};
        const auto chi = ChiWeightD::cutoff(0.0, eps);

        auto mass_oracle = [&](double R) {
            const double gp = chi.chi1(slope * std::log(R)) * slope;
            return radial_mass_c2(gp, 0.0);
        };
        auto K1 = region_ball(g, 1.2);
        auto K2 = region_ball(g, 1.35);
        auto r1 = capacity_estimate(K1, g, T, 2, std::span<const PshSpecD>(cands));
        auto r2 = capacity_estimate(K2, g, T, 2, std::span<const PshSpecD>(cands));
        CHECK(r1.best == doctest::Approx(mass_oracle(1.2)).epsilon(0.05));
        CHECK(r2.best == doctest::Approx(mass_oracle(1.35)).epsilon(0.05));
        CHECK(r2.best >= r1.best);  // monotone in K
    }
    SUBCASE("candidates outside [0, 1] are rejected") {
        auto K = region_ball(g, 1.0);
        std::vector<PshSpecD> cands{catalog::abs_sq<double>(2)};  // reaches ~7.8 on the box
        CHECK_THROWS_AS(capacity_estimate(K, g, T, 2, std::span<const PshSpecD>(cands)),
                        InvalidArgument);
    }
}

TEST_CASE("maximality certificate over coordinate leaves") {
    auto g = build_grid<double>(2, {-1, 1, -1, 1, -1, 1, -1, 1}, 0.2);
    CertificateOptions<double> opt;

    SUBCASE("log|z1| on leaves {z1 = c}: satisfied") {
        auto rep = maximality_certificate(catalog::log_abs<double>(2, 0),
                                          SequenceSchemeD::max_cutoff(), 0, g, js(1, 3), opt);
        CHECK(rep.positivity_ok);
        CHECK(rep.satisfied);
        CHECK(rep.max_last_mass <= 1e-12);
    }
    SUBCASE("Re(z2) on leaves {z2 = c}: satisfied") {
        auto rep = maximality_certificate(catalog::re_affine<double>(2, {{0, 0}, {1, 0}}),
                                          SequenceSchemeD::max_cutoff(), 1, g, js(1, 3), opt);
        CHECK(rep.satisfied);
    }
    SUBCASE("|z|^2 fails: leaf masses positive and j-independent") {
        auto rep = maximality_certificate(catalog::abs_sq<double>(2),
                                          SequenceSchemeD::max_cutoff(), 0, g, js(1, 3), opt);
        CHECK_FALSE(rep.satisfied);
        CHECK(rep.leaves_failing == rep.leaves);
        // each leaf: 4 * valid leaf area
        CHECK(rep.max_last_mass == doctest::Approx(rep.leaf_omega_mass).epsilon(1e-9));
    }
    SUBCASE("strided leaf families are refused") {
        CertificateOptions<double> bad;
        bad.stride = 2;
        CHECK_THROWS_AS(maximality_certificate(catalog::abs_sq<double>(2),
                                               SequenceSchemeD::max_cutoff(), 0, g, js(1, 2), bad),
                        InvalidArgument);
    }
}
