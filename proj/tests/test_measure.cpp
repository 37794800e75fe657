#include <doctest.h>

#include "oracles.hpp"
#include "pshlab/pshlab.hpp"

using namespace pshlab;

namespace {
GridDomain<double> box4(double a, double h) { return build_grid<double>(2, {-a, a, -a, a, -a, a, -a, a}, h); }
}  // namespace

TEST_CASE("ma_density calibration: (dd^c(|z1|^2+|z2|^2))^2 = 32 dV4") {
    auto g = box4(1.0, 0.2);
    auto u = catalog::abs_sq<double>(2);

    SUBCASE("analytic path is exact") {
        auto mu = ma_density(sample_complex_hessian(u, g));
        for (std::int64_t i = 0; i < mu.density.size(); ++i)
            if (mu.valid[i]) CHECK(std::abs(mu.density[i] - 32.0) <= 1e-10 * 32.0);
        CHECK(mu.clipped_nodes == 0);
    }
    SUBCASE("finite differences are exact on quadratics") {
        auto mu = ma_density(complex_hessian(sample(u, g)));
        for (std::int64_t i = 0; i < mu.density.size(); ++i)
            if (mu.valid[i]) CHECK(std::abs(mu.density[i] - 32.0) <= 1e-9 * 32.0);
    }
    SUBCASE("pluriharmonic input has zero measure") {
        auto mu = ma_density(complex_hessian(sample(catalog::re_affine<double>(2, {{1, 0}}), g)));
        for (std::int64_t i = 0; i < mu.density.size(); ++i) CHECK(mu.density[i] == 0.0);
    }
    SUBCASE("wedge chain: dd^c|z|^2 ^ omega = 32 dV4 and matches the trivial route") {
        auto F = sample_complex_hessian(u, g);
        auto mu1 = wedge_with_current(F, CurrentSpecD::omega_power(1));
        for (std::int64_t i = 0; i < mu1.density.size(); ++i)
            if (mu1.valid[i]) CHECK(std::abs(mu1.density[i] - 32.0) <= 1e-10 * 32.0);
        auto mu2 = wedge_with_current(F, CurrentSpecD::omega_power(2));
        auto mu3 = wedge_with_current(F, CurrentSpecD::trivial(2));
        for (std::int64_t i = 0; i < mu2.density.size(); ++i)
            CHECK(mu2.density[i] == mu3.density[i]);
    }
}

TEST_CASE("radial Laplacian example: log(|z|^2 + 1) at the origin") {
    auto g = build_grid<double>(1, {-1, 1, -1, 1}, 0.05);
    // 2 * shifted_log = log(|z|^2 + 1)
    auto spec = PshSpec<double>(
        std::make_shared<nodes::Sum<double>>(std::vector<std::pair<double, NodePtr<double>>>{
            {2.0, std::make_shared<nodes::ShiftedLog<double>>(0, Complex<double>(0, 0), 1.0)}}),
        1);
    auto mu = ma_density(sample_complex_hessian(spec, g));
    std::array<std::int64_t, 2> c{20, 20};
    CHECK(mu.density[g.encode({c.data(), 2})] == doctest::Approx(4.0).epsilon(1e-12));

    // density route cross-check of the radial mass formula for n = 1
    const double R = 0.9;
    auto g2 = [&](double s) {  // g(s) = log(e^{2s} + 1), g'' = 4 e^{2s}/(e^{2s}+1)^2
        const double e = std::exp(2 * s);
        return 4 * e / ((e + 1) * (e + 1));
    };
    const double by_density = oracles::radial_mass_c1_by_density(g2, R);
    const double e2 = std::exp(2 * std::log(R));
    const double closed = radial_mass_c1(2 * e2 / (e2 + 1), 0.0);
    CHECK(by_density == doctest::Approx(closed).epsilon(1e-6));
}

TEST_CASE("mixed density: closed form for the blocki function") {
    const double r = std::exp(-1.0);
    SUBCASE("analytic value at |z| = |w| = 1/e is e^4/4") {
        auto g = build_grid<double>(2, {r - 0.02, r + 0.02, -0.02, 0.02, r - 0.02, r + 0.02,
                                        -0.02, 0.02},
                                    0.005);
        auto F = sample_complex_hessian(catalog::blocki<double>(), g);
        auto mu = mixed_density(F);
        std::array<std::int64_t, 4> c{4, 4, 4, 4};
        CHECK(mu.density[g.encode({c.data(), 4})] ==
              doctest::Approx(std::exp(4.0) / 4).epsilon(1e-12));

        auto Ffd = complex_hessian(sample(catalog::blocki<double>(), g));
        auto mufd = mixed_density(Ffd);
        CHECK(mufd.density[g.encode({c.data(), 4})] ==
              doctest::Approx(std::exp(4.0) / 4).epsilon(0.01));
    }
    SUBCASE("frozen value at (|z|, |w|) = (0.3, 0.5)") {
        const double expected =
            1.0 / (4.0 * std::sqrt(std::log(0.3) * std::log(0.5)) * 0.09 * 0.25);
        auto g = build_grid<double>(2, {0.28, 0.32, -0.02, 0.02, 0.48, 0.52, -0.02, 0.02}, 0.005);
        auto F = sample_complex_hessian(catalog::blocki<double>(), g);
        auto mu = mixed_density(F);
        std::array<std::int64_t, 4> c{4, 4, 4, 4};
        CHECK(mu.density[g.encode({c.data(), 4})] == doctest::Approx(expected).epsilon(1e-12));
        CHECK(expected == doctest::Approx(12.16288).epsilon(1e-5));
    }
    SUBCASE("pluriharmonic input vanishes") {
        auto g = box4(1.0, 0.2);
        auto mu = mixed_density(sample_complex_hessian(catalog::re_affine<double>(2, {{1, 0}, {0, 1}}), g));
        for (std::int64_t i = 0; i < mu.density.size(); ++i) CHECK(mu.density[i] == 0.0);
    }
    SUBCASE("the blocki Monge-Ampere density itself vanishes off the axes") {
        auto g = build_grid<double>(2, {0.1, 0.6, -0.2, 0.2, 0.1, 0.6, -0.2, 0.2}, 0.05);
        auto mu = ma_density(sample_complex_hessian(catalog::blocki<double>(), g));
        for (std::int64_t i = 0; i < mu.density.size(); ++i)
            CHECK(std::abs(mu.density[i]) <= 1e-12);
    }
}

TEST_CASE("chi pushforward density") {
    SUBCASE("identity chi reproduces ma_density exactly") {
        auto g = box4(0.9, 0.15);
        auto u = catalog::cegrell<double>();
        auto f = sample(u, g);
        auto F = sample_complex_hessian(u, g);
        auto a = chi_pushforward_density(f, F, ChiWeightD::identity());
        auto b = ma_density(F);
        for (std::int64_t i = 0; i < a.density.size(); ++i)
            if (a.valid[i] && b.valid[i]) CHECK(a.density[i] == b.density[i]);
    }
    SUBCASE("exponential chi on |z|^2 - 4 at (1, 0): 64 e^{2u}") {
        // chi'' = chi' = e^t for the m = 1 exponential family
        auto u = catalog::abs_sq<double>(2, -4.0);
        auto g = box4(1.5, 0.1);
        auto f = sample(u, g);
        auto F = sample_complex_hessian(u, g);
        auto mu = chi_pushforward_density(f, F, ChiWeightD::exp_family(1));
        std::array<std::int64_t, 4> idx{25, 15, 15, 15};  // node (1, 0, 0, 0)
        const auto p = g.point(std::span<const std::int64_t>(idx.data(), 4));
        REQUIRE(p[0] == doctest::Approx(1.0));
        const double expect = 64.0 * std::exp(2.0 * (1.0 - 4.0));
        CHECK(mu.density[g.encode({idx.data(), 4})] == doctest::Approx(expect).epsilon(1e-12));
    }
    SUBCASE("blocki with smooth chi matches the closed form everywhere") {
        auto g = build_grid<double>(2, {0.15, 0.55, -0.15, 0.15, 0.15, 0.55, -0.15, 0.15}, 0.05);
        auto u = catalog::blocki<double>();
        auto f = sample(u, g);
        auto F = sample_complex_hessian(u, g);
        const auto chi = ChiWeightD::exp_family(2);
        auto mu = chi_pushforward_density(f, F, chi);
        for (std::int64_t i = 0; i < mu.density.size(); ++i) {
            if (!mu.valid[i]) continue;
            const auto p = g.point(i);
            const double cf = closed_form_blocki_density(chi, coord(p, 0), coord(p, 1));
            CHECK(mu.density[i] == doctest::Approx(cf).epsilon(1e-11));
        }
    }
    SUBCASE("phi-alpha refuses nonnegative samples") {
        auto u = catalog::abs_sq<double>(2);
        auto g = box4(1.0, 0.2);
        auto f = sample(u, g);
        auto F = sample_complex_hessian(u, g);
        CHECK_THROWS_AS(chi_pushforward_density(f, F, ChiWeightD::phi_alpha(0.5)),
                        PreconditionError);
    }
}

TEST_CASE("closed_form_blocki_density") {
    const double r = std::exp(-1.0);
    CHECK(closed_form_blocki_density(ChiWeightD::identity(), Complex<double>(r, 0),
                                     Complex<double>(r, 0)) == 0.0);
    CHECK(closed_form_blocki_density(ChiWeightD::exp_family(1), Complex<double>(r, 0),
                                     Complex<double>(r, 0)) ==
          doctest::Approx(std::exp(2.0) / 2).epsilon(1e-13));
    CHECK_THROWS_AS(closed_form_blocki_density(ChiWeightD::identity(), Complex<double>(0, 0),
                                               Complex<double>(0.5, 0)),
                    PreconditionError);

    SUBCASE("finite differences track the closed form at random annulus points") {
        const auto chi = ChiWeightD::exp_family(4);
        auto composite = PshSpec<double>(
            std::make_shared<nodes::ChiCompose<double>>(chi, catalog::blocki<double>().node()), 2);
        auto fn = [&](const PointX<double>& q) { return composite.eval_raw(q); };
        Rng rng(17);
        for (int k = 0; k < 10; ++k) {
            const auto z = std::polar(rng.uniform(0.2, 0.8), rng.uniform(0.0, 6.28));
            const auto w = std::polar(rng.uniform(0.2, 0.8), rng.uniform(0.0, 6.28));
            const auto p = point_c2(z, w);
            const double h = std::min({std::abs(z), std::abs(w), 1 - std::abs(z), 1 - std::abs(w)}) / 200;
            const auto d = fd_derivs_at<double>(fn, p, 2, h);
            const double det = d.hess(0, 0).real() * d.hess(1, 1).real() - std::norm(d.hess(0, 1));
            const double fd_density = 32.0 * det;
            const double cf = closed_form_blocki_density(chi, z, w);
            CHECK(fd_density == doctest::Approx(cf).epsilon(0.01));
        }
    }
}

TEST_CASE("wedge_with_current") {
    SUBCASE("slice current of log|z1| has zero leaf mass") {
        auto g = box4(1.0, 0.2);
        auto F = sample_complex_hessian(catalog::log_abs<double>(2, 0), g);
        auto T = CurrentSpecD::slice(0, {Complex<double>(0.4, 0.2), Complex<double>(-0.2, 0.6)});
        auto mu = wedge_with_current(F, T);
        CHECK(mu.domain.n == 1);
        CHECK(mu.total_mass() == doctest::Approx(0.0).epsilon(1e-14));
    }
    SUBCASE("smoothed log cutoff carries total mass 2 pi on the disc") {
        auto g = build_grid<double>(1, {-1, 1, -1, 1}, 0.02);
        auto member = make_sequence(catalog::log_abs<double>(1, 0),
                                    SequenceSchemeD::max_cutoff(0.2), 1);
        auto mu = ma_density(complex_hessian(sample(member, g)));
        const double grid_mass = integrate_measure(mu, region_all(g));
        CHECK(grid_mass == doctest::Approx(2 * M_PI).epsilon(0.02));
        // radial oracle: the same mass from the smooth-max profile derivative,
        // accounting for the slice of the smoothed belt beyond |z| = 1
        const auto chi = ChiWeightD::cutoff(-1, 0.2);
        const double closed = radial_mass_c1(chi.chi1(std::log(1.0)), chi.chi1(-40.0));
        CHECK(closed == doctest::Approx(2 * M_PI).epsilon(0.02));
        CHECK(grid_mass == doctest::Approx(closed).epsilon(0.02));
    }
    SUBCASE("unsupported combinations are rejected") {
        auto g = box4(1.0, 0.2);
        auto F = sample_complex_hessian(catalog::abs_sq<double>(2), g);
        CHECK_THROWS_AS(wedge_with_current(F, CurrentSpecD::trivial(1)), InvalidArgument);
        CHECK_THROWS_AS(wedge_with_current(F, CurrentSpecD::omega_power(3)), InvalidArgument);
    }
}

TEST_CASE("integrate_measure") {
    SUBCASE("unit density over [0,1]^2 has mass 1 up to the boundary ring") {
        const double h = 0.02;
        auto g = build_grid<double>(1, {-0.2, 1.2, -0.2, 1.2}, h);
        auto mu = MeasureField<double>{};
        mu.domain = g;
        mu.density.setConstant(g.node_count(), 1.0);
        mu.valid.assign(g.node_count(), 1);
        auto box01 = make_region(g, [&](const PointX<double>& p) {
            return p[0] > -h / 2 && p[0] < 1 - h / 2 && p[1] > -h / 2 && p[1] < 1 - h / 2;
        });
        CHECK(integrate_measure(mu, box01) == doctest::Approx(1.0).epsilon(2 * h));
    }
    SUBCASE("atoms contribute weighted masses") {
        auto g = build_grid<double>(1, {-1, 1, -1, 1}, 0.25);
        MeasureField<double> mu;
        mu.domain = g;
        mu.density.setZero(g.node_count());
        mu.valid.assign(g.node_count(), 1);
        mu.atoms.push_back({point_c1({0.5, 0}), 2.0});
        const double v = integrate_measure<double>(mu, region_all(g),
                                                   [](const PointX<double>& p) { return p[0]; });
        CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
    }
    SUBCASE("non-evaluable weight at a massive node throws") {
        auto g = build_grid<double>(1, {-1, 1, -1, 1}, 0.25);
        MeasureField<double> mu;
        mu.domain = g;
        mu.density.setConstant(g.node_count(), 1.0);
        mu.valid.assign(g.node_count(), 1);
        CHECK_THROWS_AS(integrate_measure<double>(
                            mu, region_all(g),
                            [](const PointX<double>&) { return std::nan(""); }),
                        PreconditionError);
    }
}

TEST_CASE("Cauchy-Schwarz for gradient pairings against omega") {
    Rng rng(31);
    auto g = box4(1.0, 0.1);
    for (int trial = 0; trial < 100; ++trial) {
        auto mk = [&] {
            std::vector<std::pair<double, NodePtr<double>>> terms;
            for (int j = 0; j < 2; ++j) {
                terms.emplace_back(rng.uniform(0.1, 1.5), std::make_shared<nodes::AbsSq<double>>(
                                                              j, Complex<double>(rng.uniform(-0.3, 0.3),
                                                                                 rng.uniform(-0.3, 0.3))));
                terms.emplace_back(rng.uniform(0.1, 1.0),
                                   std::make_shared<nodes::ShiftedLog<double>>(
                                       j, Complex<double>(rng.uniform(-0.2, 0.2), 0),
                                       rng.uniform(0.4, 1.0)));
            }
            return PshSpec<double>(std::make_shared<nodes::Sum<double>>(std::move(terms)), 2);
        };
        const auto u = mk(), v = mk();
        auto Fu = sample_complex_hessian(u, g);
        auto Fv = sample_complex_hessian(v, g);
        const auto all = region_all(g);
        const double uv = integrate_measure(gradient_pairing_density(Fu, Fv), all);
        const double uu = integrate_measure(gradient_pairing_density(Fu, Fu), all);
        const double vv = integrate_measure(gradient_pairing_density(Fv, Fv), all);
        REQUIRE(uv * uv <= uu * vv * (1 + 1e-9));
    }
}

TEST_CASE("weak convergence sanity: smooth decreasing sequence") {
    auto g = box4(1.0, 0.1);
    auto u = catalog::abs_sq<double>(2, -3.0);
    std::vector<MeasureField<double>> measures;
    std::vector<int> js{1, 2, 3, 4, 5, 6, 7};
    for (int j : js) {
        auto member = make_sequence(u, SequenceSchemeD::chi_compose(1, 2), j);
        auto f = sample(member, g);
        auto F = sample_complex_hessian(member, g);
        measures.push_back(ma_density(F));
    }
    auto limit = ma_density(sample_complex_hessian(u, g));

    std::vector<BumpWeight<double>> bumps;
    for (double r : {0.5, 0.8, 1.2}) bumps.push_back({PointX<double>::Zero(4), r, 1.0});

    const auto all = region_all(g);
    for (const auto& phi : bumps) {
        auto pair_with = [&](const MeasureField<double>& mu) {
            return integrate_measure<double>(mu, all,
                                             [&](const PointX<double>& p) { return phi(p); });
        };
        const double target = pair_with(limit);
        double prev = -std::numeric_limits<double>::infinity();
        double last = 0;
        for (const auto& mu : measures) {
            last = pair_with(mu);
            CHECK(last >= prev - 1e-10);  // monotone trend upward to the limit
            prev = last;
        }
        CHECK(std::abs(last - target) <= 0.01 * std::abs(target));
    }
}

TEST_CASE("measure field summary surfaces clipping") {
    auto g = box4(0.8, 0.2);
    auto mu = ma_density(complex_hessian(sample(catalog::cegrell<double>(), g)));
    auto js = measure_summary_json(mu);
    CHECK(js.contains("total_mass"));
    CHECK(js.contains("clipped_nodes"));
    CHECK(js["provenance"] == "finite-difference");
}
