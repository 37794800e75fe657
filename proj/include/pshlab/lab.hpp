#pragma once

#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "pshlab/measure.hpp"
#include "pshlab/quadrature.hpp"
#include "pshlab/radial.hpp"

namespace pshlab {

enum class Verdict { TendsToZero, BoundedBelow, Inconclusive };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::TendsToZero: return "tends-to-zero";
        case Verdict::BoundedBelow: return "bounded-below";
        case Verdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

/// Decision thresholds for scan verdicts. The tail-ratio default 0.05 is an
/// artifact choice (the theorems speak only of limits); every report records
/// the rule it ran under, and runs may override it.
template <class Scalar = double>
struct VerdictRule {
    Scalar tail_ratio = Scalar(0.05);
    Scalar zero_floor = Scalar(1e-14);
};

template <class Scalar = double>
struct VerdictStats {
    Scalar first = Scalar(0), last = Scalar(0), ratio = Scalar(0);
    bool tail_monotone = false;
};

/// Pure function of the value sequence: tends-to-zero iff the last value is
/// below tail_ratio times the first and the second half is nonincreasing;
/// bounded-below iff the last value stays above that fraction.
template <class Scalar>
Verdict classify_sequence(std::span<const Scalar> values, const VerdictRule<Scalar>& rule,
                          VerdictStats<Scalar>* stats = nullptr) {
    if (values.empty()) throw InvalidArgument("classify_sequence: empty value list");
    VerdictStats<Scalar> s;
    s.first = values.front();
    s.last = values.back();
    s.tail_monotone = true;
    for (std::size_t i = values.size() / 2; i + 1 < values.size(); ++i)
        if (values[i + 1] > values[i] * (1 + Scalar(1e-9)) + rule.zero_floor)
            s.tail_monotone = false;
    s.ratio = s.first > rule.zero_floor ? s.last / s.first : Scalar(0);
    Verdict v;
    if (s.first <= rule.zero_floor && s.last <= rule.zero_floor)
        v = Verdict::TendsToZero;
    else if (s.last < rule.tail_ratio * s.first)
        v = s.tail_monotone ? Verdict::TendsToZero : Verdict::Inconclusive;
    else
        v = Verdict::BoundedBelow;
    if (stats) *stats = s;
    return v;
}

template <class Scalar = double>
struct ScanReport {
    std::string id;
    std::string spec_desc, scheme_desc, weight_desc, method;
    std::vector<int> j;
    std::vector<Scalar> values;
    Scalar a = Scalar(0);  // weight exponent
    Scalar t = Scalar(0);  // truncation level
    VerdictRule<Scalar> rule;
    Verdict verdict = Verdict::Inconclusive;
    VerdictStats<Scalar> stats;
};

enum class ScanMethod { Auto, ClosedForm, Grid };

/// Theorem-style weight: shifted (|u|+1)^{-a} or plain |u|^{-a}.
enum class WeightKind { Shifted, Plain };

template <class Scalar = double>
struct ScanOptions {
    ScanMethod method = ScanMethod::Auto;
    WeightKind weight = WeightKind::Shifted;
    VerdictRule<Scalar> rule;
    bool prefer_finite_difference = false;
};

namespace detail {

template <class Scalar>
ComplexHessianField<Scalar> field_for(const PshSpec<Scalar>& member, const GridDomain<Scalar>& d,
                                      const GridFunction<Scalar>& f, bool prefer_fd) {
    if (member.analytic() && !prefer_fd) return sample_complex_hessian(member, d);
    return complex_hessian(f);
}

template <class Scalar>
Scalar weight_value(WeightKind kind, Scalar u, Scalar a) {
    const Scalar mag = std::abs(u);
    return kind == WeightKind::Shifted ? std::pow(mag + Scalar(1), -a) : std::pow(mag, -a);
}

/// Resolve the smooth-max scale for grid sampling: hard cutoffs default to
/// 5h so the Bedford-Taylor mass of the kink is representable as a density.
template <class Scalar>
SequenceScheme<Scalar> resolve_scheme(const SequenceScheme<Scalar>& scheme, Scalar h) {
    SequenceScheme<Scalar> s = scheme;
    if (s.kind == SequenceScheme<Scalar>::Kind::MaxCutoff && s.smoothing <= Scalar(0))
        s.smoothing = Scalar(5) * h;
    return s;
}

}  // namespace detail

/// Per-j values of int_U w(u_j) (dd^c u_j)^n for the weighted scans. Sums of
/// origin-centered one-variable logs with hard cutoffs reduce in closed form:
/// the Monge-Ampere measure of the j-th member is n! times the product of
/// uniform circle measures of mass 2 pi c_i on |z_i| = exp(-j/c_i), where the
/// member is constant equal to -n j. The 4-D grid path is the cross-check.
template <class Scalar>
ScanReport<Scalar> weighted_ma_scan(const PshSpec<Scalar>& spec,
                                    const SequenceScheme<Scalar>& scheme, Scalar a,
                                    const RegionMask<Scalar>& U, std::span<const int> j_range,
                                    const ScanOptions<Scalar>& opt = {}) {
    if (a < Scalar(0)) throw InvalidArgument("weighted_ma_scan: exponent must be >= 0");
    if (j_range.empty()) throw InvalidArgument("weighted_ma_scan: empty index range");
    if (U.count() == 0) throw InvalidArgument("weighted_ma_scan: empty region");

    ScanReport<Scalar> rep;
    rep.id = "weighted-ma-scan";
    rep.spec_desc = spec.describe();
    rep.scheme_desc = scheme.describe();
    rep.weight_desc = opt.weight == WeightKind::Shifted ? "(|u|+1)^-a" : "|u|^-a";
    rep.a = a;
    rep.rule = opt.rule;
    rep.j.assign(j_range.begin(), j_range.end());

    const auto log_form = as_log_sum(spec);
    const bool closed_ok = scheme.kind == SequenceScheme<Scalar>::Kind::MaxCutoff &&
                           scheme.smoothing <= Scalar(0) && log_form.has_value() &&
                           spec.dim() == U.domain.n;
    const bool use_closed =
        opt.method == ScanMethod::ClosedForm || (opt.method == ScanMethod::Auto && closed_ok);
    if (opt.method == ScanMethod::ClosedForm && !closed_ok)
        throw InvalidArgument("weighted_ma_scan: closed-form reduction not applicable");

    if (use_closed) {
        rep.method = "closed-form";
        const int n = spec.dim();
        const auto& atoms = *log_form;
        for (int j : j_range) {
            if (static_cast<int>(atoms.size()) < n) {
                // measure vanishes: fewer independent directions than n
                rep.values.push_back(Scalar(0));
                continue;
            }
            Scalar mass = n == 1 ? Scalar(1) : Scalar(2);  // n!
            std::vector<Scalar> radii;
            for (const auto& [coord, c] : atoms) {
                mass *= Scalar(2) * Scalar(M_PI) * c;
                radii.push_back(std::exp(-Scalar(j) / c));
            }
            const Scalar u_level = -Scalar(n) * Scalar(j);
            const Scalar w = detail::weight_value(opt.weight, u_level, a);
            // containment fraction of the support torus in U, by angle lattice
            const int K = 64;
            std::int64_t inside = 0, total = 0;
            std::array<std::int64_t, 4> idx{};
            for (int p = 0; p < K; ++p)
                for (int q = 0; q < (n == 2 ? K : 1); ++q) {
                    PointX<Scalar> pt(2 * n);
                    const Scalar th1 = Scalar(2) * Scalar(M_PI) * p / K;
                    pt[2 * atoms[0].first] = radii[0] * std::cos(th1);
                    pt[2 * atoms[0].first + 1] = radii[0] * std::sin(th1);
                    if (n == 2) {
                        const Scalar th2 = Scalar(2) * Scalar(M_PI) * q / K;
                        pt[2 * atoms[1].first] = radii[1] * std::cos(th2);
                        pt[2 * atoms[1].first + 1] = radii[1] * std::sin(th2);
                    }
                    ++total;
                    bool ok = true;
                    for (int ax = 0; ax < U.domain.axes(); ++ax) {
                        const auto k = static_cast<std::int64_t>(
                            std::llround((pt[ax] - U.domain.lo[ax]) / U.domain.h));
                        if (k < 0 || k >= U.domain.counts[ax]) {
                            ok = false;
                            break;
                        }
                        idx[ax] = k;
                    }
                    if (ok && U.member[U.domain.encode(
                                  std::span<const std::int64_t>(idx.data(), U.domain.axes()))])
                        ++inside;
                }
            rep.values.push_back(mass * w * Scalar(inside) / Scalar(total));
        }
    } else {
        rep.method = "grid";
        const auto sch = detail::resolve_scheme(scheme, U.domain.h);
        for (int j : j_range) {
            const auto member = make_sequence(spec, sch, j);
            const auto f = sample(member, U.domain);
            if (opt.weight == WeightKind::Plain)
                for (std::int64_t i = 0; i < f.size(); ++i)
                    if (f.valid[i] && U.member[i] && !(f.values[i] < Scalar(0)))
                        throw PreconditionError("weighted_ma_scan: plain weight needs u < 0");
            const auto F = detail::field_for(member, U.domain, f, opt.prefer_finite_difference);
            const auto mu = ma_density(F);
            std::vector<Scalar> w(f.size());
            for (std::int64_t i = 0; i < f.size(); ++i)
                w[i] = f.valid[i] ? detail::weight_value(opt.weight, f.values[i], a)
                                  : std::numeric_limits<Scalar>::quiet_NaN();
            rep.values.push_back(integrate_measure_nodal(mu, U, std::span<const Scalar>(w)));
        }
    }
    rep.verdict = classify_sequence(std::span<const Scalar>(rep.values), rep.rule, &rep.stats);
    return rep;
}

/// Per-j value of the truncated pair
///   int_{U cap {u_j > -t}} (dd^c u_j)^n + int_{U cap {u_j > -t}} du_j ^ d^c u_j ^ (dd^c u_j)^{n-1}.
template <class Scalar>
ScanReport<Scalar> m1_truncated_scan(const PshSpec<Scalar>& spec,
                                     const SequenceScheme<Scalar>& scheme, Scalar t,
                                     const RegionMask<Scalar>& U, std::span<const int> j_range,
                                     const ScanOptions<Scalar>& opt = {}) {
    if (!(t > Scalar(0))) throw InvalidArgument("m1_truncated_scan: truncation must be positive");
    if (j_range.empty()) throw InvalidArgument("m1_truncated_scan: empty index range");
    if (U.count() == 0) throw InvalidArgument("m1_truncated_scan: empty region");

    ScanReport<Scalar> rep;
    rep.id = "m1-truncated-scan";
    rep.spec_desc = spec.describe();
    rep.scheme_desc = scheme.describe();
    rep.weight_desc = "1_{u_j > -t}";
    rep.t = t;
    rep.rule = opt.rule;
    rep.j.assign(j_range.begin(), j_range.end());
    rep.method = "grid";

    const auto sch = detail::resolve_scheme(scheme, U.domain.h);
    for (int j : j_range) {
        const auto member = make_sequence(spec, sch, j);
        const auto f = sample(member, U.domain);
        const auto F = detail::field_for(member, U.domain, f, opt.prefer_finite_difference);
        const auto region = region_and(U, region_above(f, -t));
        const Scalar ma = integrate_measure(ma_density(F), region);
        const Scalar mixed = integrate_measure(mixed_density(F), region);
        rep.values.push_back(ma + mixed);
    }
    rep.verdict = classify_sequence(std::span<const Scalar>(rep.values), rep.rule, &rep.stats);
    return rep;
}

/// Radial C-infinity bump: amplitude at the center, support |x - c| < radius.
template <class Scalar = double>
struct BumpWeight {
    PointX<Scalar> center;
    Scalar radius = Scalar(1);
    Scalar amplitude = Scalar(1);

    Scalar operator()(const PointX<Scalar>& p) const {
        const Scalar s2 = (p - center).squaredNorm() / (radius * radius);
        if (s2 >= Scalar(1)) return Scalar(0);
        return amplitude * std::exp(Scalar(1) - Scalar(1) / (Scalar(1) - s2));
    }

    std::string describe() const {
        std::ostringstream os;
        os << "bump(r=" << radius << ", A=" << amplitude << ")";
        return os.str();
    }
};

template <class Scalar = double>
struct WeakConvergenceReport {
    struct PerTest {
        std::string test_desc;
        std::vector<Scalar> pairings;
        Verdict verdict;
        VerdictStats<Scalar> stats;
    };
    std::vector<PerTest> tests;
    VerdictRule<Scalar> rule;
};

/// Pair each measure with each bump test function and classify the pairing
/// sequence by the scan tail rule.
template <class Scalar>
WeakConvergenceReport<Scalar> weak_convergence_verdict(
    std::span<const MeasureField<Scalar>> measures, std::span<const BumpWeight<Scalar>> tests,
    const VerdictRule<Scalar>& rule = {}) {
    if (measures.empty()) throw InvalidArgument("weak_convergence_verdict: no measures");
    for (const auto& mu : measures)
        if (mu.domain.node_count() != measures.front().domain.node_count())
            throw InvalidArgument("weak_convergence_verdict: measures on different grids");

    WeakConvergenceReport<Scalar> rep;
    rep.rule = rule;
    const auto all = region_all(measures.front().domain);
    for (const auto& phi : tests) {
        typename WeakConvergenceReport<Scalar>::PerTest pt;
        pt.test_desc = phi.describe();
        for (const auto& mu : measures)
            pt.pairings.push_back(integrate_measure<Scalar>(
                mu, all, [&](const PointX<Scalar>& p) { return phi(p); }));
        pt.verdict = classify_sequence(std::span<const Scalar>(pt.pairings), rule, &pt.stats);
        rep.tests.push_back(std::move(pt));
    }
    return rep;
}

template <class Scalar = double>
struct BlockiReport {
    Scalar I = Scalar(0);
    Scalar bound = Scalar(0);
    bool holds = false;
    Scalar quad_abs_error = Scalar(0);
    Scalar quad_rel_error = Scalar(0);
};

/// The reduced one-variable form of int (dd^c chi(u))^2 over
/// Delta_r x Delta_r(w0) for u = -sqrt(log|z| log|w|):
///   I = int_{Delta_r(w0)} 2 pi chi'(-sqrt(log|w| log r))^2 / ((-log|w|) |w|^2) dV2(w),
/// by 2-D adaptive quadrature, against the direct lower-bound formula
///   bound = 4 pi^2 chi'(log r)^2 / (9 (-log r) r^2).
template <class Scalar>
BlockiReport<Scalar> blocki_integral(const ChiWeight<Scalar>& chi, Complex<Scalar> w0, Scalar r,
                                     Scalar rel_tol = Scalar(1e-6)) {
    const Scalar aw0 = std::abs(w0);
    if (!(r > 0) || !(2 * r < std::min(aw0, Scalar(1) - aw0)))
        throw PreconditionError("blocki_integral: need 0 < 2r < min(|w0|, 1 - |w0|)");

    const Scalar log_r = std::log(r);
    auto integrand = [&](Complex<Scalar> w) {
        const Scalar t = std::abs(w);
        const Scalar log_t = std::log(t);
        const Scalar c1 = chi.chi1(-std::sqrt(log_t * log_r));
        return Scalar(2) * Scalar(M_PI) * c1 * c1 / ((-log_t) * t * t);
    };
    const auto q = disc_integral<Scalar>(integrand, w0, r, rel_tol);

    BlockiReport<Scalar> rep;
    rep.I = q.value;
    rep.quad_abs_error = q.abs_error;
    rep.quad_rel_error = q.value != Scalar(0) ? q.abs_error / std::abs(q.value) : Scalar(0);
    const Scalar c1r = chi.chi1(log_r);
    rep.bound = Scalar(4) * Scalar(M_PI) * Scalar(M_PI) * c1r * c1r /
                (Scalar(9) * (-log_r) * r * r);
    const Scalar tol = std::max(q.abs_error, Scalar(1e-9) * std::max(Scalar(1), rep.bound));
    rep.holds = rep.I >= rep.bound - tol;
    return rep;
}

/// Total mass of (dd^c v_j)^2 over the polydisc of radius rho, by the exact
/// radial reduction of the log-shift family.
template <class Scalar>
Scalar cegrell_mass(std::int64_t j, Scalar rho) {
    if (j < 1) throw InvalidArgument("cegrell_mass: index must be >= 1");
    if (!(rho > 0 && rho <= 1)) throw InvalidArgument("cegrell_mass: need 0 < rho <= 1");
    return cegrell_mass_closed_form(Scalar(1) / Scalar(j), rho);
}

}  // namespace pshlab
