#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "pshlab/lab.hpp"
#include "pshlab/measure.hpp"

namespace pshlab {

template <class Scalar = double>
struct ComparisonReport {
    Scalar lhs = Scalar(0);      // int_{u<v} (dd^c v)^q ^ T
    Scalar rhs = Scalar(0);      // int_{u<v} (dd^c u)^q ^ T
    Scalar slack = Scalar(0);    // rhs - lhs
    Scalar tolerance = Scalar(0);
    Scalar boundary_min = Scalar(0);
    bool holds = false;
    bool refused = false;        // boundary precondition violated: no verdict
    std::int64_t region_nodes = 0;
};

template <class Scalar = double>
struct ComparisonOptions {
    Scalar tolerance = Scalar(-1);    // <= 0: use 10 h^2 * total mass of (dd^c u)^q ^ T
    Scalar delta_shift = Scalar(0);   // optional preprocessing: compare u + 2 delta against v
    Scalar boundary_tol = Scalar(1e-9);
    bool prefer_finite_difference = false;
};

namespace detail {

/// Outermost valid node layer: valid nodes with an invalid or out-of-box
/// neighbor within Chebyshev distance 1. The liminf boundary hypothesis is
/// replaced by a min check on this shell.
template <class Scalar>
std::vector<std::int64_t> valid_shell(const GridFunction<Scalar>& f) {
    const auto& d = f.domain;
    std::vector<std::int64_t> shell;
    const int A = d.axes();
    std::array<std::int64_t, 4> idx{}, nb{};
    const std::int64_t total = d.node_count();
    for (std::int64_t i = 0; i < total; ++i) {
        if (!f.valid[i]) continue;
        d.decode(i, std::span<std::int64_t>(idx.data(), A));
        bool boundary = false;
        std::function<void(int)> rec = [&](int axis) {
            if (boundary) return;
            if (axis == A) {
                const std::int64_t lin = d.encode(std::span<const std::int64_t>(nb.data(), A));
                if (!f.valid[lin]) boundary = true;
                return;
            }
            for (int s = -1; s <= 1 && !boundary; ++s) {
                nb[axis] = idx[axis] + s;
                if (nb[axis] < 0 || nb[axis] >= d.counts[axis]) {
                    boundary = true;
                    return;
                }
                rec(axis + 1);
            }
        };
        rec(0);
        if (boundary) shell.push_back(i);
    }
    return shell;
}

}  // namespace detail

/// Current-weighted comparison check over {u < v}: with the shell boundary
/// condition min(u - v) >= 0 verified, reports whether
///   int_{u<v} (dd^c v)^q ^ T  <=  int_{u<v} (dd^c u)^q ^ T
/// within the quadrature tolerance. Supported currents: trivial and omega
/// powers (slice families run through the maximality certificate instead).
template <class Scalar>
ComparisonReport<Scalar> comparison_check(const PshSpec<Scalar>& u, const PshSpec<Scalar>& v,
                                          const CurrentSpec<Scalar>& T, int q,
                                          const GridDomain<Scalar>& omega,
                                          const ComparisonOptions<Scalar>& opt = {}) {
    if (T.kind == CurrentSpec<Scalar>::Kind::Slice)
        throw InvalidArgument("comparison_check: slice currents are not supported here");
    if (T.q != q) throw InvalidArgument("comparison_check: q does not match the current");

    auto fu = sample(u, omega);
    const auto fv = sample(v, omega);

    ComparisonReport<Scalar> rep;
    const auto shell = detail::valid_shell(fu);
    if (shell.empty()) throw PreconditionError("comparison_check: no valid shell (grid too small)");
    Scalar bmin = std::numeric_limits<Scalar>::infinity();
    for (auto i : shell)
        if (fv.valid[i]) bmin = std::min(bmin, fu.values[i] - fv.values[i]);
    rep.boundary_min = bmin;
    if (!(bmin >= -opt.boundary_tol)) {
        rep.refused = true;
        return rep;
    }

    if (opt.delta_shift > Scalar(0)) fu.values += Scalar(2) * opt.delta_shift;

    const auto region = region_less(fu, fv);
    rep.region_nodes = 0;
    for (auto m : region.member) rep.region_nodes += m;

    const bool analytic = u.analytic() && v.analytic() && !opt.prefer_finite_difference;
    const auto Fu = analytic ? sample_complex_hessian(u, omega) : complex_hessian(fu);
    const auto Fv = analytic ? sample_complex_hessian(v, omega) : complex_hessian(fv);
    const auto mu_u = wedge_with_current(Fu, T);
    const auto mu_v = wedge_with_current(Fv, T);

    rep.lhs = integrate_measure(mu_v, region);
    rep.rhs = integrate_measure(mu_u, region);
    rep.slack = rep.rhs - rep.lhs;
    rep.tolerance = opt.tolerance > Scalar(0)
                        ? opt.tolerance
                        : Scalar(10) * omega.h * omega.h * mu_u.total_mass();
    rep.holds = rep.slack >= -rep.tolerance;
    return rep;
}

template <class Scalar = double>
struct CapacityReport {
    struct Candidate {
        std::string desc;
        Scalar mass;
    };
    std::vector<Candidate> candidates;
    Scalar best = Scalar(0);
    std::int64_t k_nodes = 0;
};

/// Lower-bound estimate of the relative capacity
///   C(K, Omega, T) = sup { int_K (dd^c v)^q ^ T : v in PSH(Omega), 0 <= v <= 1 }
/// over a finite candidate family; never claimed as the supremum. Candidates
/// must take values in [0, 1] on Omega (checked to 1e-9).
template <class Scalar>
CapacityReport<Scalar> capacity_estimate(const RegionMask<Scalar>& K,
                                         const GridDomain<Scalar>& omega,
                                         const CurrentSpec<Scalar>& T, int q,
                                         std::span<const PshSpec<Scalar>> candidates,
                                         bool prefer_fd = false) {
    if (T.q != q) throw InvalidArgument("capacity_estimate: q does not match the current");
    CapacityReport<Scalar> rep;
    rep.k_nodes = 0;
    for (auto m : K.member) rep.k_nodes += m;

    for (const auto& v : candidates) {
        const auto fv = sample(v, omega);
        for (std::int64_t i = 0; i < fv.size(); ++i)
            if (fv.valid[i] &&
                (fv.values[i] < -Scalar(1e-9) || fv.values[i] > Scalar(1) + Scalar(1e-9)))
                throw InvalidArgument("capacity_estimate: candidate out of [0, 1]: " + v.describe());
        const auto F = (v.analytic() && !prefer_fd) ? sample_complex_hessian(v, omega)
                                                    : complex_hessian(fv);
        const auto mass = integrate_measure(wedge_with_current(F, T), K);
        rep.candidates.push_back({v.describe(), mass});
        rep.best = std::max(rep.best, mass);
    }
    return rep;
}

template <class Scalar = double>
struct CertificateReport {
    bool satisfied = false;
    bool positivity_ok = false;
    std::int64_t leaves = 0;
    std::int64_t leaves_failing = 0;
    Scalar leaf_omega_mass = Scalar(0);  // int T_c ^ omega per leaf (leaf area times 4)
    Scalar max_last_mass = Scalar(0);
    std::vector<int> j;
    int direction = 0;
    VerdictRule<Scalar> rule;
};

template <class Scalar = double>
struct CertificateOptions {
    VerdictRule<Scalar> rule;
    Scalar smoothing = Scalar(-1);  // cutoff smoothing; negative resolves to 5h
    int stride = 1;                 // leaf lattice stride; only 1 covers full area
};

namespace detail {

/// u with one complex coordinate frozen: a one-variable spec on the leaf.
template <class Scalar>
class RestrictNode final : public PshNode<Scalar> {
public:
    RestrictNode(NodePtr<Scalar> inner, int frozen, Complex<Scalar> c)
        : inner_(std::move(inner)), frozen_(frozen), c_(c) {}
    int dim() const override { return 1; }
    bool analytic() const override { return inner_->analytic(); }
    Scalar eval(const PointX<Scalar>& p) const override { return inner_->eval(lift(p)); }
    void derivs(const PointX<Scalar>& p, Derivs<Scalar>& out) const override {
        Derivs<Scalar> full;
        full.reset(2);
        inner_->derivs(lift(p), full);
        const int keep = 1 - frozen_;
        out.value = full.value;
        out.grad[0] = full.grad[keep];
        out.hess(0, 0) = full.hess(keep, keep);
    }
    Scalar clearance(const PointX<Scalar>& p) const override { return inner_->clearance(lift(p)); }
    void check_box(std::span<const Scalar> lo, std::span<const Scalar> hi) const override {
        std::array<Scalar, 4> l{}, h{};
        const int keep = 1 - frozen_;
        l[2 * frozen_] = h[2 * frozen_] = c_.real();
        l[2 * frozen_ + 1] = h[2 * frozen_ + 1] = c_.imag();
        l[2 * keep] = lo[0];
        h[2 * keep] = hi[0];
        l[2 * keep + 1] = lo[1];
        h[2 * keep + 1] = hi[1];
        inner_->check_box(std::span<const Scalar>(l.data(), 4), std::span<const Scalar>(h.data(), 4));
    }
    std::string describe() const override { return inner_->describe() + " | leaf"; }

private:
    PointX<Scalar> lift(const PointX<Scalar>& p) const {
        PointX<Scalar> q(4);
        q[2 * frozen_] = c_.real();
        q[2 * frozen_ + 1] = c_.imag();
        q[2 * (1 - frozen_)] = p[0];
        q[2 * (1 - frozen_) + 1] = p[1];
        return q;
    }
    NodePtr<Scalar> inner_;
    int frozen_;
    Complex<Scalar> c_;
};

}  // namespace detail

/// Slice-current maximality certificate: for leaves {z_d = c} over the full
/// base lattice of the grid (the lattice proxy for "the complement of the
/// union has zero area"), computes the per-leaf, per-j Laplacian mass
///   int T_c ^ dd^c u_j
/// and reports "hypothesis satisfied" iff every leaf's mass sequence tends
/// to zero under the tail rule. The positivity hypothesis int T_c ^ omega > 0
/// is verified as 4 times the valid leaf area.
template <class Scalar>
CertificateReport<Scalar> maximality_certificate(const PshSpec<Scalar>& u,
                                                 const SequenceScheme<Scalar>& scheme,
                                                 int direction, const GridDomain<Scalar>& omega,
                                                 std::span<const int> j_range,
                                                 const CertificateOptions<Scalar>& opt = {}) {
    if (omega.n != 2) throw InvalidArgument("maximality_certificate: needs n = 2");
    if (direction != 0 && direction != 1)
        throw InvalidArgument("maximality_certificate: direction must be 0 or 1");
    if (opt.stride != 1)
        throw InvalidArgument(
            "maximality_certificate: leaf family with positive-area gaps (stride must be 1)");
    if (j_range.empty()) throw InvalidArgument("maximality_certificate: empty index range");

    const int keep = 1 - direction;
    GridDomain<Scalar> leaf;
    leaf.n = 1;
    leaf.h = omega.h;
    leaf.lo = {omega.lo[2 * keep], omega.lo[2 * keep + 1]};
    leaf.hi = {omega.hi[2 * keep], omega.hi[2 * keep + 1]};
    leaf.counts = {omega.counts[2 * keep], omega.counts[2 * keep + 1]};

    CertificateReport<Scalar> rep;
    rep.direction = direction;
    rep.rule = opt.rule;
    rep.j.assign(j_range.begin(), j_range.end());

    // int T_c ^ omega: 4 * valid leaf area, identical across leaves
    {
        std::array<std::int64_t, 2> idx{};
        std::int64_t valid_nodes = 0;
        for (idx[0] = 0; idx[0] < leaf.counts[0]; ++idx[0])
            for (idx[1] = 0; idx[1] < leaf.counts[1]; ++idx[1])
                if (leaf.geometric_valid(std::span<const std::int64_t>(idx.data(), 2))) ++valid_nodes;
        rep.leaf_omega_mass = Scalar(4) * Scalar(valid_nodes) * leaf.h2n();
        rep.positivity_ok = rep.leaf_omega_mass > Scalar(0);
    }

    SequenceScheme<Scalar> sch = scheme;
    if (sch.kind == SequenceScheme<Scalar>::Kind::MaxCutoff && sch.smoothing < Scalar(0))
        sch.smoothing = opt.smoothing < Scalar(0) ? Scalar(5) * omega.h : opt.smoothing;

    const std::int64_t nbx = omega.counts[2 * direction];
    const std::int64_t nby = omega.counts[2 * direction + 1];
    rep.leaves = nbx * nby;
    const auto all = region_all(leaf);

    std::vector<std::vector<Scalar>> leaf_masses(rep.leaves,
                                                 std::vector<Scalar>(rep.j.size(), Scalar(0)));
    for (std::size_t jj = 0; jj < rep.j.size(); ++jj) {
        const auto member = make_sequence(u, sch, rep.j[jj]);
        for (std::int64_t bx = 0; bx < nbx; ++bx)
            for (std::int64_t by = 0; by < nby; ++by) {
                const Complex<Scalar> c(omega.lo[2 * direction] + omega.h * Scalar(bx),
                                        omega.lo[2 * direction + 1] + omega.h * Scalar(by));
                const PshSpec<Scalar> restricted(
                    std::make_shared<detail::RestrictNode<Scalar>>(member.node(), direction, c), 1);
                const auto f = sample(restricted, leaf);
                const auto F = restricted.analytic() ? sample_complex_hessian(restricted, leaf)
                                                     : complex_hessian(f);
                leaf_masses[bx * nby + by][jj] = integrate_measure(ma_density(F), all);
            }
    }

    rep.satisfied = true;
    for (const auto& masses : leaf_masses) {
        const Verdict v = classify_sequence(std::span<const Scalar>(masses), opt.rule);
        rep.max_last_mass = std::max(rep.max_last_mass, masses.back());
        if (v != Verdict::TendsToZero) {
            rep.satisfied = false;
            ++rep.leaves_failing;
        }
    }
    if (!rep.positivity_ok) rep.satisfied = false;
    return rep;
}

// ---------------------------------------------------------------------------
// Randomized comparison suite
// ---------------------------------------------------------------------------

template <class Scalar = double>
struct RandomSuiteResult {
    std::vector<ComparisonReport<Scalar>> reports;
    std::int64_t rejected = 0;  // draws failing the boundary-margin check
    bool all_hold = true;
};

/// Random (u, v) pairs from the smooth catalog grammar: u is a strongly
/// plurisubharmonic sum of |z - c|^2 and smooth log atoms; v is a flatter
/// competitor lifted to exceed u near the center. Pairs whose shell margin
/// min(u - v) falls below `margin` are rejected and redrawn, so every
/// accepted case satisfies the boundary hypothesis with room to spare.
template <class Scalar>
RandomSuiteResult<Scalar> random_comparison_suite(std::uint64_t seed, int cases,
                                                  const GridDomain<Scalar>& omega,
                                                  const CurrentSpec<Scalar>& T, int q,
                                                  Scalar margin = Scalar(0.05)) {
    using namespace nodes;
    if (omega.n != 2) throw InvalidArgument("random_comparison_suite: needs n = 2");
    Rng rng(seed);
    RandomSuiteResult<Scalar> out;

    auto small_center = [&] {
        return Complex<Scalar>(rng.uniform(-0.25, 0.25), rng.uniform(-0.25, 0.25));
    };

    for (int k = 0; k < cases;) {
        std::vector<std::pair<Scalar, NodePtr<Scalar>>> ut;
        for (int j = 0; j < 2; ++j)
            ut.emplace_back(Scalar(rng.uniform(0.6, 1.8)),
                            std::make_shared<AbsSq<Scalar>>(j, small_center()));
        for (int j = 0; j < 2; ++j)
            if (rng.uniform01() < 0.5)
                ut.emplace_back(Scalar(rng.uniform(0.2, 1.0)),
                                std::make_shared<ShiftedLog<Scalar>>(j, small_center(),
                                                                     Scalar(rng.uniform(0.3, 1.0))));
        PshSpec<Scalar> u(std::make_shared<Sum<Scalar>>(std::move(ut)), 2, "random-u");

        std::vector<std::pair<Scalar, NodePtr<Scalar>>> vt;
        for (int j = 0; j < 2; ++j)
            vt.emplace_back(Scalar(rng.uniform(0.0, 0.3)),
                            std::make_shared<AbsSq<Scalar>>(j, small_center()));
        vt.emplace_back(Scalar(1),
                        std::make_shared<RealLinear<Scalar>>(
                            std::vector<Complex<Scalar>>{
                                Complex<Scalar>(rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3)),
                                Complex<Scalar>(rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3))},
                            Scalar(0)));
        // lift v above u at the center so {u < v} is typically nonempty
        PointX<Scalar> center(4);
        for (int a = 0; a < 4; ++a) center[a] = (omega.lo[a] + omega.hi[a]) / 2;
        PshSpec<Scalar> v0(std::make_shared<Sum<Scalar>>(std::move(vt)), 2, "random-v");
        const Scalar lift =
            u.eval_raw(center) - v0.eval_raw(center) + Scalar(rng.uniform(0.1, 0.8));
        std::vector<std::pair<Scalar, NodePtr<Scalar>>> vshift;
        vshift.emplace_back(Scalar(1), v0.node());
        vshift.emplace_back(Scalar(1), std::make_shared<Const<Scalar>>(lift));
        PshSpec<Scalar> v(std::make_shared<Sum<Scalar>>(std::move(vshift)), 2, "random-v");

        ComparisonOptions<Scalar> copt;
        copt.boundary_tol = -margin;  // require min(u - v) >= margin on the shell
        auto rep = comparison_check(u, v, T, q, omega, copt);
        if (rep.refused) {
            ++out.rejected;
            if (out.rejected > 2000)
                throw PreconditionError("random_comparison_suite: rejection sampling stalled");
            continue;
        }
        out.all_hold = out.all_hold && rep.holds;
        out.reports.push_back(rep);
        ++k;
    }
    return out;
}

}  // namespace pshlab
