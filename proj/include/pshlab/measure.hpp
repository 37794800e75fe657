#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <sstream>

#include "pshlab/hessian.hpp"

namespace pshlab {

/// Discrete positive measure: an absolutely continuous density per node
/// (mass per unit real 2n-volume) plus optional point atoms. Densities are
/// clipped at zero; the number of nodes whose raw value fell below the
/// negativity tolerance is surfaced, never hidden.
template <class Scalar = double>
struct MeasureField {
    struct Atom {
        PointX<Scalar> location;
        Scalar mass;
    };

    GridDomain<Scalar> domain;
    Eigen::Array<Scalar, Eigen::Dynamic, 1> density;
    std::vector<std::uint8_t> valid;
    std::vector<Atom> atoms;
    Provenance provenance = Provenance::FiniteDifference;
    std::int64_t clipped_nodes = 0;
    Scalar clip_threshold = Scalar(0);

    Scalar total_mass() const {
        std::vector<Scalar> cells;
        cells.reserve(density.size());
        for (std::int64_t i = 0; i < density.size(); ++i)
            if (valid[i]) cells.push_back(density[i]);
        Scalar m = pairwise_sum(cells) * domain.h2n();
        for (const auto& a : atoms) m += a.mass;
        return m;
    }
};

namespace detail {

/// Clip raw densities at zero; count dips below -tol where
/// tol = 1e-6 * max|raw| (discretized PSH data can go slightly negative).
template <class Scalar>
void clip_density(MeasureField<Scalar>& mu, const Eigen::Array<Scalar, Eigen::Dynamic, 1>& raw) {
    Scalar mx = Scalar(0);
    for (std::int64_t i = 0; i < raw.size(); ++i)
        if (mu.valid[i]) mx = std::max(mx, std::abs(raw[i]));
    const Scalar tol = Scalar(1e-6) * mx;
    mu.clip_threshold = tol;
    mu.clipped_nodes = 0;
    mu.density.resize(raw.size());
    for (std::int64_t i = 0; i < raw.size(); ++i) {
        if (!mu.valid[i]) {
            mu.density[i] = Scalar(0);
            continue;
        }
        if (raw[i] < -tol) ++mu.clipped_nodes;
        mu.density[i] = std::max(raw[i], Scalar(0));
    }
}

}  // namespace detail

/// (dd^c u)^n with the convention d^c = i(dbar - d), dd^c = 2i d dbar:
/// density 4^n n! det H per unit real 2n-volume. Calibration:
/// (dd^c(|z1|^2+|z2|^2))^2 = 32 dV4.
template <class Scalar>
MeasureField<Scalar> ma_density(const ComplexHessianField<Scalar>& F) {
    MeasureField<Scalar> mu;
    mu.domain = F.domain;
    mu.valid = F.valid;
    mu.provenance = F.provenance;
    const Scalar c = F.domain.n == 1 ? Scalar(4) : Scalar(32);
    Eigen::Array<Scalar, Eigen::Dynamic, 1> raw(F.size());
    for (std::int64_t i = 0; i < F.size(); ++i) raw[i] = F.valid[i] ? c * F.det(i) : Scalar(0);
    detail::clip_density(mu, raw);
    return mu;
}

/// du ^ d^c u ^ (dd^c u)^{n-1}. For n = 2 the density is
/// 16 (|u_z|^2 u_ww + |u_w|^2 u_zz - 2 Re(u_z conj(u_w) conj(u_zw))) dV4,
/// which reproduces the closed form dV4/(4 sqrt(log|z|log|w|) |z|^2 |w|^2)
/// for u = -sqrt(log|z| log|w|). For n = 1 it is 4 |u_z|^2 dV2.
template <class Scalar>
MeasureField<Scalar> mixed_density(const ComplexHessianField<Scalar>& F) {
    MeasureField<Scalar> mu;
    mu.domain = F.domain;
    mu.valid = F.valid;
    mu.provenance = F.provenance;
    Eigen::Array<Scalar, Eigen::Dynamic, 1> raw(F.size());
    for (std::int64_t i = 0; i < F.size(); ++i) {
        if (!F.valid[i]) {
            raw[i] = Scalar(0);
            continue;
        }
        if (F.domain.n == 1) {
            raw[i] = Scalar(4) * std::norm(F.g1[i]);
        } else {
            const Scalar bracket = std::norm(F.g1[i]) * F.h22[i] + std::norm(F.g2[i]) * F.h11[i] -
                                   2 * (F.g1[i] * std::conj(F.g2[i]) * std::conj(F.h12[i])).real();
            raw[i] = Scalar(16) * bracket;
        }
    }
    detail::clip_density(mu, raw);
    return mu;
}

/// Polarized gradient pairing du ^ d^c v ^ omega (n = 2):
/// density 16 Re(u_z conj(v_z) + u_w conj(v_w)) dV4. Not clipped: the
/// polarized form is signed.
template <class Scalar>
MeasureField<Scalar> gradient_pairing_density(const ComplexHessianField<Scalar>& Fu,
                                              const ComplexHessianField<Scalar>& Fv) {
    if (Fu.domain.n != 2 || Fv.domain.n != 2)
        throw InvalidArgument("gradient_pairing_density: needs n = 2");
    MeasureField<Scalar> mu;
    mu.domain = Fu.domain;
    mu.provenance = Fu.provenance;
    mu.valid.resize(Fu.size());
    mu.density.resize(Fu.size());
    for (std::int64_t i = 0; i < Fu.size(); ++i) {
        mu.valid[i] = Fu.valid[i] && Fv.valid[i];
        mu.density[i] = mu.valid[i]
                            ? Scalar(16) * (Fu.g1[i] * std::conj(Fv.g1[i]) +
                                            Fu.g2[i] * std::conj(Fv.g2[i]))
                                               .real()
                            : Scalar(0);
    }
    return mu;
}

/// (dd^c chi(u))^n assembled from the expansion
/// (chi'(u))^n (dd^c u)^n + n chi''(u) (chi'(u))^{n-1} du ^ d^c u ^ (dd^c u)^{n-1}.
template <class Scalar>
MeasureField<Scalar> chi_pushforward_density(const GridFunction<Scalar>& u,
                                             const ComplexHessianField<Scalar>& F,
                                             const ChiWeight<Scalar>& chi) {
    if (u.size() != F.size()) throw InvalidArgument("chi_pushforward_density: field size mismatch");
    const int n = F.domain.n;
    if (chi.needs_negative())
        for (std::int64_t i = 0; i < u.size(); ++i)
            if (u.valid[i] && F.valid[i] && !(u.values[i] < Scalar(0)))
                throw PreconditionError("chi_pushforward_density: u takes values outside (-inf, 0)");

    const Scalar cma = n == 1 ? Scalar(4) : Scalar(32);
    MeasureField<Scalar> mu;
    mu.domain = F.domain;
    mu.provenance = F.provenance;
    mu.valid.resize(F.size());
    Eigen::Array<Scalar, Eigen::Dynamic, 1> raw(F.size());
    for (std::int64_t i = 0; i < F.size(); ++i) {
        mu.valid[i] = F.valid[i] && u.valid[i];
        if (!mu.valid[i]) {
            raw[i] = Scalar(0);
            continue;
        }
        const Scalar c1 = chi.chi1(u.values[i]), c2 = chi.chi2(u.values[i]);
        const Scalar ma = cma * F.det(i);
        Scalar mixed;
        if (n == 1) {
            mixed = Scalar(4) * std::norm(F.g1[i]);
        } else {
            mixed = Scalar(16) * (std::norm(F.g1[i]) * F.h22[i] + std::norm(F.g2[i]) * F.h11[i] -
                                  2 * (F.g1[i] * std::conj(F.g2[i]) * std::conj(F.h12[i])).real());
        }
        raw[i] = std::pow(c1, Scalar(n)) * ma + Scalar(n) * c2 * std::pow(c1, Scalar(n - 1)) * mixed;
    }
    detail::clip_density(mu, raw);
    return mu;
}

/// Closed positive current T of bidegree (n-q, n-q): the trivial current
/// (q = n), a power of omega = dd^c|z|^2, or a family of coordinate slices.
template <class Scalar = double>
struct CurrentSpec {
    enum class Kind { Trivial, OmegaPower, Slice };
    Kind kind = Kind::Trivial;
    int q = 2;
    int direction = 0;                          // Slice: frozen coordinate
    std::vector<Complex<Scalar>> base_points;   // Slice: leaf base points

    static CurrentSpec trivial(int q) {
        CurrentSpec t;
        t.kind = Kind::Trivial;
        t.q = q;
        return t;
    }
    static CurrentSpec omega_power(int q) {
        CurrentSpec t;
        t.kind = Kind::OmegaPower;
        t.q = q;
        return t;
    }
    static CurrentSpec slice(int direction, std::vector<Complex<Scalar>> bases) {
        CurrentSpec t;
        t.kind = Kind::Slice;
        t.q = 1;
        t.direction = direction;
        t.base_points = std::move(bases);
        return t;
    }

    std::string describe() const {
        std::ostringstream os;
        switch (kind) {
            case Kind::Trivial: os << "trivial(q=" << q << ")"; break;
            case Kind::OmegaPower: os << "omega^(n-q)(q=" << q << ")"; break;
            case Kind::Slice:
                os << "slice(dir=" << direction << "," << base_points.size() << " leaves)";
                break;
        }
        return os.str();
    }
};

/// (dd^c u)^q ^ T. Trivial: the full Monge-Ampere density. Omega powers:
/// 4^n q! (n-q)! sigma_q(H) where sigma_q sums the q x q principal minors
/// (n = 2, q = 1: 16 (u_zz + u_ww), calibrated by (dd^c|z|^2) ^ omega = 32 dV4).
/// Slices: the one-variable Laplacian density on each leaf column, summed
/// over the leaf family onto the complementary plane.
template <class Scalar>
MeasureField<Scalar> wedge_with_current(const ComplexHessianField<Scalar>& F,
                                        const CurrentSpec<Scalar>& T) {
    const int n = F.domain.n;
    using Kind = typename CurrentSpec<Scalar>::Kind;
    switch (T.kind) {
        case Kind::Trivial:
            if (T.q != n) throw InvalidArgument("wedge_with_current: trivial current needs q = n");
            return ma_density(F);
        case Kind::OmegaPower: {
            if (T.q < 1 || T.q > n) throw InvalidArgument("wedge_with_current: need 1 <= q <= n");
            if (T.q == n) return ma_density(F);
            // remaining case: n = 2, q = 1
            MeasureField<Scalar> mu;
            mu.domain = F.domain;
            mu.valid = F.valid;
            mu.provenance = F.provenance;
            Eigen::Array<Scalar, Eigen::Dynamic, 1> raw(F.size());
            for (std::int64_t i = 0; i < F.size(); ++i)
                raw[i] = F.valid[i] ? Scalar(16) * F.trace(i) : Scalar(0);
            detail::clip_density(mu, raw);
            return mu;
        }
        case Kind::Slice: {
            if (n != 2 || T.q != 1)
                throw InvalidArgument("wedge_with_current: slice currents need n = 2, q = 1");
            // 2-D output domain: the complementary coordinate plane.
            const int d = T.direction;
            const int keep = 1 - d;
            GridDomain<Scalar> plane;
            plane.n = 1;
            plane.h = F.domain.h;
            plane.lo = {F.domain.lo[2 * keep], F.domain.lo[2 * keep + 1]};
            plane.hi = {F.domain.hi[2 * keep], F.domain.hi[2 * keep + 1]};
            plane.counts = {F.domain.counts[2 * keep], F.domain.counts[2 * keep + 1]};

            MeasureField<Scalar> mu;
            mu.domain = plane;
            mu.provenance = F.provenance;
            mu.valid.assign(plane.node_count(), 1);
            Eigen::Array<Scalar, Eigen::Dynamic, 1> raw =
                Eigen::Array<Scalar, Eigen::Dynamic, 1>::Zero(plane.node_count());

            std::array<std::int64_t, 4> idx{};
            for (const auto& c : T.base_points) {
                // snap the base point to the nearest lattice column
                const std::int64_t ix = static_cast<std::int64_t>(
                    std::llround((c.real() - F.domain.lo[2 * d]) / F.domain.h));
                const std::int64_t iy = static_cast<std::int64_t>(
                    std::llround((c.imag() - F.domain.lo[2 * d + 1]) / F.domain.h));
                if (ix < 0 || ix >= F.domain.counts[2 * d] || iy < 0 ||
                    iy >= F.domain.counts[2 * d + 1])
                    throw InvalidArgument("wedge_with_current: slice base point outside grid");
                for (std::int64_t a = 0; a < plane.counts[0]; ++a)
                    for (std::int64_t b = 0; b < plane.counts[1]; ++b) {
                        idx[2 * d] = ix;
                        idx[2 * d + 1] = iy;
                        idx[2 * keep] = a;
                        idx[2 * keep + 1] = b;
                        const std::int64_t lin =
                            F.domain.encode(std::span<const std::int64_t>(idx.data(), 4));
                        const std::int64_t plin = a * plane.counts[1] + b;
                        if (!F.valid[lin]) {
                            mu.valid[plin] = 0;
                            continue;
                        }
                        raw[plin] += Scalar(4) * (d == 0 ? F.h22[lin] : F.h11[lin]);
                    }
            }
            detail::clip_density(mu, raw);
            return mu;
        }
    }
    throw InvalidArgument("wedge_with_current: unsupported current");
}

/// Riemann sum of weight d(mu) over the masked valid nodes (cell volume
/// h^{2n}) plus weighted atoms, with deterministic pairwise summation.
template <class Scalar>
Scalar integrate_measure(const MeasureField<Scalar>& mu, const RegionMask<Scalar>& region,
                         const std::function<Scalar(const PointX<Scalar>&)>& weight) {
    if (region.domain.node_count() != mu.domain.node_count())
        throw InvalidArgument("integrate_measure: region grid mismatch");
    std::vector<Scalar> cells;
    cells.reserve(mu.density.size());
    for (std::int64_t i = 0; i < mu.density.size(); ++i) {
        if (!mu.valid[i] || !region.member[i]) continue;
        if (mu.density[i] == Scalar(0)) continue;
        const Scalar w = weight(mu.domain.point(i));
        if (!std::isfinite(w))
            throw PreconditionError("integrate_measure: weight not evaluable at a node with mass");
        cells.push_back(mu.density[i] * w);
    }
    Scalar total = pairwise_sum(cells) * mu.domain.h2n();
    for (const auto& a : mu.atoms) {
        const Scalar w = weight(a.location);
        if (!std::isfinite(w))
            throw PreconditionError("integrate_measure: weight not evaluable at an atom");
        total += a.mass * w;
    }
    return total;
}

template <class Scalar>
Scalar integrate_measure(const MeasureField<Scalar>& mu, const RegionMask<Scalar>& region) {
    return integrate_measure<Scalar>(mu, region, [](const PointX<Scalar>&) { return Scalar(1); });
}

/// Nodal-weight overload for weights only known on the grid (e.g. sampled
/// sequence members).
template <class Scalar>
Scalar integrate_measure_nodal(const MeasureField<Scalar>& mu, const RegionMask<Scalar>& region,
                               std::span<const Scalar> node_weight) {
    if (static_cast<std::int64_t>(node_weight.size()) != mu.density.size())
        throw InvalidArgument("integrate_measure_nodal: weight array mismatch");
    std::vector<Scalar> cells;
    cells.reserve(mu.density.size());
    for (std::int64_t i = 0; i < mu.density.size(); ++i) {
        if (!mu.valid[i] || !region.member[i] || mu.density[i] == Scalar(0)) continue;
        if (!std::isfinite(node_weight[i]))
            throw PreconditionError("integrate_measure_nodal: weight not evaluable at a node with mass");
        cells.push_back(mu.density[i] * node_weight[i]);
    }
    return pairwise_sum(cells) * mu.domain.h2n();
}

/// Exact density of (dd^c chi(u))^2 for u = -sqrt(log|z| log|w|):
/// chi'(u) chi''(u) / (2 sqrt(log|z| log|w|) |z|^2 |w|^2).
template <class Scalar>
Scalar closed_form_blocki_density(const ChiWeight<Scalar>& chi, Complex<Scalar> z,
                                  Complex<Scalar> w) {
    const Scalar az = std::abs(z), aw = std::abs(w);
    if (!(az > 0 && az < 1 && aw > 0 && aw < 1))
        throw PreconditionError("closed_form_blocki_density: point outside the punctured bidisc");
    const Scalar prod = std::log(az) * std::log(aw);
    const Scalar u = -std::sqrt(prod);
    return chi.chi1(u) * chi.chi2(u) /
           (Scalar(2) * std::sqrt(prod) * az * az * aw * aw);
}

}  // namespace pshlab
