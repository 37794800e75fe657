#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "pshlab/core.hpp"

namespace pshlab {

/// Region removed from a grid domain: a Euclidean ball in R^{2n}, or a
/// coordinate disk {|z_j - c| < radius} (a tube around a coordinate
/// hyperplane, used to keep singular axes out of stencils).
template <class Scalar = double>
struct Exclusion {
    enum class Kind { Ball, CoordDisk };
    Kind kind = Kind::Ball;
    PointX<Scalar> center;       // Ball: point in R^{2n}
    int coord = 0;               // CoordDisk: complex coordinate index
    Complex<Scalar> disk_center = Complex<Scalar>(0, 0);
    Scalar radius = Scalar(0);

    static Exclusion ball(PointX<Scalar> c, Scalar r) {
        Exclusion e;
        e.kind = Kind::Ball;
        e.center = std::move(c);
        e.radius = r;
        return e;
    }
    static Exclusion coord_disk(int j, Complex<Scalar> c, Scalar r) {
        Exclusion e;
        e.kind = Kind::CoordDisk;
        e.coord = j;
        e.disk_center = c;
        e.radius = r;
        return e;
    }

    /// Signed distance from p to the excluded set (negative inside).
    Scalar distance(const PointX<Scalar>& p) const {
        if (kind == Kind::Ball) return (p - center).norm() - radius;
        const Complex<Scalar> z = pshlab::coord(p, coord);
        return std::abs(z - disk_center) - radius;
    }
};

/// Uniform rectangular lattice over a box in C^n (n = 1 or 2), with optional
/// excluded regions. Nodes carry a geometric validity flag: a node is
/// geometrically invalid when it sits within one stencil radius of the box
/// boundary or of an excluded region, so centered stencils and integrals
/// never touch those neighborhoods.
template <class Scalar = double>
class GridDomain {
public:
    GridDomain() = default;

    int n = 1;                                 // complex dimension
    std::vector<Scalar> lo, hi;                // 2n per-axis bounds
    Scalar h = Scalar(0);
    std::vector<Exclusion<Scalar>> excluded;
    std::vector<std::int64_t> counts;          // nodes per axis

    int axes() const { return 2 * n; }

    std::int64_t node_count() const {
        std::int64_t total = 1;
        for (auto c : counts) total *= c;
        return total;
    }

    std::int64_t stride(int axis) const {
        std::int64_t s = 1;
        for (int a = axes() - 1; a > axis; --a) s *= counts[a];
        return s;
    }

    PointX<Scalar> point(std::span<const std::int64_t> idx) const {
        PointX<Scalar> p(axes());
        for (int a = 0; a < axes(); ++a) p[a] = lo[a] + h * static_cast<Scalar>(idx[a]);
        return p;
    }

    void decode(std::int64_t linear, std::span<std::int64_t> idx) const {
        for (int a = axes() - 1; a >= 0; --a) {
            idx[a] = linear % counts[a];
            linear /= counts[a];
        }
    }

    std::int64_t encode(std::span<const std::int64_t> idx) const {
        std::int64_t lin = 0;
        for (int a = 0; a < axes(); ++a) lin = lin * counts[a] + idx[a];
        return lin;
    }

    PointX<Scalar> point(std::int64_t linear) const {
        std::array<std::int64_t, 4> idx{};
        decode(linear, std::span<std::int64_t>(idx.data(), axes()));
        return point(std::span<const std::int64_t>(idx.data(), axes()));
    }

    /// Stencil clearance: centered second differences reach diagonal
    /// neighbors, one node away along every axis.
    Scalar stencil_radius() const { return h * std::sqrt(Scalar(axes())) * Scalar(1.0001); }

    /// True when the node is at least one node away from the box boundary
    /// and one stencil radius away from every excluded region.
    bool geometric_valid(std::span<const std::int64_t> idx) const {
        for (int a = 0; a < axes(); ++a)
            if (idx[a] == 0 || idx[a] == counts[a] - 1) return false;
        if (excluded.empty()) return true;
        const PointX<Scalar> p = point(idx);
        const Scalar margin = stencil_radius();
        for (const auto& e : excluded)
            if (e.distance(p) < margin) return false;
        return true;
    }

    /// Cell volume h^{2n}.
    Scalar h2n() const { return std::pow(h, Scalar(axes())); }
};

template <class Scalar = double>
GridDomain<Scalar> build_grid(int n, std::span<const Scalar> box, Scalar h,
                              std::vector<Exclusion<Scalar>> excluded = {}) {
    if (n != 1 && n != 2) throw InvalidArgument("build_grid: complex dimension must be 1 or 2");
    if (!(h > Scalar(0))) throw InvalidArgument("build_grid: spacing must be positive");
    if (static_cast<int>(box.size()) != 4 * n)
        throw InvalidArgument("build_grid: expected 2n [lo, hi] pairs");

    GridDomain<Scalar> g;
    g.n = n;
    g.h = h;
    g.excluded = std::move(excluded);
    for (int a = 0; a < 2 * n; ++a) {
        const Scalar lo = box[2 * a], hi = box[2 * a + 1];
        if (!(hi > lo)) throw InvalidArgument("build_grid: degenerate box on axis " + std::to_string(a));
        const auto cnt = static_cast<std::int64_t>(std::floor((hi - lo) / h * (1 + 8 * std::numeric_limits<Scalar>::epsilon()))) + 1;
        if (cnt < 5) throw InvalidArgument("build_grid: spacing too coarse (need >= 5 nodes per axis)");
        g.lo.push_back(lo);
        g.hi.push_back(hi);
        g.counts.push_back(cnt);
    }
    return g;
}

template <class Scalar = double>
GridDomain<Scalar> build_grid(int n, std::initializer_list<Scalar> box, Scalar h,
                              std::vector<Exclusion<Scalar>> excluded = {}) {
    return build_grid<Scalar>(n, std::span<const Scalar>(box.begin(), box.size()), h, std::move(excluded));
}

/// Real scalar samples on a grid. Values hold NaN at nodes where the sampled
/// function is not evaluable; the validity mask is conservative (stencil-aware)
/// so every neighbor of a valid node has a finite value.
template <class Scalar = double>
struct GridFunction {
    GridDomain<Scalar> domain;
    Eigen::Array<Scalar, Eigen::Dynamic, 1> values;
    std::vector<std::uint8_t> valid;

    std::int64_t size() const { return domain.node_count(); }

    static GridFunction zeros(const GridDomain<Scalar>& d) {
        GridFunction f;
        f.domain = d;
        f.values = Eigen::Array<Scalar, Eigen::Dynamic, 1>::Zero(d.node_count());
        f.valid.assign(d.node_count(), 1);
        return f;
    }
};

template <class Scalar = double>
struct RegionMask {
    GridDomain<Scalar> domain;
    std::vector<std::uint8_t> member;

    std::int64_t count() const {
        std::int64_t c = 0;
        for (auto m : member) c += m;
        return c;
    }
};

template <class Scalar, class Pred>
RegionMask<Scalar> make_region(const GridDomain<Scalar>& d, Pred&& inside) {
    RegionMask<Scalar> r;
    r.domain = d;
    r.member.assign(d.node_count(), 0);
    const std::int64_t n = d.node_count();
    for (std::int64_t i = 0; i < n; ++i)
        if (inside(d.point(i))) r.member[i] = 1;
    return r;
}

template <class Scalar>
RegionMask<Scalar> region_all(const GridDomain<Scalar>& d) {
    RegionMask<Scalar> r;
    r.domain = d;
    r.member.assign(d.node_count(), 1);
    return r;
}

/// Polydisc {|z_j| < rho for all j} about the origin.
template <class Scalar>
RegionMask<Scalar> region_polydisc(const GridDomain<Scalar>& d, Scalar rho) {
    return make_region(d, [&](const PointX<Scalar>& p) {
        for (int j = 0; j < d.n; ++j)
            if (std::abs(coord(p, j)) > rho) return false;
        return true;
    });
}

/// Euclidean ball {|z| < rho} in C^n.
template <class Scalar>
RegionMask<Scalar> region_ball(const GridDomain<Scalar>& d, Scalar rho) {
    return make_region(d, [&](const PointX<Scalar>& p) { return p.norm() < rho; });
}

/// Strict sublevel region {u < v}; ties within 1e-12 are excluded, matching
/// the strict inequality in the comparison principle. Only nodes valid for
/// both functions are eligible.
template <class Scalar>
RegionMask<Scalar> region_less(const GridFunction<Scalar>& u, const GridFunction<Scalar>& v) {
    RegionMask<Scalar> r;
    r.domain = u.domain;
    const std::int64_t n = u.size();
    r.member.assign(n, 0);
    for (std::int64_t i = 0; i < n; ++i) {
        if (!u.valid[i] || !v.valid[i]) continue;
        const Scalar du = v.values[i] - u.values[i];
        if (du > Scalar(1e-12)) r.member[i] = 1;
    }
    return r;
}

/// Superlevel region {u > level} on valid nodes.
template <class Scalar>
RegionMask<Scalar> region_above(const GridFunction<Scalar>& u, Scalar level) {
    RegionMask<Scalar> r;
    r.domain = u.domain;
    const std::int64_t n = u.size();
    r.member.assign(n, 0);
    for (std::int64_t i = 0; i < n; ++i)
        if (u.valid[i] && u.values[i] > level) r.member[i] = 1;
    return r;
}

template <class Scalar>
RegionMask<Scalar> region_and(const RegionMask<Scalar>& a, const RegionMask<Scalar>& b) {
    RegionMask<Scalar> r;
    r.domain = a.domain;
    r.member.resize(a.member.size());
    for (std::size_t i = 0; i < a.member.size(); ++i) r.member[i] = a.member[i] & b.member[i];
    return r;
}

/// Mollification kernel: the standard bump exp(1/(s^2-1)) on s = |x|/eps < 1,
/// normalized so the discrete weights sum to exactly 1 (constants are then
/// preserved to rounding).
template <class Scalar = double>
struct MollifierSpec {
    Scalar epsilon;
    explicit MollifierSpec(Scalar eps) : epsilon(eps) {}

    static Scalar profile(Scalar s) {
        if (s >= Scalar(1)) return Scalar(0);
        return std::exp(Scalar(1) / (s * s - Scalar(1)));
    }
};

namespace detail {

template <class Scalar>
struct KernelOffsets {
    std::vector<std::array<std::int64_t, 4>> offsets;
    std::vector<Scalar> weights;
};

template <class Scalar>
KernelOffsets<Scalar> build_kernel(const GridDomain<Scalar>& d, Scalar eps) {
    const int A = d.axes();
    const auto reach = static_cast<std::int64_t>(std::floor(eps / d.h));
    KernelOffsets<Scalar> k;
    std::array<std::int64_t, 4> off{};
    std::function<void(int)> rec = [&](int axis) {
        if (axis == A) {
            Scalar r2 = 0;
            for (int a = 0; a < A; ++a) r2 += Scalar(off[a]) * Scalar(off[a]);
            const Scalar s = std::sqrt(r2) * d.h / eps;
            const Scalar w = MollifierSpec<Scalar>::profile(s);
            if (w > Scalar(0)) {
                k.offsets.push_back(off);
                k.weights.push_back(w);
            }
            return;
        }
        for (std::int64_t i = -reach; i <= reach; ++i) {
            off[axis] = i;
            rec(axis + 1);
        }
    };
    rec(0);
    const Scalar total = pairwise_sum(k.weights);
    for (auto& w : k.weights) w /= total;
    return k;
}

}  // namespace detail

/// Discrete convolution with the bump kernel. Output nodes are valid only
/// when the whole epsilon-ball of input nodes is valid.
template <class Scalar>
GridFunction<Scalar> mollify(const GridFunction<Scalar>& f, const MollifierSpec<Scalar>& m) {
    const auto& d = f.domain;
    if (!(m.epsilon >= Scalar(3) * d.h))
        throw PreconditionError("mollify: epsilon below resolution floor (need eps >= 3h)");

    const auto kernel = detail::build_kernel(d, m.epsilon);
    const int A = d.axes();
    GridFunction<Scalar> out;
    out.domain = d;
    out.values.resize(d.node_count());
    out.valid.assign(d.node_count(), 0);

    const std::int64_t total = d.node_count();
    parallel_for(static_cast<std::size_t>(total), [&](std::size_t lo, std::size_t hi) {
        std::array<std::int64_t, 4> idx{}, nb{};
        std::vector<Scalar> terms(kernel.weights.size());
        for (std::size_t i = lo; i < hi; ++i) {
            d.decode(static_cast<std::int64_t>(i), std::span<std::int64_t>(idx.data(), A));
            bool ok = true;
            for (std::size_t kk = 0; kk < kernel.offsets.size() && ok; ++kk) {
                for (int a = 0; a < A; ++a) {
                    nb[a] = idx[a] + kernel.offsets[kk][a];
                    if (nb[a] < 0 || nb[a] >= d.counts[a]) {
                        ok = false;
                        break;
                    }
                }
                if (!ok) break;
                const std::int64_t lin = d.encode(std::span<const std::int64_t>(nb.data(), A));
                if (!f.valid[lin]) {
                    ok = false;
                    break;
                }
                terms[kk] = kernel.weights[kk] * f.values[lin];
            }
            if (ok) {
                out.values[i] = pairwise_sum(std::span<const Scalar>(terms));
                out.valid[i] = 1;
            } else {
                out.values[i] = std::numeric_limits<Scalar>::quiet_NaN();
            }
        }
    });
    return out;
}

}  // namespace pshlab
