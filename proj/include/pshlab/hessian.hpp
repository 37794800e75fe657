#pragma once

#include <cmath>
#include <functional>

#include "pshlab/catalog.hpp"
#include "pshlab/grid.hpp"

namespace pshlab {

enum class Provenance { FiniteDifference, Analytic, ClosedForm };

inline const char* to_string(Provenance p) {
    switch (p) {
        case Provenance::FiniteDifference: return "finite-difference";
        case Provenance::Analytic: return "analytic";
        case Provenance::ClosedForm: return "closed-form";
    }
    return "?";
}

/// Per-node complex gradient du/dz_j and Hermitian mixed Hessian
/// d^2u/dz_j dz_k-bar, stored as structure-of-arrays. Diagonal entries are
/// real by construction; h21 is the conjugate of h12 and is not stored.
template <class Scalar = double>
struct ComplexHessianField {
    GridDomain<Scalar> domain;
    Provenance provenance = Provenance::FiniteDifference;

    Eigen::Array<Scalar, Eigen::Dynamic, 1> h11, h22;
    Eigen::Array<Complex<Scalar>, Eigen::Dynamic, 1> h12;
    Eigen::Array<Complex<Scalar>, Eigen::Dynamic, 1> g1, g2;
    std::vector<std::uint8_t> valid;

    std::int64_t size() const { return domain.node_count(); }

    Scalar det(std::int64_t i) const {
        if (domain.n == 1) return h11[i];
        return h11[i] * h22[i] - std::norm(h12[i]);
    }
    Scalar trace(std::int64_t i) const { return domain.n == 1 ? h11[i] : h11[i] + h22[i]; }

    Scalar min_eigenvalue(std::int64_t i) const {
        if (domain.n == 1) return h11[i];
        const Scalar mid = (h11[i] + h22[i]) / Scalar(2);
        const Scalar off = (h11[i] - h22[i]) / Scalar(2);
        return mid - std::sqrt(off * off + std::norm(h12[i]));
    }

    Eigen::Matrix<Complex<Scalar>, 2, 2> matrix(std::int64_t i) const {
        Eigen::Matrix<Complex<Scalar>, 2, 2> H = Eigen::Matrix<Complex<Scalar>, 2, 2>::Zero();
        H(0, 0) = h11[i];
        if (domain.n == 2) {
            H(1, 1) = h22[i];
            H(0, 1) = h12[i];
            H(1, 0) = std::conj(h12[i]);
        }
        return H;
    }

    static ComplexHessianField empty_like(const GridDomain<Scalar>& d, Provenance prov) {
        ComplexHessianField F;
        F.domain = d;
        F.provenance = prov;
        const auto n = d.node_count();
        F.h11.setZero(n);
        F.g1.setZero(n);
        if (d.n == 2) {
            F.h22.setZero(n);
            F.h12.setZero(n);
            F.g2.setZero(n);
        }
        F.valid.assign(n, 0);
        return F;
    }
};

/// Centered second differences on the lattice:
///   d^2/dz_j dz_k-bar = (Dxjxk + Dyjyk)/4 + i (Dxjyk - Dyjxk)/4,
///   d/dz_j = (Dxj - i Dyj)/2.
/// Exact for quadratics, O(h^2) on C^4 inputs. Nodes inherit the sampled
/// function's conservative validity mask, which guarantees finite stencils.
template <class Scalar>
ComplexHessianField<Scalar> complex_hessian(const GridFunction<Scalar>& f) {
    const auto& d = f.domain;
    auto F = ComplexHessianField<Scalar>::empty_like(d, Provenance::FiniteDifference);

    const Scalar inv2h = Scalar(1) / (2 * d.h);
    const Scalar invh2 = Scalar(1) / (d.h * d.h);
    const Scalar inv4h2 = invh2 / 4;

    std::array<std::int64_t, 4> strides{};
    for (int a = 0; a < d.axes(); ++a) strides[a] = d.stride(a);

    const std::int64_t total = d.node_count();
    parallel_for(static_cast<std::size_t>(total), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t ii = lo; ii < hi; ++ii) {
            const auto i = static_cast<std::int64_t>(ii);
            if (!f.valid[i]) continue;
            const auto& v = f.values;

            auto d1 = [&](int a) { return (v[i + strides[a]] - v[i - strides[a]]) * inv2h; };
            auto d2 = [&](int a) { return (v[i + strides[a]] - 2 * v[i] + v[i - strides[a]]) * invh2; };
            auto dm = [&](int a, int b) {
                return (v[i + strides[a] + strides[b]] + v[i - strides[a] - strides[b]] -
                        v[i + strides[a] - strides[b]] - v[i - strides[a] + strides[b]]) *
                       inv4h2;
            };

            F.g1[i] = Complex<Scalar>(d1(0), -d1(1)) * Scalar(0.5);
            F.h11[i] = (d2(0) + d2(1)) / 4;
            if (d.n == 2) {
                F.g2[i] = Complex<Scalar>(d1(2), -d1(3)) * Scalar(0.5);
                F.h22[i] = (d2(2) + d2(3)) / 4;
                F.h12[i] = Complex<Scalar>((dm(0, 2) + dm(1, 3)) / 4, (dm(0, 3) - dm(1, 2)) / 4);
            }
            F.valid[i] = 1;
        }
    });
    return F;
}

/// Exact derivative field sampled from a closed-form spec.
template <class Scalar>
ComplexHessianField<Scalar> sample_complex_hessian(const PshSpec<Scalar>& spec,
                                                   const GridDomain<Scalar>& d) {
    if (!spec.analytic())
        throw PreconditionError("sample_complex_hessian: spec is finite-difference only");
    if (spec.dim() != d.n) throw InvalidArgument("sample_complex_hessian: dimension mismatch");
    spec.node()->check_box(std::span<const Scalar>(d.lo), std::span<const Scalar>(d.hi));

    auto F = ComplexHessianField<Scalar>::empty_like(d, Provenance::Analytic);
    const Scalar margin = d.stencil_radius();

    const std::int64_t total = d.node_count();
    parallel_for(static_cast<std::size_t>(total), [&](std::size_t lo, std::size_t hi) {
        std::array<std::int64_t, 4> idx{};
        Derivs<Scalar> der;
        for (std::size_t ii = lo; ii < hi; ++ii) {
            const auto i = static_cast<std::int64_t>(ii);
            d.decode(i, std::span<std::int64_t>(idx.data(), d.axes()));
            if (!d.geometric_valid(std::span<const std::int64_t>(idx.data(), d.axes()))) continue;
            const PointX<Scalar> p = d.point(std::span<const std::int64_t>(idx.data(), d.axes()));
            if (!(spec.clearance(p) >= margin)) continue;
            der.reset(d.n);
            spec.node()->derivs(p, der);
            if (!std::isfinite(der.value)) continue;
            F.g1[i] = der.grad[0];
            F.h11[i] = der.hess(0, 0).real();
            if (d.n == 2) {
                F.g2[i] = der.grad[1];
                F.h22[i] = der.hess(1, 1).real();
                F.h12[i] = der.hess(0, 1);
            }
            F.valid[i] = 1;
        }
    });
    return F;
}

/// Finite-difference derivatives of an arbitrary evaluator at a single point
/// (local stencil, no grid). Used for cross-checks of analytic derivatives
/// and for pointwise density comparisons.
template <class Scalar>
Derivs<Scalar> fd_derivs_at(const std::function<Scalar(const PointX<Scalar>&)>& fn,
                            const PointX<Scalar>& p, int n, Scalar h) {
    const int A = 2 * n;
    auto at = [&](int a, int da, int b, int db) {
        PointX<Scalar> q = p;
        q[a] += da * h;
        if (b >= 0) q[b] += db * h;
        return fn(q);
    };
    const Scalar f0 = fn(p);
    Derivs<Scalar> out;
    out.reset(n);
    out.value = f0;

    std::array<Scalar, 4> d1{}, d2{};
    for (int a = 0; a < A; ++a) {
        const Scalar fp = at(a, 1, -1, 0), fm = at(a, -1, -1, 0);
        d1[a] = (fp - fm) / (2 * h);
        d2[a] = (fp - 2 * f0 + fm) / (h * h);
    }
    auto dm = [&](int a, int b) {
        return (at(a, 1, b, 1) + at(a, -1, b, -1) - at(a, 1, b, -1) - at(a, -1, b, 1)) /
               (4 * h * h);
    };

    for (int j = 0; j < n; ++j) {
        out.grad[j] = Complex<Scalar>(d1[2 * j], -d1[2 * j + 1]) * Scalar(0.5);
        out.hess(j, j) = Complex<Scalar>((d2[2 * j] + d2[2 * j + 1]) / 4, 0);
    }
    if (n == 2) {
        out.hess(0, 1) =
            Complex<Scalar>((dm(0, 2) + dm(1, 3)) / 4, (dm(0, 3) - dm(1, 2)) / 4);
        out.hess(1, 0) = std::conj(out.hess(0, 1));
    }
    return out;
}

}  // namespace pshlab
