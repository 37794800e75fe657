#pragma once

#include <cmath>
#include <functional>

#include "pshlab/core.hpp"

namespace pshlab {

template <class Scalar = double>
struct QuadResult {
    Scalar value = Scalar(0);
    Scalar abs_error = Scalar(0);
};

namespace detail {

template <class Scalar, class F>
QuadResult<Scalar> simpson_rec(const F& f, Scalar a, Scalar b, Scalar fa, Scalar fm, Scalar fb,
                               Scalar whole, Scalar tol, int depth) {
    const Scalar m = (a + b) / 2;
    const Scalar lm = (a + m) / 2, rm = (m + b) / 2;
    const Scalar flm = f(lm), frm = f(rm);
    const Scalar left = (m - a) / 6 * (fa + 4 * flm + fm);
    const Scalar right = (b - m) / 6 * (fm + 4 * frm + fb);
    const Scalar delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15 * tol)
        return {left + right + delta / 15, std::abs(delta) / 15};
    auto l = simpson_rec(f, a, m, fa, flm, fm, left, tol / 2, depth - 1);
    auto r = simpson_rec(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
    return {l.value + r.value, l.abs_error + r.abs_error};
}

}  // namespace detail

/// Adaptive Simpson on [a, b] with an absolute tolerance target.
template <class Scalar, class F>
QuadResult<Scalar> adaptive_simpson(const F& f, Scalar a, Scalar b, Scalar tol,
                                    int max_depth = 40) {
    const Scalar fa = f(a), fb = f(b), fm = f((a + b) / 2);
    const Scalar whole = (b - a) / 6 * (fa + 4 * fm + fb);
    return detail::simpson_rec<Scalar>(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

/// Trapezoid rule over one period [0, 2pi) with interval doubling until the
/// relative change drops below tol (spectral accuracy for smooth periodic
/// integrands).
template <class Scalar, class F>
QuadResult<Scalar> periodic_trapezoid(const F& f, Scalar tol, int max_doublings = 14) {
    const Scalar two_pi = Scalar(2) * Scalar(M_PI);
    int n = 16;
    auto value_at = [&](int k) {
        std::vector<Scalar> terms(k);
        for (int i = 0; i < k; ++i) terms[i] = f(two_pi * Scalar(i) / Scalar(k));
        return pairwise_sum(std::span<const Scalar>(terms)) * two_pi / Scalar(k);
    };
    Scalar prev = value_at(n);
    for (int d = 0; d < max_doublings; ++d) {
        n *= 2;
        const Scalar cur = value_at(n);
        const Scalar err = std::abs(cur - prev);
        if (err <= tol * std::max(Scalar(1), std::abs(cur))) return {cur, err};
        prev = cur;
    }
    return {prev, std::abs(prev) * tol * 10};
}

/// 2-D adaptive quadrature of f over the disc |p - center| < r, in polar
/// coordinates about the center (adaptive in radius, spectral in angle).
template <class Scalar, class F>
QuadResult<Scalar> disc_integral(const F& f, Complex<Scalar> center, Scalar r, Scalar rel_tol) {
    Scalar err_angle = Scalar(0);
    auto ring = [&](Scalar rho) {
        if (rho == Scalar(0)) return Scalar(0);
        auto g = [&](Scalar theta) {
            const Complex<Scalar> p = center + std::polar(rho, theta);
            return f(p);
        };
        auto q = periodic_trapezoid<Scalar>(g, rel_tol / 4);
        err_angle = std::max(err_angle, q.abs_error * rho);
        return q.value * rho;
    };
    // scale the absolute target by a one-shot magnitude probe
    const Scalar probe = std::abs(ring(r / 2)) * r + Scalar(1e-30);
    auto q = adaptive_simpson<Scalar>(ring, Scalar(0), r, rel_tol * probe);
    return {q.value, q.abs_error + err_angle * r};
}

}  // namespace pshlab
