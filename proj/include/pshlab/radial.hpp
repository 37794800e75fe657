#pragma once

#include <cmath>

#include "pshlab/core.hpp"

namespace pshlab {

/// Closed-form masses of log-radial functions u = g(log|z|), derived from
/// the convention dd^c = 2i d dbar:
///   n = 1:  mass of dd^c u over {|z| < R}      = 2 pi (g'(log R) - g'(-inf)),
///   n = 2:  mass of (dd^c u)^2 over {|z| < R}  = 4 pi^2 (g'(log R)^2 - g'(-inf)^2),
/// where |z| is the Euclidean norm of C^n. In particular dd^c log|z| carries
/// mass 2 pi on any disc around the origin.
template <class Scalar>
Scalar radial_mass_c1(Scalar gp_at_logR, Scalar gp_at_minus_inf) {
    return Scalar(2) * Scalar(M_PI) * (gp_at_logR - gp_at_minus_inf);
}

template <class Scalar>
Scalar radial_mass_c2(Scalar gp_at_logR, Scalar gp_at_minus_inf) {
    return Scalar(4) * Scalar(M_PI) * Scalar(M_PI) *
           (gp_at_logR * gp_at_logR - gp_at_minus_inf * gp_at_minus_inf);
}

/// Mass of (dd^c v_j)^2 over the polydisc of radius rho for the log-shift
/// family v_j = log(|z1|^2 + 1/j) + log(|z2|^2 + 1/j): the product of two
/// one-variable radial masses 4 pi rho^2/(rho^2 + 1/j), times the wedge
/// cross-term factor 2.
template <class Scalar>
Scalar cegrell_mass_closed_form(Scalar inv_j, Scalar rho) {
    const Scalar one_dim = Scalar(4) * Scalar(M_PI) * rho * rho / (rho * rho + inv_j);
    return Scalar(2) * one_dim * one_dim;
}

/// 1-D radial mass of dd^c g(log|z|) over {|z| < R} by quadrature of the
/// density 4 u_zz = g''(log|z|) / |z|^2 against 2 pi t dt; an independent
/// route to radial_mass_c1 for smooth g (test oracle).
template <class Scalar, class G2>
Scalar radial_mass_c1_quadrature(const G2& g_second, Scalar R, int steps = 200000,
                                 Scalar t_min = Scalar(1e-9)) {
    // integrate g''(log t)/t dt = g''(s) ds on s = log t
    const Scalar s0 = std::log(t_min), s1 = std::log(R);
    const Scalar ds = (s1 - s0) / steps;
    std::vector<Scalar> terms(steps);
    for (int i = 0; i < steps; ++i) {
        const Scalar s = s0 + (Scalar(i) + Scalar(0.5)) * ds;
        terms[i] = g_second(s);
    }
    return Scalar(2) * Scalar(M_PI) * pairwise_sum(std::span<const Scalar>(terms)) * ds;
}

}  // namespace pshlab
