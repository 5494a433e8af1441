// special.hpp — a few special values needed by the quadrature correction:
// Riemann zeta off the usual axis, Dirichlet beta, and the square-lattice
// Epstein zeta Z(s) = sum' (m^2+n^2)^(-s/2) = 4 zeta(s/2) beta(s/2).

#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "fraclab/errors.hpp"

namespace fraclab {
namespace detail {

// Cohen-Rodriguez Villegas-Zagier acceleration for alternating series
// sum_{k>=0} (-1)^k a(k); double-precision accurate with ~40 terms.
template <class Fn>
double sumalt(Fn&& a, int n = 44) {
    double d = std::pow(3.0 + std::sqrt(8.0), n);
    d = (d + 1.0 / d) / 2.0;
    double b = -1.0, c = -d, s = 0.0;
    for (int k = 0; k < n; ++k) {
        c = b - c;
        s += c * a(k);
        b = (k + n) * (k - n) * b / ((k + 0.5) * (k + 1.0));
    }
    return s / d;
}

} // namespace detail

// eta(s) = sum (-1)^(n-1) n^(-s), converges (accelerated) for s > 0.
inline double dirichlet_eta(double s) {
    return detail::sumalt([s](int k) { return std::pow(k + 1.0, -s); });
}

// zeta on s < 1 via eta and, below 0, the functional equation.
inline double riemann_zeta(double s) {
    if (s == 1.0) throw InvalidInput("zeta pole at s = 1");
    if (s >= 0.0) return dirichlet_eta(s) / (1.0 - std::pow(2.0, 1.0 - s));
    const double pi = std::numbers::pi;
    return std::pow(2.0, s) * std::pow(pi, s - 1.0) * std::sin(0.5 * pi * s) *
           std::tgamma(1.0 - s) * riemann_zeta(1.0 - s);
}

// beta(s) = sum (-1)^n (2n+1)^(-s).
inline double dirichlet_beta(double s) {
    return detail::sumalt([s](int k) { return std::pow(2.0 * k + 1.0, -s); });
}

// Epstein zeta of the square lattice, analytically continued: the value at
// s in (0,2) weights the second-order Euler-Maclaurin correction in 2-D.
inline double epstein_zeta_z2(double s) {
    return 4.0 * riemann_zeta(0.5 * s) * dirichlet_beta(0.5 * s);
}

// Second-order lattice-sum constant for the punched-hole rectangle rule on
// the kernel |y|^(-d-alpha): the q^2 coefficient of
//   sum'_{p in Z^d} (1 - cos(q.p)) |p|^(-d-alpha)
// is em_lattice_constant * |q|^2 with the opposite sign, so the correction
// enters with a plus.  d=1: -zeta(alpha-1); d=2: -Z(alpha)/4.
inline double em_lattice_constant(int d, double alpha) {
    if (d == 1) return -riemann_zeta(alpha - 1.0);
    if (d == 2) return -0.25 * epstein_zeta_z2(alpha);
    throw DimensionMismatch("em_lattice_constant: d must be 1 or 2");
}

} // namespace fraclab
