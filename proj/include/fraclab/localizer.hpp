// localizer.hpp — the localizer family behind the small-shocks stability
// argument: F and its inverse, the constant q, the ramped modulus
//   Psi'(y) = ramp_l(y) * q / (y (1 + log(1 + q/y))),  Psi = int_0^y Psi',
// and the weight Phi(h) = exp(-Psi(|h|)) applied to squared increments.
//
// Construction guarantees F(Psi') <= q/y at every y: the unramped profile
// saturates the ODE inequality exactly and the ramp only scales it down.

#pragma once

#include <cmath>
#include <vector>

#include "fraclab/errors.hpp"
#include "fraclab/io.hpp"

namespace fraclab {

// F(p) = p (1 + log(1+p)); strictly increasing, F(p) >= p.
inline double localizer_F(double p) {
    if (p < 0.0) throw InvalidInput("F defined for p >= 0");
    return p * (1.0 + std::log1p(p));
}

// Inverse of F: one convex-Newton pass from the lower sandwich bound
// x/(1 + log(1+x)) <= F^{-1}(x) <= x.
inline double localizer_F_inverse(double x) {
    if (x < 0.0) throw InvalidInput("F inverse defined for x >= 0");
    if (x == 0.0) return 0.0;
    double y = x / (1.0 + std::log1p(x));
    for (int it = 0; it < 60; ++it) {
        const double f = localizer_F(y) - x;
        const double fp = 1.0 + std::log1p(y) + y / (1.0 + y);
        const double step = f / fp;
        y -= step;
        if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(y))) break;
    }
    return y;
}

// q = delta0 c7 ||theta0||_inf / (4 Cmax).
inline double compute_q(double delta0, double linf_norm, double c7, double cmax) {
    if (!(delta0 > 0.0 && linf_norm > 0.0 && c7 > 0.0 && cmax > 0.0))
        throw InvalidInput("compute_q needs positive inputs");
    return delta0 * c7 * linf_norm / (4.0 * cmax);
}

// Elementary inequality C b log a <= a/2 + C b log(2 C b); returns the margin.
inline double verify_log_inequality(double C, double a, double b) {
    if (!(C > 0.0 && a > 0.0 && b > 0.0)) throw InvalidInput("positive inputs required");
    return a / 2.0 + C * b * std::log(2.0 * C * b) - C * b * std::log(a);
}

namespace detail {

// Cosine ramp: 0 below l/2, 1 above l.
inline double ramp(double y, double l) {
    if (y <= 0.5 * l) return 0.0;
    if (y >= l) return 1.0;
    return 0.5 * (1.0 - std::cos(std::numbers::pi * (y - 0.5 * l) / (0.5 * l)));
}

template <class F>
double adaptive_simpson(F&& f, double a, double b, double fa, double fb, double fm, double tol,
                        int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, fa, fm, flm, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, fb, frm, 0.5 * tol, depth - 1);
}

template <class F>
double integrate(F&& f, double a, double b, double tol = 1e-10) {
    if (b <= a) return 0.0;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    return adaptive_simpson(f, a, b, fa, fb, fm, tol, 40);
}

} // namespace detail

struct LocalizerPsi {
    double q = 0.0;
    double l = 0.0;
    std::vector<double> y;         // log-spaced samples on [l/4, y_max]
    std::vector<double> psi_prime; // Psi' at the samples
    std::vector<double> psi;       // cumulative integral at the samples

    // Psi'(y) = ramp(y) q / (y (1 + log(1 + q/y))); analytic everywhere.
    double psi_prime_at(double yy) const {
        if (!(yy > 0.0)) return 0.0;
        const double r = detail::ramp(yy, l);
        if (r == 0.0 || q == 0.0) return 0.0;
        return r * q / (yy * (1.0 + std::log1p(q / yy)));
    }

    // Cumulative value at the nearest stored sample below, completed by a
    // quadrature over the partial panel; keeps the chain-rule bound
    // |Phi'|/Phi <= Psi' intact between samples.  Exact 0 at and below l/2.
    double psi_at(double yy) const {
        if (yy <= 0.5 * l || q == 0.0) return 0.0;
        if (yy > y.back() * (1.0 + 1e-12))
            throw InvalidRange("psi evaluated beyond y_max");
        const auto it = std::upper_bound(y.begin(), y.end(), yy);
        if (it == y.begin()) return 0.0; // inside the dead zone below the first sample
        const std::size_t lo = (it - y.begin()) - 1;
        const double from = std::max(y[lo], 0.5 * l);
        if (yy <= from) return psi[lo];
        return psi[lo] +
               detail::integrate([this](double t) { return psi_prime_at(t); }, from, yy);
    }

    double phi(double h) const { return std::exp(-psi_at(std::abs(h))); }
};

inline LocalizerPsi build_localizer(double q, double l, double y_max, int samples = 256) {
    if (!(q >= 0.0)) throw InvalidInput("q must be non-negative");
    if (!(l > 0.0) || !(l < y_max)) throw InvalidRange("need 0 < l < y_max");
    if (samples < 128) throw InvalidInput("need at least 128 samples");

    LocalizerPsi loc;
    loc.q = q;
    loc.l = l;
    loc.y.resize(samples);
    const double lo = 0.25 * l;
    for (int i = 0; i < samples; ++i)
        loc.y[i] = lo * std::pow(y_max / lo, static_cast<double>(i) / (samples - 1));
    loc.y.back() = y_max;

    loc.psi_prime.resize(samples);
    loc.psi.resize(samples);
    auto integrand = [&](double yy) { return loc.psi_prime_at(yy); };
    double acc = 0.0;
    double prev = 0.5 * l; // Psi vanishes identically below the ramp
    for (int i = 0; i < samples; ++i) {
        loc.psi_prime[i] = loc.psi_prime_at(loc.y[i]);
        if (loc.y[i] > prev) {
            acc += detail::integrate(integrand, prev, loc.y[i]);
            prev = loc.y[i];
        }
        loc.psi[i] = acc;
    }
    return loc;
}

inline void write_localizer_csv(const LocalizerPsi& loc, const std::string& path) {
    CsvWriter csv(path, {"y", "psi_prime", "psi", "phi"});
    for (std::size_t i = 0; i < loc.y.size(); ++i)
        csv.row(loc.y[i], loc.psi_prime[i], loc.psi[i], std::exp(-loc.psi[i]));
}

} // namespace fraclab
