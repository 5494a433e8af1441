// norms.hpp — extrema, Lp norms, finite-scale Holder norms on torus grids.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "fraclab/errors.hpp"
#include "fraclab/grid.hpp"

namespace fraclab {

struct ArgmaxResult {
    std::size_t index = 0; // lowest row-major index attaining max |value|
    double value = 0.0;    // signed sample there
};

// Deterministic tie-break: strict > keeps the first occurrence.
inline ArgmaxResult argmax_abs(const ScalarField& f) {
    if (f.values.empty()) throw InvalidField("empty field");
    ArgmaxResult r{0, f.values[0]};
    double best = std::abs(f.values[0]);
    for (std::size_t i = 1; i < f.values.size(); ++i) {
        const double a = std::abs(f.values[i]);
        if (a > best) {
            best = a;
            r = {i, f.values[i]};
        }
    }
    return r;
}

inline double linf_norm(const ScalarField& f) {
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::abs(v));
    return m;
}

// Quadrature h^d * sum |f|^p, then the p-th root; exact rule on a torus.
inline double lp_norm(const ScalarField& f, double p) {
    if (std::isinf(p)) return linf_norm(f);
    if (!(p >= 1.0)) throw InvalidExponent("p must be >= 1 or infinity");
    double acc = 0.0;
    for (double v : f.values) acc += std::pow(std::abs(v), p);
    const double hd = std::pow(f.spec.spacing(), f.spec.dim);
    return std::pow(hd * acc, 1.0 / p);
}

inline double mean(const ScalarField& f) {
    double acc = 0.0;
    for (double v : f.values) acc += v;
    return acc / static_cast<double>(f.size());
}

namespace detail {

// Offsets are encoded as index vectors p in [0,N)^d; p = 0 excluded by callers.
inline double offset_distance(const GridSpec& spec, int p0, int p1) {
    auto axis = [&](int p) {
        const int m = std::min(p, spec.n - p);
        return m * spec.spacing();
    };
    const double dx = axis(p0);
    const double dy = spec.dim == 2 ? axis(p1) : 0.0;
    return std::sqrt(dx * dx + dy * dy);
}

// max_x |f(x) - f(x - offset)|.
inline double max_increment(const ScalarField& f, int p0, int p1) {
    const int n = f.spec.n;
    double m = 0.0;
    if (f.spec.dim == 1) {
        for (int i = 0; i < n; ++i) {
            const double d = f.at(i) - f.at((i - p0 + n) % n);
            m = std::max(m, std::abs(d));
        }
    } else {
        for (int i = 0; i < n; ++i) {
            const int is = (i - p0 + n) % n;
            const double* row = &f.values[static_cast<std::size_t>(i) * n];
            const double* srow = &f.values[static_cast<std::size_t>(is) * n];
            for (int j = 0; j < n; ++j) {
                const double d = row[j] - srow[(j - p1 + n) % n];
                m = std::max(m, std::abs(d));
            }
        }
    }
    return m;
}

template <class Body>
void for_each_offset(const GridSpec& spec, Body&& body) {
    if (spec.dim == 1) {
        for (int p = 1; p < spec.n; ++p) body(p, 0);
    } else {
        for (int p0 = 0; p0 < spec.n; ++p0)
            for (int p1 = 0; p1 < spec.n; ++p1)
                if (p0 != 0 || p1 != 0) body(p0, p1);
    }
}

} // namespace detail

// ||f||_{C^delta} at finite scale: sup over grid pairs separated by at least
// min_scale of |f(x)-f(y)| / dist^delta (torus distance), plus ||f||_inf.
inline double holder_seminorm(const ScalarField& f, double delta, double min_scale) {
    if (!(delta > 0.0 && delta < 1.0)) throw InvalidDelta("delta must lie in (0,1)");
    const double h = f.spec.spacing();
    if (min_scale < h * (1.0 - 1e-12)) throw ScaleTooFine("min-scale below grid spacing");
    double sup = 0.0;
    detail::for_each_offset(f.spec, [&](int p0, int p1) {
        const double dist = detail::offset_distance(f.spec, p0, p1);
        if (dist < min_scale) return;
        const double inc = detail::max_increment(f, p0, p1);
        sup = std::max(sup, inc / std::pow(dist, delta));
    });
    return sup + linf_norm(f);
}

} // namespace fraclab
