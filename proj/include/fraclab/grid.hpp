// grid.hpp — uniform periodic grids and sampled fields.
//
// Conventions used throughout the library:
//   * the box is [-L/2, L/2)^d with L = spec.box (default 2*pi), grid point
//     x_i = -L/2 + i*h per axis, h = L/N;
//   * fields are stored row-major, axis 0 slowest (index = i0*N + i1 in 2-D);
//   * d is 1 or 2 and N is a power of two >= 16.

#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numbers>
#include <string>
#include <type_traits>
#include <vector>

#include "fraclab/errors.hpp"

namespace fraclab {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

struct GridSpec {
    int dim = 1;
    int n = 16;
    double box = two_pi;

    GridSpec() = default;
    GridSpec(int d, int points, double length = two_pi) : dim(d), n(points), box(length) {
        validate();
    }

    void validate() const {
        if (dim != 1 && dim != 2)
            throw InvalidGrid("dimension must be 1 or 2, got " + std::to_string(dim));
        if (n < 16 || (n & (n - 1)) != 0)
            throw InvalidGrid("points-per-axis must be a power of two >= 16, got " + std::to_string(n));
        if (!(box > 0.0) || !std::isfinite(box))
            throw InvalidGrid("box length must be positive and finite");
    }

    double spacing() const { return box / n; }
    std::size_t size() const { return dim == 1 ? static_cast<std::size_t>(n)
                                               : static_cast<std::size_t>(n) * n; }
    // Largest torus distance between two points.
    double diameter() const { return 0.5 * box * std::sqrt(static_cast<double>(dim)); }

    double coord(int i) const { return -0.5 * box + spacing() * i; }

    bool operator==(const GridSpec& o) const {
        return dim == o.dim && n == o.n && box == o.box;
    }
    bool operator!=(const GridSpec& o) const { return !(*this == o); }
};

struct ScalarField {
    GridSpec spec;
    std::vector<double> values;

    ScalarField() = default;
    explicit ScalarField(const GridSpec& s, double fill = 0.0)
        : spec(s), values(s.size(), fill) {}

    std::size_t size() const { return values.size(); }
    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }

    std::size_t index(int i0, int i1 = 0) const {
        return spec.dim == 1 ? static_cast<std::size_t>(i0)
                             : static_cast<std::size_t>(i0) * spec.n + i1;
    }
    double& at(int i0, int i1 = 0) { return values[index(i0, i1)]; }
    double at(int i0, int i1 = 0) const { return values[index(i0, i1)]; }

    // Row-major index -> per-axis indices.
    std::array<int, 2> unravel(std::size_t flat) const {
        if (spec.dim == 1) return {static_cast<int>(flat), 0};
        return {static_cast<int>(flat / spec.n), static_cast<int>(flat % spec.n)};
    }
    std::array<double, 2> location(std::size_t flat) const {
        auto ij = unravel(flat);
        return {spec.coord(ij[0]), spec.dim == 2 ? spec.coord(ij[1]) : 0.0};
    }

    void require_finite() const {
        for (double v : values)
            if (!std::isfinite(v)) throw InvalidField("non-finite sample");
    }
    bool all_finite() const {
        for (double v : values)
            if (!std::isfinite(v)) return false;
        return true;
    }
};

struct VectorField {
    std::vector<ScalarField> comp;

    VectorField() = default;
    explicit VectorField(const GridSpec& s) : comp(s.dim, ScalarField(s)) {}

    const GridSpec& spec() const { return comp.at(0).spec; }
    int dim() const { return static_cast<int>(comp.size()); }

    void require_consistent() const {
        if (comp.empty()) throw SpecMismatch("empty vector field");
        for (const auto& c : comp)
            if (c.spec != comp[0].spec) throw SpecMismatch("components on different grids");
        if (static_cast<int>(comp.size()) != comp[0].spec.dim)
            throw SpecMismatch("component count does not match dimension");
    }
};

// Fill from a callable of physical coordinates: f(x) in 1-D, f(x,y) in 2-D.
template <class F>
ScalarField sample(const GridSpec& spec, F&& f) {
    ScalarField out(spec);
    if constexpr (std::is_invocable_v<F, double>) {
        if (spec.dim != 1) throw DimensionMismatch("1-D sampler on a 2-D grid");
        for (int i = 0; i < spec.n; ++i) out.at(i) = f(spec.coord(i));
    } else {
        if (spec.dim != 2) throw DimensionMismatch("2-D sampler on a 1-D grid");
        for (int i = 0; i < spec.n; ++i)
            for (int j = 0; j < spec.n; ++j) out.at(i, j) = f(spec.coord(i), spec.coord(j));
    }
    return out;
}

inline double min_image(double delta, double box) {
    delta = std::remainder(delta, box);
    return delta;
}

// Torus distance between grid points given by flat indices.
inline double torus_distance(const GridSpec& spec, std::size_t a, std::size_t b) {
    ScalarField probe(spec); // only for unravel; cheap enough not to duplicate logic
    auto ia = probe.unravel(a), ib = probe.unravel(b);
    double d2 = 0.0;
    for (int ax = 0; ax < spec.dim; ++ax) {
        int di = std::abs(ia[ax] - ib[ax]);
        di = std::min(di, spec.n - di);
        const double dx = di * spec.spacing();
        d2 += dx * dx;
    }
    return std::sqrt(d2);
}

// ---------------------------------------------------------------------------
// Snapshot file format: "# fraclab-field v1 d=<d> N=<N> L=<box>" header line,
// then one ASCII sample per line in row-major order.

inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void save_field(const ScalarField& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << "# fraclab-field v1 d=" << f.spec.dim << " N=" << f.spec.n
        << " L=" << format_g17(f.spec.box) << "\n";
    for (double v : f.values) out << format_g17(v) << "\n";
    if (!out) throw IoError("write failed: " + path);
}

inline ScalarField load_field(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::string header;
    std::getline(in, header);
    int d = 0, n = 0;
    double box = 0.0;
    if (std::sscanf(header.c_str(), "# fraclab-field v1 d=%d N=%d L=%lf", &d, &n, &box) != 3)
        throw IoError("bad field header in " + path);
    ScalarField f{GridSpec(d, n, box)};
    for (auto& v : f.values)
        if (!(in >> v)) throw IoError("sample count mismatch in " + path);
    double extra;
    if (in >> extra) throw IoError("trailing samples in " + path);
    return f;
}

} // namespace fraclab
