// diagnostics.hpp — the quantities the regularity arguments monitor: OSS
// moduli and scales, the weighted displacement field v = (d_h theta)^2 Phi,
// dissipation-vs-nonlinearity balance, BKM integrals, the supercritical
// conditional criterion, and the increment log bound scatter.

#pragma once

#include <algorithm>
#include <set>

#include "fraclab/fractional.hpp"
#include "fraclab/localizer.hpp"
#include "fraclab/solver.hpp"

namespace fraclab {

// ---------------------------------------------------------------------------
// OSS moduli: sup over torus pairs closer than L of |theta(x) - theta(y)|,
// exact over grid pairs (one sliding max per offset shell).

namespace detail {

inline std::vector<std::pair<int, int>> offsets_within(const GridSpec& spec, double L) {
    std::vector<std::pair<int, int>> offsets;
    const int n = spec.n;
    if (spec.dim == 1) {
        for (int p = 1; p <= n / 2; ++p)
            if (p * spec.spacing() <= L) offsets.emplace_back(p, 0);
    } else {
        for (int p0 = 0; p0 <= n / 2; ++p0)
            for (int p1 = 0; p1 < n; ++p1) {
                if (p0 == 0 && (p1 == 0 || p1 > n / 2)) continue; // one of +-s suffices
                if (offset_distance(spec, p0, p1) <= L) offsets.emplace_back(p0, p1);
            }
    }
    return offsets;
}

// max_x |f(x) - f(x-s)| with an optional early stop once `bail` is exceeded.
inline double max_increment_early(const ScalarField& f, int p0, int p1, double bail) {
    const int n = f.spec.n;
    double m = 0.0;
    if (f.spec.dim == 1) {
        for (int i = 0; i < n; ++i) {
            m = std::max(m, std::abs(f.at(i) - f.at((i - p0 + n) % n)));
            if (m > bail) return m;
        }
        return m;
    }
    for (int i = 0; i < n; ++i) {
        const int is = (i - p0 + n) % n;
        const double* row = &f.values[static_cast<std::size_t>(i) * n];
        const double* srow = &f.values[static_cast<std::size_t>(is) * n];
        for (int j = 0; j < n; ++j)
            m = std::max(m, std::abs(row[j] - srow[(j - p1 + n) % n]));
        if (m > bail) return m;
    }
    return m;
}

} // namespace detail

inline double oss_modulus(const ScalarField& theta, double L,
                          double bail = std::numeric_limits<double>::infinity()) {
    if (!(L > 0.0) || L > theta.spec.diameter() * (1.0 + 1e-12))
        throw InvalidRange("oss scale must lie in (0, diameter]");
    double sup = 0.0;
    for (const auto& [p0, p1] : detail::offsets_within(theta.spec, L)) {
        sup = std::max(sup, detail::max_increment_early(theta, p0, p1, bail));
        if (sup > bail) return sup;
    }
    return sup;
}

struct OSSProfile {
    std::vector<double> scales;
    std::vector<double> moduli;
};

inline OSSProfile compute_oss_profile(const ScalarField& theta,
                                      const std::vector<double>& scales) {
    OSSProfile prof;
    prof.scales = scales;
    for (double L : scales) prof.moduli.push_back(oss_modulus(theta, L));
    return prof;
}

// Largest grid-representable L whose modulus stays at or below delta
// (0 when even one grid spacing oscillates more than delta).
inline double oss_scale_for_delta(const ScalarField& theta, double delta) {
    if (!(delta > 0.0)) throw InvalidInput("delta must be positive");
    const GridSpec& spec = theta.spec;
    // realized squared offset distances in units of h^2 are integers
    std::set<long> d2set;
    const int half = spec.n / 2;
    if (spec.dim == 1) {
        for (int p = 1; p <= half; ++p) d2set.insert(static_cast<long>(p) * p);
    } else {
        for (int p0 = 0; p0 <= half; ++p0)
            for (int p1 = (p0 == 0 ? 1 : 0); p1 <= half; ++p1)
                d2set.insert(static_cast<long>(p0) * p0 + static_cast<long>(p1) * p1);
    }
    std::vector<long> d2(d2set.begin(), d2set.end());
    const double h = spec.spacing();
    auto radius = [&](std::size_t i) { return std::sqrt(static_cast<double>(d2[i])) * h; };

    // bisection over the monotone profile with early bail at delta
    if (oss_modulus(theta, radius(0), delta) > delta) return 0.0;
    std::size_t lo = 0, hi = d2.size() - 1;
    if (oss_modulus(theta, radius(hi), delta) <= delta) return radius(hi);
    while (hi - lo > 1) {
        const std::size_t mid = lo + (hi - lo) / 2;
        (oss_modulus(theta, radius(mid), delta) <= delta ? lo : hi) = mid;
    }
    return radius(lo);
}

struct UniformOSSResult {
    bool holds = true;
    double first_violation_time = 0.0;
    double worst_modulus = 0.0;
};

inline UniformOSSResult uniform_oss_check(const std::vector<SolverState>& trajectory,
                                          double delta, double L) {
    if (trajectory.empty()) throw InvalidInput("empty trajectory");
    UniformOSSResult res;
    for (const auto& snap : trajectory) {
        const double m = oss_modulus(snap.primary(), L);
        res.worst_modulus = std::max(res.worst_modulus, m);
        if (m > delta) {
            res.holds = false;
            res.first_violation_time = snap.time;
            return res;
        }
    }
    return res;
}

// ---------------------------------------------------------------------------
// Weighted displacement field v(x,h) = (theta(x+h) - theta(x))^2 Phi(|h|).
// Displacements are snapped to grid offsets; the snapped length feeds Phi.

struct DisplacementScan {
    double sup_v = 0.0;
    double arg_h = 0.0;   // |h| attaining the sup
    double threshold = 0.0;
    bool within_threshold = true;
};

inline std::vector<std::array<double, 2>> default_shells(const GridSpec& spec, double h_min,
                                                         double h_max, int magnitudes = 16,
                                                         int directions = 8) {
    std::vector<std::array<double, 2>> shells;
    for (int m = 0; m < magnitudes; ++m) {
        const double r =
            h_min * std::pow(h_max / h_min, magnitudes == 1 ? 0.0 : double(m) / (magnitudes - 1));
        if (spec.dim == 1) {
            shells.push_back({r, 0.0});
        } else {
            for (int k = 0; k < directions; ++k) {
                const double phi = two_pi * k / directions;
                shells.push_back({r * std::cos(phi), r * std::sin(phi)});
            }
        }
    }
    return shells;
}

inline DisplacementScan displacement_field(const ScalarField& theta, const LocalizerPsi& loc,
                                           const std::vector<std::array<double, 2>>& shells,
                                           double delta0 = 0.0) {
    const GridSpec& spec = theta.spec;
    const int n = spec.n;
    const double h = spec.spacing();
    std::set<std::pair<int, int>> snapped;
    for (const auto& s : shells) {
        int p0 = static_cast<int>(std::lround(s[0] / h)) % n;
        int p1 = spec.dim == 2 ? static_cast<int>(std::lround(s[1] / h)) % n : 0;
        if (p0 < 0) p0 += n;
        if (p1 < 0) p1 += n;
        if (p0 == 0 && p1 == 0) continue;
        snapped.insert({p0, p1});
    }
    DisplacementScan scan;
    scan.threshold = delta0 * delta0 / 16.0;
    for (const auto& [p0, p1] : snapped) {
        const double dist = detail::offset_distance(spec, p0, p1);
        const double inc = detail::max_increment(theta, p0, p1);
        const double v = inc * inc * loc.phi(dist);
        if (v > scan.sup_v) {
            scan.sup_v = v;
            scan.arg_h = dist;
        }
    }
    scan.within_threshold = delta0 <= 0.0 || scan.sup_v < scan.threshold;
    return scan;
}

// ---------------------------------------------------------------------------
// Balance of dissipation against nonlinearity, pointwise:
//   dissipation side:  D/4 + c1 |grad theta|^3 / ||theta0||_inf
//   forcing side:      |grad u| |grad theta|^2
// reported as the maximum over x of forcing/dissipation.

struct BalanceSummary {
    double max_ratio = 0.0;
    std::size_t arg_index = 0;
    double max_D = 0.0;
};

inline BalanceSummary balance_check(const ScalarField& theta, const VectorField& u,
                                    const KernelTable& table, double c1,
                                    double linf_theta0) {
    VectorField gt = gradient(theta);
    ScalarField D = dissipation_density(gt, table);
    // Frobenius norm of grad u
    ScalarField gu(theta.spec);
    for (int j = 0; j < theta.spec.dim; ++j) {
        VectorField gj = gradient(u.comp[j]);
        for (int i = 0; i < theta.spec.dim; ++i)
            for (std::size_t m = 0; m < gu.size(); ++m)
                gu.values[m] += gj.comp[i].values[m] * gj.comp[i].values[m];
    }
    BalanceSummary out;
    out.max_D = linf_norm(D);
    const double tiny = 1e-300;
    for (std::size_t m = 0; m < D.size(); ++m) {
        double g2 = 0.0;
        for (int ax = 0; ax < theta.spec.dim; ++ax)
            g2 += gt.comp[ax].values[m] * gt.comp[ax].values[m];
        if (g2 == 0.0) continue;
        const double g3 = std::pow(g2, 1.5);
        const double diss =
            0.25 * std::max(D.values[m], 0.0) + (linf_theta0 > 0.0 ? c1 * g3 / linf_theta0 : 0.0);
        const double forcing = std::sqrt(gu.values[m]) * g2;
        const double ratio = forcing / std::max(diss, tiny);
        if (ratio > out.max_ratio) {
            out.max_ratio = ratio;
            out.arg_index = m;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// BKM continuation integral: trapezoid accumulation of a sup-norm series.

inline double bkm_integral(const std::vector<std::pair<double, double>>& time_norm) {
    double acc = 0.0;
    for (std::size_t i = 1; i < time_norm.size(); ++i)
        acc += 0.5 * (time_norm[i].first - time_norm[i - 1].first) *
               (time_norm[i].second + time_norm[i - 1].second);
    return acc;
}

// ---------------------------------------------------------------------------
// Supercritical conditional-regularity criterion delta > 1 - alpha.

struct SupercriticalReport {
    bool criterion_met = false; // strict inequality
    double exponent_dissipation = 0.0; // 2 + alpha/(1-delta)
    double exponent_forcing = 0.0;     // 4 - 2 alpha/(1-delta+alpha)
    double holder_norm = 0.0;          // finite-scale C^delta norm M
};

inline SupercriticalReport supercritical_conditional_check(const ScalarField& theta, double alpha,
                                                           double delta) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidAlpha("supercritical regime needs alpha in (0,1)");
    if (!(delta > 0.0 && delta < 1.0)) throw InvalidDelta("delta must lie in (0,1)");
    SupercriticalReport rep;
    rep.criterion_met = delta > 1.0 - alpha;
    rep.exponent_dissipation = 2.0 + alpha / (1.0 - delta);
    rep.exponent_forcing = 4.0 - 2.0 * alpha / (1.0 - delta + alpha);
    rep.holder_norm = holder_seminorm(theta, delta, theta.spec.spacing());
    return rep;
}

// ---------------------------------------------------------------------------
// Increment log bound: scatter of (D_h(x), |d_h u(x)|) under the SQG
// constitutive law, with an affine-in-log majorant fit.

struct IncrementScan {
    std::vector<std::pair<double, double>> points; // (D_h, |d_h u|)
    double a = 0.0, b = 0.0;                       // majorant |d_h u| <= a + b log+ D_h
    bool majorant_holds = false;
};

inline IncrementScan increment_log_bound_scan(const ScalarField& theta,
                                              const std::array<double, 2>& displacement,
                                              const KernelTable& table, int x_samples = 64) {
    if (theta.spec.dim != 2) throw DimensionMismatch("increment scan requires d = 2");
    const GridSpec& spec = theta.spec;
    const int n = spec.n;
    const double h = spec.spacing();
    int p0 = static_cast<int>(std::lround(displacement[0] / h)) % n;
    int p1 = static_cast<int>(std::lround(displacement[1] / h)) % n;
    if (p0 < 0) p0 += n;
    if (p1 < 0) p1 += n;

    auto shift_diff = [&](const ScalarField& f) {
        ScalarField d(spec);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                d.at(i, j) = f.at((i + p0) % n, (j + p1) % n) - f.at(i, j);
        return d;
    };

    ScalarField dtheta = shift_diff(theta);
    ScalarField Dh = increment_quadratic_form({&dtheta}, table);
    VectorField u = sqg_velocity(theta);
    ScalarField du0 = shift_diff(u.comp[0]), du1 = shift_diff(u.comp[1]);

    IncrementScan scan;
    const int stride = std::max(1, n / static_cast<int>(std::sqrt(double(x_samples))));
    for (int i = 0; i < n; i += stride)
        for (int j = 0; j < n; j += stride) {
            const double D = std::max(Dh.at(i, j), 0.0);
            const double mag = std::hypot(du0.at(i, j), du1.at(i, j));
            scan.points.emplace_back(D, mag);
        }

    // least-squares slope in log+ D, then lift the intercept to the majorant
    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    const double m = static_cast<double>(scan.points.size());
    for (const auto& [D, y] : scan.points) {
        const double t = D > 1.0 ? std::log(D) : 0.0;
        st += t;
        sy += y;
        stt += t * t;
        sty += t * y;
    }
    const double denom = m * stt - st * st;
    scan.b = denom > 1e-30 ? std::max(0.0, (m * sty - st * sy) / denom) : 0.0;
    double a = -std::numeric_limits<double>::infinity();
    for (const auto& [D, y] : scan.points) {
        const double t = D > 1.0 ? std::log(D) : 0.0;
        a = std::max(a, y - scan.b * t);
    }
    scan.a = a;
    scan.majorant_holds = true;
    for (const auto& [D, y] : scan.points) {
        const double t = D > 1.0 ? std::log(D) : 0.0;
        if (y > scan.a + scan.b * t + 1e-12) scan.majorant_holds = false;
    }
    return scan;
}

// ---------------------------------------------------------------------------
// Per-snapshot record stream.

struct DiagnosticsRecord {
    double time = 0.0;
    double linf_theta = 0.0;
    double linf_grad = 0.0;
    std::vector<double> oss; // one per configured scale
    double energy = 0.0;
    double enstrophy = 0.0;
    double bkm = 0.0;
    double max_D = 0.0;
    double balance_ratio = 0.0;
    double sup_v = 0.0;
};

struct DiagnosticsOptions {
    std::vector<double> oss_scales;
    std::optional<LocalizerPsi> localizer; // enables sup_v
    double delta0 = 0.0;
    std::optional<double> balance_c1; // enables balance/max_D (needs alpha in (0,2))
    double balance_alpha = 1.0;
    int image_radius = 20;
};

class DiagnosticsEngine {
  public:
    DiagnosticsEngine(DiagnosticsOptions opts, SystemKind system, double linf_theta0)
        : opts_(std::move(opts)), system_(system), linf_theta0_(linf_theta0) {}

    DiagnosticsRecord record(const SolverState& st) {
        DiagnosticsRecord rec;
        rec.time = st.time;
        const ScalarField& primary = st.primary();
        rec.linf_theta = linf_norm(primary);
        VectorField grad = gradient(primary);
        for (const auto& c : grad.comp) rec.linf_grad = std::max(rec.linf_grad, linf_norm(c));
        for (const auto& c : st.velocity.comp) rec.energy += l2sq(c);
        rec.enstrophy = enstrophy(st);
        for (double L : opts_.oss_scales) rec.oss.push_back(oss_modulus(primary, L));
        if (opts_.localizer) {
            auto shells = default_shells(primary.spec, 2.0 * primary.spec.spacing(),
                                         0.45 * primary.spec.box);
            rec.sup_v = displacement_field(primary, *opts_.localizer, shells, opts_.delta0).sup_v;
        }
        if (opts_.balance_c1 && opts_.balance_alpha > 0.0 && opts_.balance_alpha < 2.0) {
            auto table = detail::cached_fractional_table(primary.spec, opts_.balance_alpha,
                                                         opts_.image_radius);
            auto bal = balance_check(primary, st.velocity, *table, *opts_.balance_c1,
                                     linf_theta0_);
            rec.balance_ratio = bal.max_ratio;
            rec.max_D = bal.max_D;
        }
        // BKM integrand: vorticity sup for ModEuler, gradient sup otherwise
        const double norm = system_ == SystemKind::ModEuler2D ? rec.linf_theta : rec.linf_grad;
        if (!series_.empty())
            bkm_ += 0.5 * (rec.time - series_.back().first) * (norm + series_.back().second);
        series_.emplace_back(rec.time, norm);
        rec.bkm = bkm_;
        return rec;
    }

    static double l2sq(const ScalarField& f) {
        double acc = 0.0;
        for (double v : f.values) acc += v * v;
        return acc * std::pow(f.spec.spacing(), f.spec.dim);
    }

    static double enstrophy(const SolverState& st) {
        if (st.has_omega()) return l2sq(st.omega);
        if (st.spec().dim == 2) return l2sq(curl2d(st.velocity));
        return l2sq(derivative(st.theta, 0));
    }

  private:
    DiagnosticsOptions opts_;
    SystemKind system_;
    double linf_theta0_ = 0.0;
    std::vector<std::pair<double, double>> series_;
    double bkm_ = 0.0;
};

inline std::vector<std::string> diagnostics_csv_header(const std::vector<double>& scales) {
    std::vector<std::string> h{"time", "linf_theta", "linf_grad", "energy", "enstrophy", "bkm"};
    for (double L : scales) h.push_back("oss@" + format_g17(L));
    h.push_back("balance_ratio");
    h.push_back("sup_v");
    return h;
}

inline void append_diagnostics_row(CsvWriter& csv, const DiagnosticsRecord& rec) {
    std::vector<std::string> cells{CsvWriter::cell(rec.time),
                                   CsvWriter::cell(rec.linf_theta),
                                   CsvWriter::cell(rec.linf_grad),
                                   CsvWriter::cell(rec.energy),
                                   CsvWriter::cell(rec.enstrophy),
                                   CsvWriter::cell(rec.bkm)};
    for (double v : rec.oss) cells.push_back(CsvWriter::cell(v));
    cells.push_back(CsvWriter::cell(rec.balance_ratio));
    cells.push_back(CsvWriter::cell(rec.sup_v));
    csv.write_row_strings(cells);
}

} // namespace fraclab
