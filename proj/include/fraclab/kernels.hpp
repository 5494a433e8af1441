// kernels.hpp — dissipation kernels for the nonlocal operators.
//
// Two kinds:
//   * FractionalPower(alpha): kernel c(d,alpha) * |y|^(-d-alpha), the
//     principal-value form of the operator with Fourier symbol |xi|^alpha;
//   * GeneralizedM(table): kernel 1 / (|y|^2 m(|y|)) in d = 2, with m sampled
//     at increasing radii and interpolated as a piecewise power law (linear
//     in log-log, which preserves monotonicity and doubling between samples).
//
// The normalizing constant is the symbol-matching one,
//     c(d,alpha) = 2^alpha * Gamma((d+alpha)/2) / (pi^(d/2) * |Gamma(-alpha/2)|),
// taken with |Gamma(-alpha/2)| since Gamma is negative on (-1,0); quadrature
// tables validate it against the spectral route when they are built.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "fraclab/errors.hpp"

namespace fraclab {

inline double normalizing_constant(int d, double alpha) {
    if (d != 1 && d != 2) throw DimensionMismatch("normalizing_constant: d must be 1 or 2");
    if (!(alpha > 0.0 && alpha < 2.0)) throw InvalidAlpha("alpha must lie in (0,2)");
    const double num = std::pow(2.0, alpha) * std::tgamma(0.5 * (d + alpha));
    const double den = std::pow(std::numbers::pi, 0.5 * d) * std::abs(std::tgamma(-0.5 * alpha));
    return num / den;
}

// Radial C^1 ramp: 0 on r<=1, 1 on r>=2, |chi'| <= pi/2 <= 4.
struct CutoffChi {
    double operator()(double r) const {
        if (r <= 1.0) return 0.0;
        if (r >= 2.0) return 1.0;
        return 0.5 * (1.0 - std::cos(std::numbers::pi * (r - 1.0)));
    }
    double derivative(double r) const {
        if (r <= 1.0 || r >= 2.0) return 0.0;
        return 0.5 * std::numbers::pi * std::sin(std::numbers::pi * (r - 1.0));
    }
};

// Sampled modulus m for the generalized operator.  Positive, non-decreasing;
// outside the sampled range the first/last segment's log-log slope extends.
class MTable {
  public:
    MTable(std::vector<double> radii, std::vector<double> values)
        : radii_(std::move(radii)), values_(std::move(values)) {
        if (radii_.size() < 2 || radii_.size() != values_.size())
            throw InvalidKernel("m-table needs >= 2 matching samples");
        for (std::size_t i = 0; i < radii_.size(); ++i) {
            if (!(radii_[i] > 0.0) || !(values_[i] > 0.0))
                throw InvalidKernel("m-table radii and values must be positive");
            if (i > 0 && !(radii_[i] > radii_[i - 1]))
                throw InvalidKernel("m-table radii must increase");
            if (i > 0 && values_[i] < values_[i - 1] * (1.0 - 1e-12))
                throw InvalidKernel("m must be non-decreasing");
        }
        log_r_.resize(radii_.size());
        log_v_.resize(values_.size());
        for (std::size_t i = 0; i < radii_.size(); ++i) {
            log_r_[i] = std::log(radii_[i]);
            log_v_[i] = std::log(values_[i]);
        }
        integral_to_one_ = integrate_m_over_r(1.0);
        if (!std::isfinite(integral_to_one_))
            throw InvalidKernel("integral of m(r)/r over (0,1] is not finite");
        doubling_ = 0.0;
        for (std::size_t i = 0; i < radii_.size(); ++i)
            doubling_ = std::max(doubling_, (*this)(2.0 * radii_[i]) / values_[i]);
    }

    double operator()(double r) const {
        if (!(r > 0.0)) throw InvalidInput("m(r) needs r > 0");
        const double lr = std::log(r);
        std::size_t seg;
        if (lr <= log_r_.front()) {
            seg = 0;
        } else if (lr >= log_r_.back()) {
            seg = log_r_.size() - 2;
        } else {
            seg = static_cast<std::size_t>(
                      std::upper_bound(log_r_.begin(), log_r_.end(), lr) - log_r_.begin()) - 1;
        }
        const double slope =
            (log_v_[seg + 1] - log_v_[seg]) / (log_r_[seg + 1] - log_r_[seg]);
        return std::exp(log_v_[seg] + slope * (lr - log_r_[seg]));
    }

    // Doubling constant: max over stored radii of m(2r)/m(r).
    double doubling_constant() const { return doubling_; }
    // Quadrature of the integrability functional int_0^1 m(r)/r dr.
    double integral_m_over_r() const { return integral_to_one_; }

    const std::vector<double>& radii() const { return radii_; }
    const std::vector<double>& values() const { return values_; }

  private:
    // Piecewise power-law pieces integrate in closed form:
    // int m0 (r/r0)^s dr/r = m0/s * (r/r0)^s  (or m0*log for s = 0).
    double integrate_m_over_r(double upto) const {
        double acc = 0.0;
        // below the first sample: first segment's slope, from 0
        const double s0 = (log_v_[1] - log_v_[0]) / (log_r_[1] - log_r_[0]);
        if (s0 <= 1e-12) return std::numeric_limits<double>::infinity();
        const double r_lo = std::min(radii_.front(), upto);
        acc += (values_.front() / s0) * std::pow(r_lo / radii_.front(), s0);
        for (std::size_t i = 0; i + 1 < radii_.size() && radii_[i] < upto; ++i) {
            const double r1 = radii_[i], r2 = std::min(radii_[i + 1], upto);
            if (r2 <= r1) continue;
            const double s = (log_v_[i + 1] - log_v_[i]) / (log_r_[i + 1] - log_r_[i]);
            if (std::abs(s) < 1e-12)
                acc += values_[i] * std::log(r2 / r1);
            else
                acc += (values_[i] / s) * (std::pow(r2 / r1, s) - 1.0);
        }
        if (upto > radii_.back()) // extend last slope
        {
            const std::size_t k = radii_.size() - 2;
            const double s = (log_v_[k + 1] - log_v_[k]) / (log_r_[k + 1] - log_r_[k]);
            const double r1 = radii_.back(), r2 = upto;
            if (std::abs(s) < 1e-12)
                acc += values_.back() * std::log(r2 / r1);
            else
                acc += (values_.back() / s) * (std::pow(r2 / r1, s) - 1.0);
        }
        return acc;
    }

    std::vector<double> radii_, values_, log_r_, log_v_;
    double integral_to_one_ = 0.0;
    double doubling_ = 0.0;
};

// Reference weak kernel: m(r) = (-ln r)^(-(1+eps)) for r < r0, constant above.
// Weaker than every fractional power near the origin.
inline MTable make_log_modulus_table(double eps = 0.5, double r0 = 0.1, int points = 96) {
    if (!(eps > 0.0) || !(r0 > 0.0 && r0 < 1.0)) throw InvalidInput("bad log-modulus parameters");
    std::vector<double> radii, values;
    const double r_min = 1e-8;
    const double cap = std::pow(-std::log(r0), -(1.0 + eps));
    for (int i = 0; i < points; ++i) {
        const double t = static_cast<double>(i) / (points - 1);
        const double r = r_min * std::pow(r0 / r_min, t);
        radii.push_back(r);
        values.push_back(std::min(cap, std::pow(-std::log(r), -(1.0 + eps))));
    }
    radii.push_back(1e3); // constant extension above r0
    values.push_back(cap);
    return MTable(std::move(radii), std::move(values));
}

class DissipationKernel {
  public:
    enum class Kind { FractionalPower, GeneralizedM };

    static DissipationKernel fractional(double alpha) {
        if (!(alpha > 0.0 && alpha < 2.0)) throw InvalidAlpha("alpha must lie in (0,2)");
        DissipationKernel k;
        k.kind_ = Kind::FractionalPower;
        k.alpha_ = alpha;
        return k;
    }

    static DissipationKernel generalized(MTable table) {
        DissipationKernel k;
        k.kind_ = Kind::GeneralizedM;
        k.table_ = std::make_shared<MTable>(std::move(table));
        return k;
    }

    Kind kind() const { return kind_; }
    double alpha() const {
        if (kind_ != Kind::FractionalPower) throw InvalidKernel("not a fractional kernel");
        return alpha_;
    }
    const MTable& mtable() const {
        if (kind_ != Kind::GeneralizedM) throw InvalidKernel("not a generalized kernel");
        return *table_;
    }

    // Kernel value at distance r in dimension d (normalization included).
    double value(int d, double r) const {
        if (kind_ == Kind::FractionalPower)
            return normalizing_constant(d, alpha_) * std::pow(r, -(d + alpha_));
        if (d != 2) throw DimensionMismatch("GeneralizedM kernels are 2-D only");
        return 1.0 / (r * r * (*table_)(r));
    }

    std::string describe() const {
        if (kind_ == Kind::FractionalPower) return "alpha=" + std::to_string(alpha_);
        return "m-table[" + std::to_string(table_->radii().size()) + "]";
    }

  private:
    Kind kind_ = Kind::FractionalPower;
    double alpha_ = 1.0;
    std::shared_ptr<const MTable> table_; // immutable after construction
};

} // namespace fraclab
