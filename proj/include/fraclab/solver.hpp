// solver.hpp — pseudo-spectral time integration of the four systems:
//
//   Burgers1D     u_t + u u_x + L^a u = 0                    (velocity form)
//   SQG2D         th_t + u.grad th + L^a th = 0,  u = (-R2 th, R1 th)
//   ModEuler2D    w_t + u.grad w + K w = A R1 w,  u = curl^-1 w
//   Boussinesq2D  w_t + u.grad w + L^a w = d1 th,
//                 th_t + u.grad th + L^b th = 0,  u = curl^-1 w
//
// Time stepping is classical RK4 on the nonlinear term with an exact
// integrating factor for the diagonal linear part; the dissipation symbol is
// (k0 |xi|)^a (+ eps (k0 |xi|)^2 hyper-regularization), or the quadrature
// symbol of a generalized kernel for ModEuler.  The ModEuler forcing A R1 is
// linear diagonal with an imaginary symbol, so it rides inside the
// integrating factor and conserves enstrophy per mode exactly.
//
// The advective CFL dt max|u| / h <= 0.5 is enforced by power-of-two
// substepping of the configured dt; blow-up (NaN, gradient growth beyond a
// factor, or the dt floor) is a reported outcome, not a crash.

#pragma once

#include <functional>
#include <optional>

#include "fraclab/fractional.hpp"
#include "fraclab/rng.hpp"

namespace fraclab {

enum class SystemKind { Burgers1D, SQG2D, ModEuler2D, Boussinesq2D };

inline std::string system_name(SystemKind s) {
    switch (s) {
        case SystemKind::Burgers1D: return "burgers1d";
        case SystemKind::SQG2D: return "sqg2d";
        case SystemKind::ModEuler2D: return "modeuler2d";
        case SystemKind::Boussinesq2D: return "boussinesq2d";
    }
    return "?";
}

struct SolverConfig {
    SystemKind system = SystemKind::SQG2D;
    double alpha = 1.0; // [0,2]; 0 means no dissipation on the velocity/scalar eq
    double beta = 0.0;  // Boussinesq temperature power
    double forcing_amplitude = 0.0; // A, ModEuler only
    std::optional<DissipationKernel> kernel; // ModEuler may use GeneralizedM
    double epsilon = 0.0; // hyper-regularization -eps Laplacian
    double dt = 0.01;
    double t_end = 1.0;
    bool dealias = true;
    int snapshot_stride = 10;
    int image_radius = 20;
    double blowup_gradient_factor = 1e3;
    double dt_floor = 1e-7;

    void validate() const {
        if (!(alpha >= 0.0 && alpha <= 2.0)) throw InvalidConfig("alpha must lie in [0,2]");
        if (!(beta >= 0.0 && beta <= 2.0)) throw InvalidConfig("beta must lie in [0,2]");
        if (!(forcing_amplitude >= 0.0)) throw InvalidConfig("forcing amplitude must be >= 0");
        if (!(epsilon >= 0.0)) throw InvalidConfig("epsilon must be >= 0");
        if (!(dt > 0.0) || !(t_end > 0.0)) throw InvalidConfig("dt and t-end must be positive");
        if (snapshot_stride < 1) throw InvalidConfig("snapshot-stride must be >= 1");
        if (kernel && kernel->kind() == DissipationKernel::Kind::GeneralizedM &&
            system != SystemKind::ModEuler2D)
            throw InvalidConfig("generalized kernels are supported for ModEuler only");
    }
};

struct SolverState {
    double time = 0.0;
    ScalarField theta;    // active scalar: u for Burgers, theta for SQG/Boussinesq
    ScalarField omega;    // vorticity (ModEuler, Boussinesq)
    VectorField velocity; // derived from the constitutive law

    bool has_theta() const { return !theta.values.empty(); }
    bool has_omega() const { return !omega.values.empty(); }
    const GridSpec& spec() const { return has_theta() ? theta.spec : omega.spec; }

    // The scalar whose gradient the regularity diagnostics track.
    const ScalarField& primary() const { return has_theta() ? theta : omega; }
};

struct BlowUpInfo {
    double time = 0.0;
    double max_gradient = 0.0;
    std::string reason; // "non-finite", "gradient-threshold", "dt-floor"
};

// ---------------------------------------------------------------------------
// Initial data recipes.

enum class Recipe { Zero, SingleMode, TwoMode, RandomBand, SteepFront };

struct InitialDataSpec {
    Recipe recipe = Recipe::SingleMode;
    double amplitude = 1.0;
    double width = 0.5;      // SteepFront
    int max_mode = 8;        // RandomBand
    std::uint64_t seed = 0;  // RandomBand
};

inline ScalarField make_initial_data(const InitialDataSpec& in, const GridSpec& spec) {
    if (!(in.amplitude >= 0.0)) throw InvalidInput("amplitude must be >= 0");
    const double a = in.amplitude;
    switch (in.recipe) {
        case Recipe::Zero:
            return ScalarField(spec);
        case Recipe::SingleMode:
            if (spec.dim == 1) return sample(spec, [a](double x) { return a * std::cos(x); });
            return sample(spec, [a](double x, double) { return a * std::cos(x); });
        case Recipe::TwoMode:
            if (spec.dim == 1)
                return sample(spec,
                              [a](double x) { return 0.5 * a * (std::cos(x) + std::cos(2 * x)); });
            return sample(spec,
                          [a](double x, double y) { return a * std::cos(x) * std::cos(y); });
        case Recipe::RandomBand: {
            Rng rng(in.seed);
            Spectrum s(spec);
            double mass = 0.0;
            auto put = [&](int p, int q) {
                const cplx c(rng.gaussian(), rng.gaussian());
                s(p, q) = c;
                s(-p, -q) = std::conj(c);
                mass += 2.0 * std::abs(c);
            };
            if (spec.dim == 1) {
                for (int k = 1; k <= in.max_mode; ++k) put(k, 0);
            } else {
                for (int p = 0; p <= in.max_mode; ++p)
                    for (int q = -in.max_mode; q <= in.max_mode; ++q) {
                        if (p == 0 && q <= 0) continue;
                        put(p, q);
                    }
            }
            for (auto& c : s.coeff) c *= a / mass; // sum|coeff| = a bounds ||f||_inf
            return inverse_transform(s);
        }
        case Recipe::SteepFront: {
            if (spec.dim != 1) throw DimensionMismatch("steep-front recipe is 1-D");
            if (!(in.width > 0.0)) throw InvalidInput("width must be positive");
            const double w = in.width;
            // periodization of -a tanh((x-pi)/w): compressive front of slope
            // -a/w at the wrap point, exact max |u'| = a/w
            return sample(spec, [a, w](double x) { return a * std::tanh(std::sin(x) / w); });
        }
    }
    throw InvalidInput("unknown recipe");
}

inline SolverState make_initial_state(const SolverConfig& cfg, const GridSpec& spec,
                                      const InitialDataSpec& theta_spec,
                                      const InitialDataSpec& omega_spec = {Recipe::Zero}) {
    SolverState st;
    st.time = 0.0;
    switch (cfg.system) {
        case SystemKind::Burgers1D:
            if (spec.dim != 1) throw DimensionMismatch("Burgers1D needs a 1-D grid");
            st.theta = make_initial_data(theta_spec, spec);
            break;
        case SystemKind::SQG2D:
            if (spec.dim != 2) throw DimensionMismatch("SQG2D needs a 2-D grid");
            st.theta = make_initial_data(theta_spec, spec);
            break;
        case SystemKind::ModEuler2D: {
            if (spec.dim != 2) throw DimensionMismatch("ModEuler2D needs a 2-D grid");
            st.omega = make_initial_data(omega_spec, spec);
            const double mu = mean(st.omega);
            for (auto& v : st.omega.values) v -= mu;
            break;
        }
        case SystemKind::Boussinesq2D: {
            if (spec.dim != 2) throw DimensionMismatch("Boussinesq2D needs a 2-D grid");
            st.theta = make_initial_data(theta_spec, spec);
            st.omega = make_initial_data(omega_spec, spec);
            const double mu = mean(st.omega);
            for (auto& v : st.omega.values) v -= mu;
            break;
        }
    }
    return st;
}

// ---------------------------------------------------------------------------
// The stepper.

class Solver {
  public:
    Solver(const SolverConfig& cfg, SolverState initial) : cfg_(cfg), spec_(initial.spec()) {
        cfg_.validate();
        spec_.validate();
        const std::size_t nbins = spec_.size();
        nfields_ = cfg_.system == SystemKind::Boussinesq2D ? 2 : 1;

        // linear symbols: field 0 is the primary evolved scalar (u, theta or
        // omega); for Boussinesq field 0 = omega, field 1 = theta
        lin_.assign(nfields_, std::vector<cplx>(nbins, cplx(0.0)));
        Spectrum probe(spec_);
        std::vector<double> quad_symbol;
        const bool generalized =
            cfg_.kernel && cfg_.kernel->kind() == DissipationKernel::Kind::GeneralizedM;
        if (generalized)
            quad_symbol =
                build_kernel_table(spec_, *cfg_.kernel, cfg_.image_radius).symbol;
        const double kk = k0(spec_);
        const int nyq = spec_.n / 2;
        for (std::size_t m = 0; m < nbins; ++m) {
            const auto xi = probe.wavevector(m);
            const double mod =
                kk * std::sqrt(static_cast<double>(xi[0]) * xi[0] +
                               static_cast<double>(xi[1]) * xi[1]);
            const double hyper = cfg_.epsilon * mod * mod;
            double sigma0;
            if (generalized)
                sigma0 = quad_symbol[m] + hyper;
            else
                sigma0 = (cfg_.alpha > 0.0 && mod > 0.0 ? std::pow(mod, cfg_.alpha) : 0.0) + hyper;
            lin_[0][m] = -sigma0;
            if (cfg_.system == SystemKind::ModEuler2D && cfg_.forcing_amplitude > 0.0) {
                const bool at_nyquist = xi[0] == nyq || (spec_.dim == 2 && xi[1] == nyq);
                if (mod > 0.0 && !at_nyquist) {
                    // R1 symbol -i xi1/|xi| inside the integrating factor
                    const double knorm = std::sqrt(static_cast<double>(xi[0]) * xi[0] +
                                                   static_cast<double>(xi[1]) * xi[1]);
                    lin_[0][m] += cplx(0.0, -cfg_.forcing_amplitude * xi[0] / knorm);
                }
            }
            if (nfields_ == 2) {
                const double sigma1 =
                    (cfg_.beta > 0.0 && mod > 0.0 ? std::pow(mod, cfg_.beta) : 0.0) + hyper;
                lin_[1][m] = -sigma1;
            }
        }

        // dealias mask: 2/3 rule, applied to every nonlinear-term transform
        mask_.assign(nbins, 1.0);
        const int cut = spec_.n / 3;
        for (std::size_t m = 0; m < nbins; ++m) {
            const auto xi = probe.wavevector(m);
            if (std::abs(xi[0]) > cut || (spec_.dim == 2 && std::abs(xi[1]) > cut))
                mask_[m] = 0.0;
        }

        fields_.clear();
        if (cfg_.system == SystemKind::Boussinesq2D) {
            fields_.push_back(forward_transform(initial.omega));
            fields_.push_back(forward_transform(initial.theta));
        } else if (cfg_.system == SystemKind::ModEuler2D) {
            fields_.push_back(forward_transform(initial.omega));
        } else {
            fields_.push_back(forward_transform(initial.theta));
        }
        state_ = std::move(initial);
        sync_derived();
        initial_gradient_ = std::max(max_gradient(), 1e-10);
        last_gradient_ = initial_gradient_;
    }

    const SolverState& state() const { return state_; }
    const SolverConfig& config() const { return cfg_; }
    double initial_gradient() const { return initial_gradient_; }

    double max_gradient() const {
        VectorField g = gradient(state_.primary());
        double mx = 0.0;
        for (const auto& c : g.comp) mx = std::max(mx, linf_norm(c));
        return mx;
    }

    double max_speed() const {
        double mx = 0.0;
        for (const auto& c : state_.velocity.comp) mx = std::max(mx, linf_norm(c));
        return mx;
    }

    // Advance by one configured dt (internally subdivided to meet the CFL
    // condition).  On a blow-up outcome the state holds the last finite step.
    std::optional<BlowUpInfo> step() {
        const double h = spec_.spacing();
        double speed = std::max(max_speed(), 1e-300);
        int substeps = 1;
        while ((cfg_.dt / substeps) * speed / h > 0.5) {
            substeps *= 2;
            if (cfg_.dt / substeps < cfg_.dt_floor)
                return BlowUpInfo{state_.time, max_gradient(), "dt-floor"};
        }
        const double dt = cfg_.dt / substeps;
        for (int s = 0; s < substeps; ++s) {
            rk4_substep(dt);
            if (!finite()) {
                sync_derived_best_effort();
                return BlowUpInfo{state_.time + (s + 1) * dt, last_gradient_, "non-finite"};
            }
        }
        state_.time += cfg_.dt;
        sync_derived();
        const double g = max_gradient();
        last_gradient_ = g;
        if (g > cfg_.blowup_gradient_factor * initial_gradient_)
            return BlowUpInfo{state_.time, g, "gradient-threshold"};
        return std::nullopt;
    }

  private:
    using Coeffs = std::vector<std::vector<cplx>>;

    bool finite() const {
        for (const auto& f : fields_)
            for (const auto& c : f.coeff)
                if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
        return true;
    }

    ScalarField to_real(const Spectrum& s) const { return detail::ifft_real(s); }

    // velocity from the constitutive law of the active system
    VectorField derive_velocity(const std::vector<Spectrum>& fs) const {
        switch (cfg_.system) {
            case SystemKind::Burgers1D: {
                VectorField u(spec_);
                u.comp[0] = to_real(fs[0]);
                return u;
            }
            case SystemKind::SQG2D: {
                auto uh = sqg_velocity_spectrum(fs[0]);
                VectorField u(spec_);
                u.comp[0] = to_real(uh[0]);
                u.comp[1] = to_real(uh[1]);
                return u;
            }
            case SystemKind::ModEuler2D:
            case SystemKind::Boussinesq2D: {
                auto uh = biot_savart_spectrum(fs[0]);
                VectorField u(spec_);
                u.comp[0] = to_real(uh[0]);
                u.comp[1] = to_real(uh[1]);
                return u;
            }
        }
        throw InvalidConfig("unknown system");
    }

    // spectral nonlinear terms, dealiased
    std::vector<Spectrum> nonlinear(const std::vector<Spectrum>& fs) const {
        VectorField u = derive_velocity(fs);
        std::vector<Spectrum> out;
        out.reserve(fs.size());
        for (std::size_t fi = 0; fi < fs.size(); ++fi) {
            ScalarField adv(spec_);
            for (int ax = 0; ax < spec_.dim; ++ax) {
                ScalarField dfi = to_real(derivative_spectrum(fs[fi], ax));
                for (std::size_t i = 0; i < adv.size(); ++i)
                    adv.values[i] -= u.comp[ax].values[i] * dfi.values[i];
            }
            Spectrum n = detail::fft_of_real(adv);
            if (cfg_.dealias)
                for (std::size_t m = 0; m < n.size(); ++m) n.coeff[m] *= mask_[m];
            n.coeff[0] = 0.0; // advection of a periodic field carries no mean
            out.push_back(std::move(n));
        }
        if (cfg_.system == SystemKind::Boussinesq2D) {
            // buoyancy source d1 theta in the vorticity equation
            Spectrum d1theta = derivative_spectrum(fs[1], 0);
            for (std::size_t m = 0; m < out[0].size(); ++m) out[0].coeff[m] += d1theta.coeff[m];
        }
        return out;
    }

    void rk4_substep(double dt) {
        const std::size_t nb = spec_.size();
        auto expmul = [&](double factor) {
            Coeffs E(nfields_, std::vector<cplx>(nb));
            for (std::size_t f = 0; f < nfields_; ++f)
                for (std::size_t m = 0; m < nb; ++m) E[f][m] = std::exp(factor * dt * lin_[f][m]);
            return E;
        };
        const Coeffs E1 = expmul(0.5), E2 = expmul(1.0);

        auto apply = [&](const Coeffs& E, const std::vector<Spectrum>& v) {
            std::vector<Spectrum> r = v;
            for (std::size_t f = 0; f < nfields_; ++f)
                for (std::size_t m = 0; m < nb; ++m) r[f].coeff[m] *= E[f][m];
            return r;
        };
        auto axpy = [&](std::vector<Spectrum> x, double a, const std::vector<Spectrum>& y) {
            for (std::size_t f = 0; f < nfields_; ++f)
                for (std::size_t m = 0; m < nb; ++m) x[f].coeff[m] += a * y[f].coeff[m];
            return x;
        };

        const auto n1 = nonlinear(fields_);
        const auto a = apply(E1, axpy(fields_, 0.5 * dt, n1));
        const auto n2 = nonlinear(a);
        const auto b = axpy(apply(E1, fields_), 0.5 * dt, n2);
        const auto n3 = nonlinear(b);
        const auto c = axpy(apply(E2, fields_), dt, apply(E1, n3));
        const auto n4 = nonlinear(c);

        std::vector<Spectrum> next = apply(E2, fields_);
        next = axpy(std::move(next), dt / 6.0, apply(E2, n1));
        next = axpy(std::move(next), dt / 3.0, apply(E1, n2));
        next = axpy(std::move(next), dt / 3.0, apply(E1, n3));
        next = axpy(std::move(next), dt / 6.0, n4);
        fields_ = std::move(next);

        if (cfg_.system == SystemKind::ModEuler2D || cfg_.system == SystemKind::Boussinesq2D)
            fields_[0].coeff[0] = 0.0; // pin the vorticity mean
    }

    void sync_derived() {
        if (cfg_.system == SystemKind::Boussinesq2D) {
            state_.omega = to_real(fields_[0]);
            state_.theta = to_real(fields_[1]);
        } else if (cfg_.system == SystemKind::ModEuler2D) {
            state_.omega = to_real(fields_[0]);
        } else {
            state_.theta = to_real(fields_[0]);
        }
        state_.velocity = derive_velocity(fields_);
    }

    void sync_derived_best_effort() {
        // keep the last finite state; nothing to do, fields_ are poisoned but
        // state_ still holds the previous sync
    }

    SolverConfig cfg_;
    GridSpec spec_;
    SolverState state_;
    std::vector<Spectrum> fields_;
    Coeffs lin_;
    std::vector<double> mask_;
    std::size_t nfields_ = 1;
    double initial_gradient_ = 1.0;
    double last_gradient_ = 0.0;
};

// ---------------------------------------------------------------------------
// Whole-run driver.

struct RunResult {
    std::vector<SolverState> snapshots;
    std::optional<BlowUpInfo> blow_up;
};

// Steps to t_end, keeping a snapshot every snapshot_stride steps (plus the
// initial and final states).  The callback sees every snapshot as it forms.
inline RunResult run(const SolverConfig& cfg, SolverState initial,
                     const std::function<void(const SolverState&, int)>& on_snapshot = {}) {
    cfg.validate();
    Solver solver(cfg, std::move(initial));
    RunResult result;
    auto snap = [&](int step_index) {
        result.snapshots.push_back(solver.state());
        if (on_snapshot) on_snapshot(solver.state(), step_index);
    };
    snap(0);
    const int steps = static_cast<int>(std::ceil(cfg.t_end / cfg.dt - 1e-12));
    for (int s = 1; s <= steps; ++s) {
        auto blow = solver.step();
        if (blow) {
            result.blow_up = blow;
            snap(s);
            return result;
        }
        if (s % cfg.snapshot_stride == 0 || s == steps) snap(s);
    }
    return result;
}

} // namespace fraclab
