// transform.hpp — discrete Fourier layer on top of FFTW.
//
// Normalization: forward divides by N^d, so coeff(0) is the field mean and a
// Fourier symbol s(xi) acts by plain multiplication.  With the centered grid
// x_i = -L/2 + i*h, the map between FFTW bins and coefficients of
// exp(i*(2*pi/L)*xi.x) is a (-1)^(sum of bin indices) twist, applied here in
// both directions.  Integer wavevectors xi_j live in [-N/2, N/2]; the two
// Nyquist labels +-N/2 are the same stored bin.
//
// Parseval with this normalization: h^d * sum f^2 = L^d * sum |coeff|^2.
//
// Plans are FFTW_ESTIMATE|FFTW_UNALIGNED, created once per (d, N) under a
// lock and then shared read-only; execution on distinct buffers is safe
// concurrently.

#pragma once

#include <complex>
#include <map>
#include <mutex>
#include <vector>

#include <fftw3.h>

#include "fraclab/errors.hpp"
#include "fraclab/grid.hpp"

namespace fraclab {

using cplx = std::complex<double>;

struct Spectrum {
    GridSpec spec;
    std::vector<cplx> coeff; // FFTW bin order, row-major

    Spectrum() = default;
    explicit Spectrum(const GridSpec& s) : spec(s), coeff(s.size(), cplx(0.0)) {}

    std::size_t size() const { return coeff.size(); }

    // Bin index -> integer wavevector component (Nyquist mapped to +N/2).
    int wavenumber(int bin) const { return bin <= spec.n / 2 ? bin : bin - spec.n; }

    std::array<int, 2> wavevector(std::size_t flat) const {
        if (spec.dim == 1) return {wavenumber(static_cast<int>(flat)), 0};
        return {wavenumber(static_cast<int>(flat) / spec.n),
                wavenumber(static_cast<int>(flat) % spec.n)};
    }

    std::size_t bin_of(int xi0, int xi1 = 0) const {
        auto wrap = [this](int k) { return ((k % spec.n) + spec.n) % spec.n; };
        return spec.dim == 1 ? static_cast<std::size_t>(wrap(xi0))
                             : static_cast<std::size_t>(wrap(xi0)) * spec.n + wrap(xi1);
    }

    cplx operator()(int xi0, int xi1 = 0) const { return coeff[bin_of(xi0, xi1)]; }
    cplx& operator()(int xi0, int xi1 = 0) { return coeff[bin_of(xi0, xi1)]; }
};

namespace detail {

class FftPlans {
  public:
    static FftPlans& instance() {
        static FftPlans p;
        return p;
    }

    struct Entry {
        fftw_plan fwd = nullptr;
        fftw_plan bwd = nullptr;
    };

    const Entry& get(int dim, int n) {
        std::lock_guard<std::mutex> lock(mutex_);
        auto key = std::make_pair(dim, n);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;

        const std::size_t total = dim == 1 ? static_cast<std::size_t>(n)
                                           : static_cast<std::size_t>(n) * n;
        fftw_complex* a = fftw_alloc_complex(total);
        fftw_complex* b = fftw_alloc_complex(total);
        Entry e;
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        if (dim == 1) {
            e.fwd = fftw_plan_dft_1d(n, a, b, FFTW_FORWARD, flags);
            e.bwd = fftw_plan_dft_1d(n, a, b, FFTW_BACKWARD, flags);
        } else {
            e.fwd = fftw_plan_dft_2d(n, n, a, b, FFTW_FORWARD, flags);
            e.bwd = fftw_plan_dft_2d(n, n, a, b, FFTW_BACKWARD, flags);
        }
        fftw_free(a);
        fftw_free(b);
        return plans_.emplace(key, e).first->second;
    }

  private:
    FftPlans() = default;
    std::mutex mutex_;
    std::map<std::pair<int, int>, Entry> plans_;
};

inline fftw_complex* as_fftw(std::vector<cplx>& v) {
    return reinterpret_cast<fftw_complex*>(v.data());
}

inline void raw_fft(const GridSpec& spec, std::vector<cplx>& inout, bool forward) {
    const auto& e = FftPlans::instance().get(spec.dim, spec.n);
    std::vector<cplx> out(inout.size());
    fftw_execute_dft(forward ? e.fwd : e.bwd, as_fftw(inout), as_fftw(out));
    inout.swap(out);
}

// Parity of the sum of bin indices: the centered-grid phase twist.
inline double twist(const GridSpec& spec, std::size_t flat) {
    int s = spec.dim == 1 ? static_cast<int>(flat)
                          : static_cast<int>(flat / spec.n) + static_cast<int>(flat % spec.n);
    return (s & 1) ? -1.0 : 1.0;
}

} // namespace detail

inline Spectrum forward_transform(const ScalarField& f) {
    f.spec.validate();
    f.require_finite();
    Spectrum s(f.spec);
    for (std::size_t i = 0; i < f.size(); ++i) s.coeff[i] = f.values[i];
    detail::raw_fft(f.spec, s.coeff, true);
    const double scale = 1.0 / static_cast<double>(f.size());
    for (std::size_t i = 0; i < s.size(); ++i)
        s.coeff[i] *= scale * detail::twist(f.spec, i);
    return s;
}

// Largest |coeff(-xi) - conj(coeff(xi))| relative to the largest coefficient.
inline double hermitian_defect(const Spectrum& s) {
    double mx = 0.0, defect = 0.0;
    for (const auto& c : s.coeff) mx = std::max(mx, std::abs(c));
    if (mx == 0.0) return 0.0;
    const int n = s.spec.n;
    auto conj_bin = [n](int b) { return (n - b) % n; };
    for (std::size_t i = 0; i < s.size(); ++i) {
        std::size_t j;
        if (s.spec.dim == 1) {
            j = conj_bin(static_cast<int>(i));
        } else {
            j = static_cast<std::size_t>(conj_bin(static_cast<int>(i) / n)) * n +
                conj_bin(static_cast<int>(i) % n);
        }
        defect = std::max(defect, std::abs(s.coeff[j] - std::conj(s.coeff[i])));
    }
    return defect / mx;
}

inline ScalarField inverse_transform(const Spectrum& s, double hermitian_tol = 1e-12) {
    if (hermitian_defect(s) > hermitian_tol)
        throw NonHermitianSpectrum("symmetry defect exceeds tolerance");
    std::vector<cplx> buf(s.coeff);
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] *= detail::twist(s.spec, i);
    detail::raw_fft(s.spec, buf, false);
    ScalarField f(s.spec);
    double max_im = 0.0, max_re = 0.0;
    for (std::size_t i = 0; i < buf.size(); ++i) {
        f.values[i] = buf[i].real();
        max_im = std::max(max_im, std::abs(buf[i].imag()));
        max_re = std::max(max_re, std::abs(buf[i].real()));
    }
    if (max_re > 0.0 && max_im > 1e-10 * std::max(max_re, 1.0))
        throw NonHermitianSpectrum("imaginary residue above tolerance");
    return f;
}

// |h^d sum f^2 - L^d sum|coeff|^2| / (h^d sum f^2); 0 for the zero field.
inline double parseval_residual(const ScalarField& f, const Spectrum& s) {
    const double hd = std::pow(f.spec.spacing(), f.spec.dim);
    const double Ld = std::pow(f.spec.box, f.spec.dim);
    double phys = 0.0, spec = 0.0;
    for (double v : f.values) phys += v * v;
    for (const auto& c : s.coeff) spec += std::norm(c);
    phys *= hd;
    spec *= Ld;
    if (phys == 0.0) return std::abs(spec);
    return std::abs(phys - spec) / phys;
}

// ---------------------------------------------------------------------------
// Symbol application.  fn receives the integer wavevector; multipliers that
// are odd in xi must vanish on the Nyquist bins to keep output real, which is
// what zero_nyquist enforces.

template <class Fn>
Spectrum apply_symbol(const Spectrum& s, Fn&& fn, bool zero_nyquist = false) {
    Spectrum out = s;
    const int nyq = s.spec.n / 2;
    for (std::size_t i = 0; i < out.size(); ++i) {
        auto xi = s.wavevector(i);
        if (zero_nyquist && (xi[0] == nyq || (s.spec.dim == 2 && xi[1] == nyq))) {
            out.coeff[i] = 0.0;
            continue;
        }
        out.coeff[i] *= fn(xi);
    }
    return out;
}

inline double k0(const GridSpec& spec) { return two_pi / spec.box; }

inline Spectrum derivative_spectrum(const Spectrum& s, int axis) {
    if (axis < 0 || axis >= s.spec.dim) throw DimensionMismatch("derivative axis");
    const double scale = k0(s.spec);
    return apply_symbol(
        s, [&](const std::array<int, 2>& xi) { return cplx(0.0, scale * xi[axis]); }, true);
}

inline ScalarField derivative(const ScalarField& f, int axis) {
    return inverse_transform(derivative_spectrum(forward_transform(f), axis));
}

inline VectorField gradient(const ScalarField& f) {
    VectorField g(f.spec);
    Spectrum s = forward_transform(f);
    for (int ax = 0; ax < f.spec.dim; ++ax)
        g.comp[ax] = inverse_transform(derivative_spectrum(s, ax));
    return g;
}

// Shift samples: result(x) = original(x + delta).  Nyquist bins are dropped
// (no symmetric way to translate them); band-limited data is unaffected.
inline Spectrum shift_spectrum(const Spectrum& s, const std::array<double, 2>& delta) {
    const double scale = k0(s.spec);
    return apply_symbol(
        s,
        [&](const std::array<int, 2>& xi) {
            double phase = scale * (xi[0] * delta[0] + (s.spec.dim == 2 ? xi[1] * delta[1] : 0.0));
            return std::polar(1.0, phase);
        },
        true);
}

// Trig-interpolant value, gradient and Hessian at an arbitrary point.
struct PointJet {
    double value = 0.0;
    std::array<double, 2> grad{0.0, 0.0};
    std::array<std::array<double, 2>, 2> hess{{{0.0, 0.0}, {0.0, 0.0}}};
};

inline PointJet evaluate_jet(const Spectrum& s, const std::array<double, 2>& x) {
    PointJet jet;
    const double scale = k0(s.spec);
    for (std::size_t i = 0; i < s.size(); ++i) {
        const auto xi = s.wavevector(i);
        const double kx = scale * xi[0], ky = s.spec.dim == 2 ? scale * xi[1] : 0.0;
        const cplx e = std::polar(1.0, kx * x[0] + ky * x[1]) * s.coeff[i];
        jet.value += e.real();
        jet.grad[0] += -kx * e.imag();
        jet.grad[1] += -ky * e.imag();
        jet.hess[0][0] += -kx * kx * e.real();
        jet.hess[0][1] += -kx * ky * e.real();
        jet.hess[1][1] += -ky * ky * e.real();
    }
    jet.hess[1][0] = jet.hess[0][1];
    return jet;
}

namespace detail {

// Unchecked forward: NaNs pass through (the solver reports blow-up itself
// instead of tripping the InvalidField gate of the public transform).
inline Spectrum fft_of_real(const ScalarField& f) {
    Spectrum s(f.spec);
    for (std::size_t i = 0; i < f.size(); ++i) s.coeff[i] = f.values[i];
    raw_fft(f.spec, s.coeff, true);
    const double scale = 1.0 / static_cast<double>(f.size());
    for (std::size_t i = 0; i < s.size(); ++i) s.coeff[i] *= scale * twist(f.spec, i);
    return s;
}

// Unchecked inverse: solver-internal fast path.  The public
// inverse_transform adds the Hermitian-symmetry and residue gates.
inline ScalarField ifft_real(const Spectrum& s) {
    std::vector<cplx> buf(s.coeff);
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] *= twist(s.spec, i);
    raw_fft(s.spec, buf, false);
    ScalarField f(s.spec);
    for (std::size_t i = 0; i < buf.size(); ++i) f.values[i] = buf[i].real();
    return f;
}

} // namespace detail

// Circular convolution in index space: out_n = sum_p a_{n-p} b_p.
inline ScalarField circular_convolve(const ScalarField& a, const ScalarField& b) {
    if (a.spec != b.spec) throw SpecMismatch("convolution operands");
    std::vector<cplx> fa(a.values.begin(), a.values.end());
    std::vector<cplx> fb(b.values.begin(), b.values.end());
    detail::raw_fft(a.spec, fa, true);
    detail::raw_fft(b.spec, fb, true);
    for (std::size_t i = 0; i < fa.size(); ++i) fa[i] *= fb[i];
    detail::raw_fft(a.spec, fa, false);
    ScalarField out(a.spec);
    const double scale = 1.0 / static_cast<double>(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out.values[i] = fa[i].real() * scale;
    return out;
}

} // namespace fraclab
