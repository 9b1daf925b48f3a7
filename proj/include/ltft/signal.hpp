#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <mutex>
#include <numbers>
#include <span>
#include <vector>

#include <fftw3.h>

#include "ltft/error.hpp"

namespace ltft {

using cplx = std::complex<double>;

/// Uniformly sampled signal. Sample n sits at time origin + n / rate.
struct Signal {
    std::vector<cplx> samples;
    double rate = 1.0;
    double origin = 0.0;

    Signal() = default;
    Signal(std::vector<cplx> s, double r, double o) : samples(std::move(s)), rate(r), origin(o) { validate(); }

    /// Signal centered on [-(N-1)/(2R), (N-1)/(2R)], i.e. M+1 samples on [-M/(2R), M/(2R)].
    static Signal centered(std::vector<cplx> s, double rate) {
        const double origin = -static_cast<double>(s.size() - 1) / (2.0 * rate);
        return Signal(std::move(s), rate, origin);
    }

    static Signal zeros(std::size_t n, double rate, double origin) {
        return Signal(std::vector<cplx>(n, cplx{}), rate, origin);
    }

    void validate() const {
        require(rate > 0.0 && std::isfinite(rate), ErrorKind::InvalidParameter, "signal rate must be positive");
        require(!samples.empty(), ErrorKind::InvalidParameter, "signal needs at least one sample");
    }

    std::size_t size() const noexcept { return samples.size(); }
    double time(std::size_t n) const noexcept { return origin + static_cast<double>(n) / rate; }
    double end_time() const noexcept { return time(samples.size() - 1); }
    double duration() const noexcept { return static_cast<double>(samples.size() - 1) / rate; }

    /// ||s||_2^2 = (1/R) sum |s_n|^2.
    double energy() const noexcept {
        double acc = 0.0;
        for (const auto& v : samples) acc += std::norm(v);
        return acc / rate;
    }
    double norm() const noexcept { return std::sqrt(energy()); }

    bool is_real() const noexcept {
        return std::all_of(samples.begin(), samples.end(), [](const cplx& v) { return v.imag() == 0.0; });
    }
};

inline Signal operator-(const Signal& a, const Signal& b) {
    require(a.size() == b.size(), ErrorKind::InvalidParameter, "signal length mismatch");
    Signal out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out.samples[i] -= b.samples[i];
    return out;
}

/// ||a - b|| / ||b||, with 0 when both vanish.
inline double relative_error(const Signal& a, const Signal& reference) {
    const double ref = reference.norm();
    const double diff = (a - reference).norm();
    if (ref == 0.0) return diff == 0.0 ? 0.0 : INFINITY;
    return diff / ref;
}

/// Sampled surrogate of the continuous Fourier transform on the DFT grid.
///
/// Bin i holds ŝ(z_i) with z_i = (first_bin + i) * bin_hz, bin_hz = rate / N,
/// covering [-R/2, R/2). The time origin is folded into the phase so that the
/// values approximate the continuous transform of the signal in place.
struct Spectrum {
    std::vector<cplx> bins;
    double bin_hz = 1.0;
    long first_bin = 0;
    double rate = 1.0;    // sample rate of the underlying signal
    double origin = 0.0;  // time origin of the underlying signal

    std::size_t size() const noexcept { return bins.size(); }
    double frequency(std::size_t i) const noexcept {
        return static_cast<double>(first_bin + static_cast<long>(i)) * bin_hz;
    }
    /// ||ŝ||_2^2 on the grid.
    double energy() const noexcept {
        double acc = 0.0;
        for (const auto& v : bins) acc += std::norm(v);
        return acc * bin_hz;
    }
    double norm() const noexcept { return std::sqrt(energy()); }
};

namespace detail {

inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

/// Unnormalized in-place complex FFT; sign = FFTW_FORWARD or FFTW_BACKWARD.
inline void fft_inplace(std::vector<cplx>& data, int sign) {
    const int n = static_cast<int>(data.size());
    auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
    fftw_plan plan;
    {
        std::lock_guard lock(fftw_planner_mutex());
        plan = fftw_plan_dft_1d(n, ptr, ptr, sign, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
}

inline long first_centered_bin(std::size_t n) noexcept { return -static_cast<long>(n / 2); }

}  // namespace detail

inline Spectrum dft(const Signal& s) {
    s.validate();
    const std::size_t n = s.size();
    std::vector<cplx> work = s.samples;
    detail::fft_inplace(work, FFTW_FORWARD);

    Spectrum sp;
    sp.bin_hz = s.rate / static_cast<double>(n);
    sp.first_bin = detail::first_centered_bin(n);
    sp.rate = s.rate;
    sp.origin = s.origin;
    sp.bins.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const long k = sp.first_bin + static_cast<long>(i);
        const auto idx = static_cast<std::size_t>((k % static_cast<long>(n) + static_cast<long>(n)) %
                                                  static_cast<long>(n));
        const double z = static_cast<double>(k) * sp.bin_hz;
        sp.bins[i] = work[idx] * std::polar(1.0 / s.rate, -2.0 * std::numbers::pi * z * s.origin);
    }
    return sp;
}

inline Signal idft(const Spectrum& sp) {
    const std::size_t n = sp.size();
    require(n >= 1, ErrorKind::InvalidParameter, "empty spectrum");
    std::vector<cplx> work(n);
    for (std::size_t i = 0; i < n; ++i) {
        const long k = sp.first_bin + static_cast<long>(i);
        const auto idx = static_cast<std::size_t>((k % static_cast<long>(n) + static_cast<long>(n)) %
                                                  static_cast<long>(n));
        const double z = sp.frequency(i);
        work[idx] = sp.bins[i] * std::polar(1.0, 2.0 * std::numbers::pi * z * sp.origin);
    }
    detail::fft_inplace(work, FFTW_BACKWARD);
    for (auto& v : work) v *= sp.bin_hz;
    return Signal(std::move(work), sp.rate, sp.origin);
}

/// Continuous-frequency rectangle-rule transform (1/R) sum s_n exp(-2 pi i z t_n).
inline cplx dtft(const Signal& s, double z) {
    cplx acc{};
    for (std::size_t n = 0; n < s.size(); ++n)
        acc += s.samples[n] * std::polar(1.0, -2.0 * std::numbers::pi * z * s.time(n));
    return acc / s.rate;
}

/// Multiply the spectrum pointwise by gain(z) and transform back.
template <typename Gain>
Signal filter_spectrum(const Signal& s, Gain&& gain) {
    Spectrum sp = dft(s);
    for (std::size_t i = 0; i < sp.size(); ++i) sp.bins[i] *= gain(sp.frequency(i));
    return idft(sp);
}

/// [T(x)s](t) = s(t - x). Integer sample shifts are exact circular index shifts;
/// other shifts use a frequency-domain phase ramp (exact for band-limited signals).
inline Signal translate(const Signal& s, double x) {
    const double shift = x * s.rate;
    const double rounded = std::round(shift);
    if (std::abs(shift - rounded) < 1e-9) {
        const long n = static_cast<long>(s.size());
        const long k = ((static_cast<long>(rounded) % n) + n) % n;
        Signal out = s;
        std::rotate(out.samples.begin(), out.samples.begin() + (n - k), out.samples.end());
        return out;
    }
    return filter_spectrum(s, [x](double z) { return std::polar(1.0, -2.0 * std::numbers::pi * z * x); });
}

/// [M(w)s](t) = s(t) exp(2 pi i w t).
inline Signal modulate(const Signal& s, double omega) {
    Signal out = s;
    for (std::size_t n = 0; n < out.size(); ++n)
        out.samples[n] *= std::polar(1.0, 2.0 * std::numbers::pi * omega * s.time(n));
    return out;
}

/// [D(tau)s](t) = |tau|^{-1/2} s(t / tau), evaluated through the band-limited
/// interpolant of s on the same grid. Points mapping outside the sampled span are 0.
inline Signal dilate(const Signal& s, double tau) {
    require(tau != 0.0 && std::isfinite(tau), ErrorKind::InvalidParameter, "dilation factor must be non-zero");
    const Spectrum sp = dft(s);
    const double lo = s.origin - 0.5 / s.rate;
    const double hi = s.end_time() + 0.5 / s.rate;
    const double scale = 1.0 / std::sqrt(std::abs(tau));
    Signal out = Signal::zeros(s.size(), s.rate, s.origin);
    for (std::size_t n = 0; n < out.size(); ++n) {
        const double t = s.time(n) / tau;
        if (t < lo || t > hi) continue;
        cplx acc{};
        for (std::size_t i = 0; i < sp.size(); ++i)
            acc += sp.bins[i] * std::polar(1.0, 2.0 * std::numbers::pi * sp.frequency(i) * t);
        out.samples[n] = acc * sp.bin_hz * scale;
    }
    return out;
}

/// Band-limited upsampling by an integer factor: same origin, rate * factor,
/// size * factor samples, interpolating the original samples. For even sizes the
/// Nyquist bin is split between -R/2 and +R/2.
inline Signal upsample(const Signal& s, int factor) {
    require(factor >= 1, ErrorKind::InvalidParameter, "upsampling factor must be >= 1");
    if (factor == 1) return s;
    const Spectrum sp = dft(s);
    const std::size_t n = s.size();
    const std::size_t nf = n * static_cast<std::size_t>(factor);
    Spectrum fine;
    fine.bin_hz = sp.bin_hz;
    fine.first_bin = detail::first_centered_bin(nf);
    fine.rate = s.rate * factor;
    fine.origin = s.origin;
    fine.bins.assign(nf, cplx{});
    for (std::size_t i = 0; i < n; ++i) {
        const long k = sp.first_bin + static_cast<long>(i);
        cplx v = sp.bins[i];
        if (n % 2 == 0 && k == sp.first_bin) {
            // split the Nyquist bin; the +R/2 half carries the phase that makes both
            // halves agree on the coarse grid
            v *= 0.5;
            fine.bins[static_cast<std::size_t>(-k - fine.first_bin)] +=
                v * std::polar(1.0, -2.0 * std::numbers::pi * s.rate * s.origin);
        }
        fine.bins[static_cast<std::size_t>(k - fine.first_bin)] += v;
    }
    return idft(fine);
}

/// Projection of a fine-grid signal onto the coarse grid band [-R/2, R/2):
/// keeps the coarse bins of the fine spectrum. Inverse of `upsample` on its range.
inline Signal downsample(const Signal& fine, int factor) {
    require(factor >= 1, ErrorKind::InvalidParameter, "downsampling factor must be >= 1");
    if (factor == 1) return fine;
    require(fine.size() % static_cast<std::size_t>(factor) == 0, ErrorKind::InvalidParameter,
            "fine signal length must be a multiple of the factor");
    const Spectrum sp = dft(fine);
    const std::size_t n = fine.size() / static_cast<std::size_t>(factor);
    Spectrum coarse;
    coarse.bin_hz = sp.bin_hz;
    coarse.first_bin = detail::first_centered_bin(n);
    coarse.rate = fine.rate / factor;
    coarse.origin = fine.origin;
    coarse.bins.assign(n, cplx{});
    for (std::size_t i = 0; i < n; ++i) {
        const long k = coarse.first_bin + static_cast<long>(i);
        coarse.bins[i] = sp.bins[static_cast<std::size_t>(k - sp.first_bin)];
        if (n % 2 == 0 && k == coarse.first_bin)
            coarse.bins[i] += sp.bins[static_cast<std::size_t>(-k - sp.first_bin)] *
                              std::polar(1.0, 2.0 * std::numbers::pi * coarse.rate * fine.origin);
    }
    return idft(coarse);
}

/// 2 Re(s): the real signal whose positive-frequency half is s.
inline Signal fold_positive_frequencies(const Signal& s) {
    Signal out = s;
    for (auto& v : out.samples) v = cplx(2.0 * v.real(), 0.0);
    return out;
}

}  // namespace ltft
