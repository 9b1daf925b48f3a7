#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "ltft/error.hpp"
#include "ltft/quadrature.hpp"
#include "ltft/signal.hpp"
#include "ltft/window.hpp"

namespace ltft {

/// Point (x, omega, tau) in phase space. STFT and CWT families ignore tau.
struct PhasePoint {
    double x = 0.0;
    double omega = 0.0;
    double tau = 1.0;
};

/// Closed time interval.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double length() const noexcept { return hi - lo; }
    bool contains(double t) const noexcept { return t >= lo && t <= hi; }
};

enum class Band { Low, Mid, High };

inline const char* to_string(Band b) noexcept {
    switch (b) {
    case Band::Low: return "low";
    case Band::Mid: return "mid";
    case Band::High: return "high";
    }
    return "?";
}

/// Fixed transition frequencies a < b (Hz).
struct ConstantTransition {
    double a = 0.0;
    double b = 0.0;
};

/// Transition frequencies a_tau = 2 tau / j1, b_tau = 2 tau / j2 (j1 > j2 > 0), so low
/// and high atoms have tau-independent supports of length j1/2 and j2/2.
struct SupportPinnedTransition {
    double j1 = 0.0;
    double j2 = 0.0;
};

/// Measure on the oscillation axis. Probability is uniform with total mass 1;
/// Lebesgue is plain d tau (total mass tau_max - tau_min).
enum class TauMeasure { Probability, Lebesgue };

struct LTFTParams {
    double tau_min = 3.0;
    double tau_max = 8.0;
    std::variant<ConstantTransition, SupportPinnedTransition> transition = ConstantTransition{1.0, 8.0};
    Window window = Window::hann();
    TauMeasure tau_measure = TauMeasure::Probability;

    static LTFTParams constant(double tau_min, double tau_max, double a, double b) {
        LTFTParams p;
        p.tau_min = tau_min;
        p.tau_max = tau_max;
        p.transition = ConstantTransition{a, b};
        p.validate();
        return p;
    }

    void validate() const {
        require(tau_min > 0.0 && std::isfinite(tau_min), ErrorKind::InvalidParameter, "tau_min must be > 0");
        require(tau_max >= tau_min && std::isfinite(tau_max), ErrorKind::InvalidParameter,
                "tau_max must be >= tau_min");
        if (const auto* c = std::get_if<ConstantTransition>(&transition)) {
            require(c->a > 0.0 && c->a < c->b && std::isfinite(c->b), ErrorKind::InvalidParameter,
                    "transition frequencies need 0 < a < b");
        } else {
            const auto& s = std::get<SupportPinnedTransition>(transition);
            require(s.j2 > 0.0 && s.j1 > s.j2 && std::isfinite(s.j1), ErrorKind::InvalidParameter,
                    "support-pinned transition needs j1 > j2 > 0");
        }
        require(!(tau_measure == TauMeasure::Lebesgue && tau_max == tau_min), ErrorKind::InvalidParameter,
                "Lebesgue tau measure needs tau_max > tau_min");
    }

    double a(double tau) const noexcept {
        if (const auto* c = std::get_if<ConstantTransition>(&transition)) return c->a;
        return 2.0 * tau / std::get<SupportPinnedTransition>(transition).j1;
    }
    double b(double tau) const noexcept {
        if (const auto* c = std::get_if<ConstantTransition>(&transition)) return c->b;
        return 2.0 * tau / std::get<SupportPinnedTransition>(transition).j2;
    }

    /// Total measure of [tau_min, tau_max].
    double tau_mass() const noexcept {
        return tau_measure == TauMeasure::Probability ? 1.0 : tau_max - tau_min;
    }
    /// Density of the tau measure with respect to d tau.
    double tau_density() const noexcept {
        if (tau_max == tau_min) return 1.0;
        return tau_measure == TauMeasure::Probability ? 1.0 / (tau_max - tau_min) : 1.0;
    }

    /// Mean oscillation count under the probability measure.
    double tau_mean() const noexcept { return 0.5 * (tau_min + tau_max); }

    /// Canonical text form, used for cache keys and run logs.
    std::string canonical() const {
        std::ostringstream os;
        os.precision(17);
        os << "tau=[" << tau_min << "," << tau_max << "]";
        if (const auto* c = std::get_if<ConstantTransition>(&transition))
            os << ";constant(a=" << c->a << ",b=" << c->b << ")";
        else {
            const auto& s = std::get<SupportPinnedTransition>(transition);
            os << ";pinned(j1=" << s.j1 << ",j2=" << s.j2 << ")";
        }
        os << ";measure=" << (tau_measure == TauMeasure::Probability ? "probability" : "lebesgue");
        if (window.kind() == Window::Kind::Hann)
            os << ";window=hann";
        else {
            os << ";window=table(";
            for (double v : window.table_values()) os << v << ' ';
            os << ")";
        }
        return os.str();
    }
};

/// Band of frequency omega at oscillation count tau. The seams |w| = a and |w| = b belong to Mid.
inline Band atom_band(double omega, double tau, const LTFTParams& params) noexcept {
    const double w = std::abs(omega);
    if (w < params.a(tau)) return Band::Low;
    if (w <= params.b(tau)) return Band::Mid;
    return Band::High;
}

/// Dilation scale c of the band: a_tau, |omega| or b_tau.
inline double band_scale(double omega, double tau, const LTFTParams& params) noexcept {
    switch (atom_band(omega, tau, params)) {
    case Band::Low: return params.a(tau);
    case Band::Mid: return std::abs(omega);
    case Band::High: return params.b(tau);
    }
    return params.a(tau);
}

namespace detail {

/// Hann-windowed exponential amp * h(k (t - x)) * exp(2 pi i w (t - x)) sampled at
/// t_q = t0 + q / rate, using rotation recurrences re-anchored every 64 steps.
inline void sample_hann_exponential(double amp, double k, double omega, double t0, double rate,
                                    std::span<cplx> out) {
    const double two_pi = 2.0 * std::numbers::pi;
    const double step = 1.0 / rate;
    cplx win, ph, win_step = std::polar(1.0, two_pi * k * step), ph_step = std::polar(1.0, two_pi * omega * step);
    for (std::size_t q = 0; q < out.size(); ++q) {
        const double u = t0 + static_cast<double>(q) * step;
        if ((q & 63u) == 0) {
            win = std::polar(1.0, two_pi * k * u);
            ph = std::polar(1.0, two_pi * omega * u);
        }
        const double ku = k * u;
        const double h = (ku < -0.5 || ku > 0.5) ? 0.0 : 0.5 * (1.0 + win.real());
        out[q] = amp * h * ph;
        win *= win_step;
        ph *= ph_step;
    }
}

template <typename Eval>
void sample_generic(Eval&& eval, double t0, double rate, std::span<cplx> out) {
    for (std::size_t q = 0; q < out.size(); ++q) out[q] = eval(t0 + static_cast<double>(q) / rate);
}

}  // namespace detail

/// Localizing time-frequency transform atoms: STFT atoms below a_tau and above b_tau,
/// wavelet-like atoms with tau oscillations in between.
class LtftFrame {
public:
    explicit LtftFrame(LTFTParams params) : params_(std::move(params)), window_energy_(params_.window.energy()) {
        params_.validate();
    }

    const LTFTParams& params() const noexcept { return params_; }

    double scale(const PhasePoint& p) const noexcept { return band_scale(p.omega, p.tau, params_); }

    /// Half-length of the atom's time support.
    double half_support(const PhasePoint& p) const noexcept { return 0.5 * p.tau / scale(p); }

    Interval support(const PhasePoint& p) const noexcept {
        const double hs = half_support(p);
        return {p.x - hs, p.x + hs};
    }

    cplx eval(const PhasePoint& p, double t) const {
        const double k = scale(p) / p.tau;
        const double u = t - p.x;
        return std::sqrt(k) * params_.window.eval(k * u) * std::polar(1.0, 2.0 * std::numbers::pi * p.omega * u);
    }

    /// Frequency-domain atom sqrt(tau/c) ĥ((tau/c)(z - omega)) exp(-2 pi i x z).
    cplx ft(const PhasePoint& p, double z) const {
        const double inv_k = p.tau / scale(p);
        return std::sqrt(inv_k) * params_.window.ft(inv_k * (z - p.omega)) *
               std::polar(1.0, -2.0 * std::numbers::pi * p.x * z);
    }

    /// Atom centred at x = 0 sampled at offsets u_q = u0 + q / rate.
    void sample_centered(const PhasePoint& p, double u0, double rate, std::span<cplx> out) const {
        const double k = scale(p) / p.tau;
        if (params_.window.kind() == Window::Kind::Hann) {
            detail::sample_hann_exponential(std::sqrt(k), k, p.omega, u0, rate, out);
            return;
        }
        PhasePoint c = p;
        c.x = 0.0;
        detail::sample_generic([&](double u) { return eval(c, u); }, u0, rate, out);
    }

    double atom_energy() const noexcept { return window_energy_; }

private:
    LTFTParams params_;
    double window_energy_;
};

/// Short-time Fourier transform atoms T(x) M(omega) f with f(t) = h(t / L) / ||h(./L)||.
class StftFrame {
public:
    StftFrame(Window window, double length) : window_(std::move(window)), length_(length) {
        require(length > 0.0, ErrorKind::InvalidParameter, "STFT window length must be positive");
        amp_ = 1.0 / std::sqrt(length_ * window_.energy());
    }

    double length() const noexcept { return length_; }
    double half_support(const PhasePoint&) const noexcept { return 0.5 * length_; }
    Interval support(const PhasePoint& p) const noexcept { return {p.x - 0.5 * length_, p.x + 0.5 * length_}; }

    cplx eval(const PhasePoint& p, double t) const {
        const double u = t - p.x;
        return amp_ * window_.eval(u / length_) * std::polar(1.0, 2.0 * std::numbers::pi * p.omega * u);
    }

    cplx ft(const PhasePoint& p, double z) const {
        return amp_ * length_ * window_.ft(length_ * (z - p.omega)) *
               std::polar(1.0, -2.0 * std::numbers::pi * p.x * z);
    }

    void sample_centered(const PhasePoint& p, double u0, double rate, std::span<cplx> out) const {
        if (window_.kind() == Window::Kind::Hann) {
            detail::sample_hann_exponential(amp_, 1.0 / length_, p.omega, u0, rate, out);
            return;
        }
        PhasePoint c = p;
        c.x = 0.0;
        detail::sample_generic([&](double u) { return eval(c, u); }, u0, rate, out);
    }

    double atom_energy() const noexcept { return 1.0; }

private:
    Window window_;
    double length_;
    double amp_;
};

/// Admissible mother wavelet f(t) = (exp(2 pi i nu t) - ĥ(nu)/ĥ(0)) h(t), normalized
/// so that its admissibility constant is 1. Supported on [-1/2, 1/2].
class MotherWavelet {
public:
    explicit MotherWavelet(double nu = 2.0, Window window = Window::hann()) : nu_(nu), window_(std::move(window)) {
        dc_ratio_ = window_.ft(nu_) / window_.ft(0.0);
        norm_ = 1.0;
        norm_ = 1.0 / std::sqrt(admissibility());
    }

    double nu() const noexcept { return nu_; }
    double half_support() const noexcept { return 0.5; }
    double normalization() const noexcept { return norm_; }

    cplx eval(double t) const {
        return norm_ * (std::polar(1.0, 2.0 * std::numbers::pi * nu_ * t) - dc_ratio_) * window_.eval(t);
    }

    cplx ft(double z) const { return norm_ * (window_.ft(z - nu_) - dc_ratio_ * window_.ft(z)); }

    /// A_f = integral of |f̂(v)|^2 / |v| over the real line.
    double admissibility() const {
        auto integrand = [this](double v) { return v == 0.0 ? 0.0 : std::norm(ft(v)) / std::abs(v); };
        const double horizon = nu_ + window_.ft_horizon();
        return composite_gauss_legendre(integrand, -horizon, 0.0, static_cast<int>(4 * horizon)) +
               composite_gauss_legendre(integrand, 0.0, horizon, static_cast<int>(4 * horizon));
    }

    /// ||f||_2^2 by quadrature.
    double energy() const {
        return composite_gauss_legendre([this](double t) { return std::norm(eval(t)); }, -0.5, 0.5, 16);
    }

private:
    double nu_;
    Window window_;
    double dc_ratio_ = 0.0;
    double norm_ = 1.0;
};

/// Continuous wavelet atoms T(x) D(1/omega) f parametrized by frequency omega != 0.
class CwtFrame {
public:
    explicit CwtFrame(MotherWavelet mw = MotherWavelet{}) : mw_(std::move(mw)) {}

    const MotherWavelet& mother() const noexcept { return mw_; }

    static void check(const PhasePoint& p) {
        require(p.omega != 0.0 && std::isfinite(p.omega), ErrorKind::InvalidParameter,
                "CWT atoms need omega != 0");
    }

    double half_support(const PhasePoint& p) const { return mw_.half_support() / std::abs(p.omega); }
    Interval support(const PhasePoint& p) const {
        check(p);
        const double hs = half_support(p);
        return {p.x - hs, p.x + hs};
    }

    cplx eval(const PhasePoint& p, double t) const {
        check(p);
        return std::sqrt(std::abs(p.omega)) * mw_.eval(p.omega * (t - p.x));
    }

    cplx ft(const PhasePoint& p, double z) const {
        check(p);
        return mw_.ft(z / p.omega) / std::sqrt(std::abs(p.omega)) *
               std::polar(1.0, -2.0 * std::numbers::pi * p.x * z);
    }

    void sample_centered(const PhasePoint& p, double u0, double rate, std::span<cplx> out) const {
        check(p);
        PhasePoint c = p;
        c.x = 0.0;
        detail::sample_generic([&](double u) { return eval(c, u); }, u0, rate, out);
    }

    double atom_energy() const { return mw_.energy(); }

private:
    MotherWavelet mw_;
};

/// Sample-index range [first, last] of a signal grid lying inside `support`.
/// Empty when first > last.
inline std::pair<long, long> grid_range(const Interval& support, double origin, double rate, std::size_t size) {
    const long first = std::max(0L, static_cast<long>(std::ceil((support.lo - origin) * rate - 1e-9)));
    const long last = std::min(static_cast<long>(size) - 1, static_cast<long>(std::floor((support.hi - origin) * rate + 1e-9)));
    return {first, last};
}

/// Atom of `frame` at `p` sampled on the grid of `s`, restricted to its support.
/// Returns the first grid index and fills `buffer`.
template <typename Frame>
long sample_atom_on_grid(const Frame& frame, const PhasePoint& p, double origin, double rate, std::size_t size,
                         std::vector<cplx>& buffer) {
    const auto [first, last] = grid_range(frame.support(p), origin, rate, size);
    if (first > last) {
        buffer.clear();
        return first;
    }
    buffer.resize(static_cast<std::size_t>(last - first + 1));
    const double u0 = origin + static_cast<double>(first) / rate - p.x;
    frame.sample_centered(p, u0, rate, buffer);
    return first;
}

/// V_f[s](p) = <s, f_p> by the rectangle rule at the signal rate over the atom support.
template <typename Frame>
cplx analysis_coeff(const Signal& s, const Frame& frame, const PhasePoint& p, std::vector<cplx>& scratch) {
    const long first = sample_atom_on_grid(frame, p, s.origin, s.rate, s.size(), scratch);
    cplx acc{};
    for (std::size_t q = 0; q < scratch.size(); ++q)
        acc += s.samples[static_cast<std::size_t>(first) + q] * std::conj(scratch[q]);
    return acc / s.rate;
}

template <typename Frame>
cplx analysis_coeff(const Signal& s, const Frame& frame, const PhasePoint& p) {
    std::vector<cplx> scratch;
    return analysis_coeff(s, frame, p, scratch);
}

/// Convenience wrappers mirroring the per-family atom operations.
inline cplx eval_ltft_atom(const PhasePoint& p, const LTFTParams& params, double t) {
    return LtftFrame(params).eval(p, t);
}
inline Interval atom_support(const PhasePoint& p, const LTFTParams& params) { return LtftFrame(params).support(p); }
inline cplx eval_atom_ft(const PhasePoint& p, const LTFTParams& params, double z) {
    return LtftFrame(params).ft(p, z);
}

}  // namespace ltft
