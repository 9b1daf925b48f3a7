#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "ltft/error.hpp"
#include "ltft/frame_filter.hpp"
#include "ltft/frames.hpp"
#include "ltft/quadrature.hpp"
#include "ltft/signal.hpp"
#include "ltft/window.hpp"

namespace ltft {

/// Finite-measure sampling domain. The time extent may widen as 1/|omega|:
/// |x - x_center| <= x_half + x_slope / |omega|. Frequencies are (omega_lo, omega_hi]
/// or, when symmetric, omega_lo < |omega| < omega_hi. The tau axis carries tau_mass.
struct PhaseDomain {
    double x_center = 0.0;
    double x_half = 0.0;
    double x_slope = 0.0;
    double omega_lo = 0.0;
    double omega_hi = 0.0;
    bool symmetric = false;
    double tau_min = 1.0;
    double tau_max = 1.0;
    double tau_mass = 1.0;
    // resolution and oversampling the domain was built for (reporting only)
    double M = 0.0;
    double W = 0.0;

    void validate() const {
        require(omega_hi > omega_lo && std::isfinite(omega_hi) && std::isfinite(omega_lo),
                ErrorKind::InvalidParameter, "domain frequency range is empty");
        require(x_half >= 0.0 && x_slope >= 0.0 && (x_half > 0.0 || x_slope > 0.0), ErrorKind::InvalidParameter,
                "domain time range is empty");
        require(x_slope == 0.0 || omega_lo > 0.0, ErrorKind::InvalidParameter,
                "an omega-dependent time extent needs omega_lo > 0");
        require(!symmetric || omega_lo >= 0.0, ErrorKind::InvalidParameter, "symmetric domains need omega_lo >= 0");
        require(tau_max >= tau_min && tau_mass > 0.0, ErrorKind::InvalidParameter, "domain tau range is invalid");
    }

    double x_extent(double omega) const noexcept { return x_half + (x_slope > 0.0 ? x_slope / std::abs(omega) : 0.0); }

    /// Measure under Lebesgue x, Lebesgue omega and the tau measure.
    double measure() const {
        double one_side = 2.0 * x_half * (omega_hi - omega_lo);
        if (x_slope > 0.0) one_side += 2.0 * x_slope * std::log(omega_hi / omega_lo);
        return one_side * (symmetric ? 2.0 : 1.0) * tau_mass;
    }

    bool contains(const PhasePoint& p) const noexcept {
        const double w = symmetric ? std::abs(p.omega) : p.omega;
        if (symmetric ? !(w > omega_lo && w < omega_hi) : !(w > omega_lo && w <= omega_hi)) return false;
        if (std::abs(p.x - x_center) > x_extent(p.omega)) return false;
        return p.tau >= tau_min && p.tau <= tau_max;
    }

    /// Frequencies covered, as disjoint intervals.
    std::vector<Interval> omega_set() const {
        if (!symmetric) return {{omega_lo, omega_hi}};
        if (omega_lo == 0.0) return {{-omega_hi, omega_hi}};
        return {{-omega_hi, -omega_lo}, {omega_lo, omega_hi}};
    }

    /// Same domain with the frequency range scaled by `factor` (upper bound up, lower bound down).
    PhaseDomain widened(double factor) const {
        PhaseDomain d = *this;
        d.omega_hi *= factor;
        d.omega_lo /= factor;
        d.W *= factor;
        return d;
    }
};

/// Largest half-support over all LTFT atoms with the given parameters.
inline double max_half_support(const LTFTParams& params) {
    const QuadratureNodes q = composite_gauss_nodes(params.tau_min, params.tau_max, 1);
    double best = 0.5 * std::max(params.tau_min / params.a(params.tau_min), params.tau_max / params.a(params.tau_max));
    for (double t : q.nodes) best = std::max(best, 0.5 * t / params.a(t));
    return best;
}

/// Practical LTFT domain: x within M/(2R) + tau_2/a_{tau_2} of 0, omega in (0, RW/2]
/// (or |omega| < RW/2 when two-sided), tau in [tau_1, tau_2].
inline PhaseDomain ltft_domain(double M, double rate, double W, const LTFTParams& params, bool two_sided = false) {
    require(M >= 1.0 && rate > 0.0, ErrorKind::InvalidParameter, "ltft_domain needs M >= 1 and R > 0");
    require(W >= 1.0 && std::isfinite(W), ErrorKind::InvalidParameter, "ltft_domain needs W >= 1");
    params.validate();
    PhaseDomain d;
    d.x_half = 0.5 * M / rate + params.tau_max / params.a(params.tau_max);
    d.omega_lo = 0.0;
    d.omega_hi = 0.5 * rate * W;
    d.symmetric = two_sided;
    d.tau_min = params.tau_min;
    d.tau_max = params.tau_max;
    d.tau_mass = params.tau_mass();
    d.M = M;
    d.W = W;
    d.validate();
    return d;
}

/// CWT domain 1/(WM) < |omega| < WM, |x| < 1/2 + S/|omega|.
inline PhaseDomain cwt_domain(double M, double W, double S) {
    require(M >= 1.0 && W > 0.0 && S > 0.0, ErrorKind::InvalidParameter, "cwt_domain needs M >= 1, W > 0, S > 0");
    PhaseDomain d;
    d.x_half = 0.5;
    d.x_slope = S;
    d.omega_lo = 1.0 / (W * M);
    d.omega_hi = W * M;
    require(d.omega_hi > d.omega_lo, ErrorKind::InvalidParameter, "cwt_domain needs WM > 1");
    d.symmetric = true;
    d.M = M;
    d.W = W;
    d.validate();
    return d;
}

/// Closed form 2(WM - 1/(WM)) + 4 S ln(W^2 M^2).
inline double cwt_domain_measure(double M, double W, double S) {
    const double wm = W * M;
    return 2.0 * (wm - 1.0 / wm) + 4.0 * S * std::log(wm * wm);
}

/// Smallest integer M0 <= m_max such that the CWT domain measure is <= 3WM for every
/// integer M in [M0, m_max].
inline long cwt_volume_threshold(double W, double S, long m_max) {
    long m0 = 1;
    for (long m = 1; m <= m_max; ++m) {
        if (W * static_cast<double>(m) <= 1.0) {
            m0 = m + 1;
            continue;
        }
        if (cwt_domain_measure(static_cast<double>(m), W, S) > 3.0 * W * static_cast<double>(m)) m0 = m + 1;
    }
    return m0;
}

/// One point drawn uniformly from the domain under its measure.
inline PhasePoint sample_point(const PhaseDomain& d, std::mt19937_64& rng) {
    auto u01 = [&rng] { return std::generate_canonical<double, 53>(rng); };
    double w = 0.0;
    if (d.x_slope > 0.0) {
        // mixture of the constant part (uniform omega) and the 1/omega part (log-uniform omega)
        const double flat = 2.0 * d.x_half * (d.omega_hi - d.omega_lo);
        const double slope = 2.0 * d.x_slope * std::log(d.omega_hi / d.omega_lo);
        if (u01() * (flat + slope) < flat)
            w = d.omega_lo + (d.omega_hi - d.omega_lo) * u01();
        else
            w = d.omega_lo * std::exp(std::log(d.omega_hi / d.omega_lo) * u01());
    } else if (d.symmetric && d.omega_lo == 0.0) {
        w = d.omega_hi * (2.0 * u01() - 1.0);
    } else {
        w = d.omega_hi - (d.omega_hi - d.omega_lo) * u01();  // lands in (lo, hi]
    }
    if (d.symmetric && (d.x_slope > 0.0 || d.omega_lo > 0.0) && u01() < 0.5) w = -w;
    PhasePoint p;
    p.omega = w;
    p.x = d.x_center + d.x_extent(w) * (2.0 * u01() - 1.0);
    p.tau = d.tau_min + (d.tau_max - d.tau_min) * u01();
    return p;
}

inline std::vector<PhasePoint> sample_uniform(const PhaseDomain& d, std::size_t K, std::uint64_t seed) {
    require(K >= 1, ErrorKind::InvalidParameter, "sample_uniform needs K >= 1");
    d.validate();
    std::mt19937_64 rng(seed);
    std::vector<PhasePoint> out(K);
    for (auto& p : out) p = sample_point(d, rng);
    return out;
}

// ---- truncation error ---------------------------------------------------------------

struct LVDReport {
    double M = 0.0;
    double W = 0.0;
    double psi_l1 = 0.0;          // measure of the domain
    double ratio_Cv = 0.0;        // psi_l1 / M
    double trunc_error = 0.0;     // ||V s outside domain|| / ||V s on the reference||
    double tail_fraction = 0.0;   // energy of the reference's outer half-shell / truncated energy
    bool reference_too_small = false;
};

inline void write_lvd_csv_header(std::ostream& os) { os << "M,W,psi_l1,ratio_Cv,trunc_error\n"; }
inline void write_lvd_csv_row(std::ostream& os, const LVDReport& r) {
    os << r.M << ',' << r.W << ',' << r.psi_l1 << ',' << r.ratio_Cv << ',' << r.trunc_error << '\n';
}

/// Set difference of interval lists (inputs need not be sorted; output is disjoint).
inline std::vector<Interval> interval_difference(const std::vector<Interval>& from, const std::vector<Interval>& minus) {
    std::vector<Interval> out = from;
    for (const Interval& m : minus) {
        std::vector<Interval> next;
        for (const Interval& f : out) {
            if (m.hi <= f.lo || m.lo >= f.hi) {
                next.push_back(f);
                continue;
            }
            if (f.lo < m.lo) next.push_back({f.lo, m.lo});
            if (m.hi < f.hi) next.push_back({m.hi, f.hi});
        }
        out = std::move(next);
    }
    return out;
}

/// Coefficient energy of a frame restricted to frequency sets, expressed as a weight on
/// the signal spectrum: energy(set) = Σ_k |ŝ_k|² Δz density(z_k, set).
using SpectralDensity = std::function<std::vector<double>(const std::vector<double>& zs, const std::vector<Interval>& set)>;

namespace detail {

inline LVDReport truncation_report(const Signal& s, const PhaseDomain& domain, const PhaseDomain& ref,
                                   const SpectralDensity& density) {
    const Spectrum sp = dft(s);
    std::vector<double> zs(sp.size());
    for (std::size_t i = 0; i < zs.size(); ++i) zs[i] = sp.frequency(i);
    auto energy = [&](const std::vector<Interval>& set) {
        if (set.empty()) return 0.0;
        const std::vector<double> dens = density(zs, set);
        double acc = 0.0;
        for (std::size_t i = 0; i < zs.size(); ++i) acc += std::norm(sp.bins[i]) * dens[i];
        return acc * sp.bin_hz;
    };
    const double e_ref = energy(ref.omega_set());
    const double e_out = energy(interval_difference(ref.omega_set(), domain.omega_set()));
    const PhaseDomain half = ref.widened(0.5);
    const double e_shell = energy(interval_difference(ref.omega_set(), half.omega_set()));

    LVDReport r;
    r.M = domain.M;
    r.W = domain.W;
    r.psi_l1 = domain.measure();
    r.ratio_Cv = domain.M > 0.0 ? r.psi_l1 / domain.M : 0.0;
    r.trunc_error = e_ref > 0.0 ? std::sqrt(std::clamp(e_out / e_ref, 0.0, 1.0)) : 0.0;
    r.tail_fraction = e_out > 0.0 ? e_shell / e_out : 0.0;
    r.reference_too_small = e_out > 0.0 && r.tail_fraction >= 0.1;
    return r;
}

inline void require_time_cover(const Signal& s, const PhaseDomain& d, double atom_half_support_at_lo) {
    const double need = std::max(std::abs(s.origin - d.x_center), std::abs(s.end_time() - d.x_center));
    require(d.x_half + 1e-12 >= need + atom_half_support_at_lo || d.x_slope > 0.0, ErrorKind::InvalidParameter,
            "domain time range does not cover the coefficient support of the signal");
}

}  // namespace detail

/// LTFT truncation error of `domain` relative to `ref`. The time extent of both domains must
/// cover the whole coefficient support, so the x integral is exact and only the
/// frequency truncation is measured (through restricted frame filters).
inline LVDReport truncation_ratio(const LTFTParams& params, const Signal& s, const PhaseDomain& domain,
                                  const PhaseDomain& ref, const FilterQuadrature& quad = {}) {
    const double hs = max_half_support(params);
    detail::require_time_cover(s, domain, hs);
    detail::require_time_cover(s, ref, hs);
    const SpectralEnergyTable table(params.window);
    const SpectralDensity density = [&](const std::vector<double>& zs, const std::vector<Interval>& set) {
        const auto v = integrate_filter(params, table, zs, set, quad);
        std::vector<double> out(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i].total();
        return out;
    };
    return detail::truncation_report(s, domain, ref, density);
}

/// ∫ |f̂(v)|² / |v| dv over [v1, v2] (v1 < v2, same sign).
inline double admissibility_integral(const MotherWavelet& mw, double v1, double v2) {
    if (!(v1 < v2)) return 0.0;
    const double horizon = mw.nu() + 40.0;
    v1 = std::max(v1, -horizon);
    v2 = std::min(v2, horizon);
    if (!(v1 < v2)) return 0.0;
    return adaptive_integral([&](double v) { return v == 0.0 ? 0.0 : std::norm(mw.ft(v)) / std::abs(v); }, v1, v2, 1e-9);
}

/// CWT truncation error for CWT domains (time extent 1/2 + S/|omega| covers every atom
/// overlapping a signal on [-1/2, 1/2]).
inline LVDReport cwt_truncation_ratio(const MotherWavelet& mw, const Signal& s, const PhaseDomain& domain,
                                      const PhaseDomain& ref) {
    require(domain.x_slope >= mw.half_support() && ref.x_slope >= mw.half_support(), ErrorKind::InvalidParameter,
            "CWT domain time extent must include the wavelet half-support");
    require(s.origin >= -0.5 - 1e-12 && s.end_time() <= 0.5 + 1e-12, ErrorKind::InvalidParameter,
            "CWT truncation needs a signal supported in [-1/2, 1/2]");
    const SpectralDensity density = [&](const std::vector<double>& zs, const std::vector<Interval>& set) {
        std::vector<double> out(zs.size(), 0.0);
        for (std::size_t i = 0; i < zs.size(); ++i) {
            const double z = zs[i];
            if (z == 0.0) continue;
            for (const Interval& w : set) {
                // omega in (w.lo, w.hi) maps to v = z / omega; split at omega = 0
                auto piece = [&](double lo, double hi) {
                    if (!(lo < hi)) return 0.0;
                    const double a = z / lo, b = z / hi;
                    return admissibility_integral(mw, std::min(a, b), std::max(a, b));
                };
                out[i] += piece(std::max(w.lo, 0.0), w.hi) + piece(w.lo, std::min(w.hi, 0.0));
            }
        }
        return out;
    };
    return detail::truncation_report(s, domain, ref, density);
}

// ---- enveloped trigonometric polynomials -----------------------------------------------

/// q(t) = ξ(t) Σ_{m=-M}^{M} c_m exp(2 pi i m t) on [-1/2, 1/2], sampled at `rate`
/// (round(rate) + 1 samples). coeffs[m + M] holds c_m.
inline Signal enveloped_trig_poly(const std::vector<cplx>& coeffs, const Window& xi, double rate) {
    require(coeffs.size() % 2 == 1, ErrorKind::InvalidParameter, "need 2M+1 coefficients");
    require(rate >= 1.0, ErrorKind::InvalidParameter, "rate must be >= 1");
    const long M = static_cast<long>(coeffs.size() / 2);
    const auto n = static_cast<std::size_t>(std::lround(rate)) + 1;
    Signal s = Signal::zeros(n, static_cast<double>(n - 1), -0.5);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = s.time(k);
        cplx acc{};
        for (long m = -M; m <= M; ++m)
            acc += coeffs[static_cast<std::size_t>(m + M)] * std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(m) * t);
        s.samples[k] = xi.eval(t) * acc;
    }
    return s;
}

/// Membership in the class R_C on the sample grid: ||q/ξ||_inf < C ||q||_inf and
/// ||q||_inf < C ||q||_2. Samples where ξ is exactly zero are skipped.
inline bool rc_membership(const Signal& s, const Window& xi, double C) {
    double sup_ratio = 0.0, sup_q = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) {
        const double mag = std::abs(s.samples[k]);
        sup_q = std::max(sup_q, mag);
        const double e = xi.eval(s.time(k));
        if (e != 0.0) sup_ratio = std::max(sup_ratio, mag / e);
    }
    return sup_ratio < C * sup_q && sup_q < C * s.norm();
}

}  // namespace ltft
