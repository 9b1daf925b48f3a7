#pragma once

#include <algorithm>
#include <array>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ltft/error.hpp"
#include "ltft/frames.hpp"
#include "ltft/quadrature.hpp"
#include "ltft/signal.hpp"
#include "ltft/window.hpp"

namespace ltft {

/// Per-band split of a frame filter value.
struct BandValues {
    double low = 0.0;
    double mid = 0.0;
    double high = 0.0;

    double total() const noexcept { return low + mid + high; }
    BandValues& operator+=(const BandValues& o) noexcept {
        low += o.low;
        mid += o.mid;
        high += o.high;
        return *this;
    }
    friend BandValues operator*(double w, BandValues v) noexcept {
        v.low *= w;
        v.mid *= w;
        v.high *= w;
        return v;
    }
};

/// Squared window spectrum ĥ² and its antiderivative Phi(u) = ∫_{-inf}^u ĥ²,
/// tabulated on [-U, U]. Outside the table Phi is clamped to 0 or the total.
class SpectralEnergyTable {
public:
    explicit SpectralEnergyTable(Window window, double step = 1.0 / 16.0)
        : window_(std::move(window)), horizon_(window_.ft_horizon()), step_(step) {
        const auto cells = static_cast<std::size_t>(std::ceil(2.0 * horizon_ / step_));
        step_ = 2.0 * horizon_ / static_cast<double>(cells);
        cumulative_.resize(cells + 1, 0.0);
        for (std::size_t i = 0; i < cells; ++i) {
            const double lo = -horizon_ + step_ * static_cast<double>(i);
            cumulative_[i + 1] = cumulative_[i] + gauss_legendre([this](double u) { return square(u); }, lo, lo + step_);
        }
    }

    const Window& window() const noexcept { return window_; }
    double horizon() const noexcept { return horizon_; }
    double square(double u) const {
        const double v = window_.ft(u);
        return v * v;
    }
    double total() const noexcept { return cumulative_.back(); }

    double phi(double u) const {
        if (!(u > -horizon_)) return 0.0;
        if (!(u < horizon_)) return total();
        const double pos = (u + horizon_) / step_;
        const auto i = std::min(static_cast<std::size_t>(pos), cumulative_.size() - 2);
        const double lo = -horizon_ + step_ * static_cast<double>(i);
        return cumulative_[i] + gauss_legendre([this](double v) { return square(v); }, lo, u);
    }

private:
    Window window_;
    double horizon_;
    double step_;
    std::vector<double> cumulative_;
};

namespace detail {

// ∫_{w1}^{w2} (tau/w) ĥ²((tau/w)(z - w)) dw for 0 < w1 < w2, via u = tau z / w - tau.
inline double mid_band_positive(const SpectralEnergyTable& table, double tau, double z, double w1, double w2) {
    if (z == 0.0) return tau * table.square(tau) * std::log(w2 / w1);
    const double u1 = tau * z / w1 - tau;
    const double u2 = tau * z / w2 - tau;
    const double lo = std::max(std::min(u1, u2), -table.horizon());
    const double hi = std::min(std::max(u1, u2), table.horizon());
    if (!(lo < hi)) return 0.0;
    return adaptive_integral([&](double u) { return tau / std::abs(u + tau) * table.square(u); }, lo, hi, 1e-9);
}

}  // namespace detail

/// Contribution to Ŝ(z) of the atoms with oscillation count tau and frequency in [w1, w2]
/// (bounds may be infinite), split by band.
inline BandValues band_density(const SpectralEnergyTable& table, const LTFTParams& params, double tau, double z,
                               double w1, double w2) {
    BandValues out;
    if (!(w1 < w2)) return out;
    const double a = params.a(tau);
    const double b = params.b(tau);
    auto fixed_scale = [&](double c, double lo, double hi) {
        if (!(lo < hi)) return 0.0;
        const double k = tau / c;
        return table.phi(k * (z - lo)) - table.phi(k * (z - hi));
    };
    out.low = fixed_scale(a, std::max(w1, -a), std::min(w2, a));
    out.high = fixed_scale(b, std::max(w1, b), w2) + fixed_scale(b, w1, std::min(w2, -b));
    const double p_lo = std::max(w1, a), p_hi = std::min(w2, b);
    if (p_lo < p_hi) out.mid += detail::mid_band_positive(table, tau, z, p_lo, p_hi);
    const double n_lo = std::max(-w2, a), n_hi = std::min(-w1, b);
    if (n_lo < n_hi) out.mid += detail::mid_band_positive(table, tau, -z, n_lo, n_hi);
    return out;
}

struct FilterQuadrature {
    double rel_tol = 1e-4;    // stop once doubling the tau panels changes values by less than this
    int initial_panels = 1;   // 8-point Gauss-Legendre panels on [tau_min, tau_max]
    int max_doublings = 8;
    double abs_tol = 1e-12;   // changes below this count as settled (values are O(||h||^2))
    double floor = 1e-6;      // A_est at or below this is reported as a degenerate frame
};

/// Band-split ∫ Ŝ_tau(z) dmu(tau) restricted to frequencies in `omega_set`, at each z.
/// The tau rule is refined by doubling until the values settle.
inline std::vector<BandValues> integrate_filter(const LTFTParams& params, const SpectralEnergyTable& table,
                                                const std::vector<double>& zs,
                                                const std::vector<Interval>& omega_set,
                                                const FilterQuadrature& quad = {}) {
    params.validate();
    auto evaluate = [&](int panels) {
        std::vector<BandValues> out(zs.size());
        auto accumulate = [&](double tau, double weight) {
            for (std::size_t i = 0; i < zs.size(); ++i)
                for (const Interval& w : omega_set)
                    out[i] += weight * band_density(table, params, tau, zs[i], w.lo, w.hi);
        };
        if (params.tau_max == params.tau_min) {
            accumulate(params.tau_min, 1.0);
            return out;
        }
        const QuadratureNodes q = composite_gauss_nodes(params.tau_min, params.tau_max, panels);
        for (std::size_t j = 0; j < q.nodes.size(); ++j) accumulate(q.nodes[j], q.weights[j] * params.tau_density());
        return out;
    };

    int panels = std::max(1, quad.initial_panels);
    std::vector<BandValues> current = evaluate(panels);
    if (params.tau_max == params.tau_min) return current;
    for (int level = 0; level < quad.max_doublings; ++level) {
        panels *= 2;
        std::vector<BandValues> next = evaluate(panels);
        double scale = 0.0;
        for (const auto& v : next) scale = std::max(scale, std::abs(v.total()));
        bool settled = true;
        for (std::size_t i = 0; i < next.size() && settled; ++i) {
            const double denom = std::max(std::abs(next[i].total()), 1e-3 * scale);
            settled = std::abs(next[i].total() - current[i].total()) <= quad.rel_tol * denom + quad.abs_tol;
        }
        current = std::move(next);
        if (settled) return current;
    }
    throw Error(ErrorKind::QuadratureFailure, "frame filter tau quadrature did not settle after " +
                                                  std::to_string(quad.max_doublings) + " refinements");
}

/// Sampled frame filter on the uniform grid z_i = i dz, i = 0..n-1 (the filter is even in z).
class FrameFilter {
public:
    FrameFilter() = default;
    FrameFilter(double dz, std::vector<BandValues> values, double floor, std::string key = {})
        : dz_(dz), values_(std::move(values)), floor_(floor), key_(std::move(key)) {
        require(dz_ > 0.0 && values_.size() >= 2, ErrorKind::InvalidParameter, "frame filter grid needs >= 2 points");
        a_est_ = std::numeric_limits<double>::infinity();
        b_est_ = 0.0;
        for (const auto& v : values_) {
            a_est_ = std::min(a_est_, v.total());
            b_est_ = std::max(b_est_, v.total());
        }
    }

    /// A filter equal to `value` everywhere on [0, z_max].
    static FrameFilter constant(double value, double z_max, double dz) {
        const auto n = static_cast<std::size_t>(std::ceil(z_max / dz)) + 1;
        std::vector<BandValues> v(std::max<std::size_t>(n, 2), BandValues{0.0, value, 0.0});
        return FrameFilter(dz, std::move(v), 0.0);
    }

    double dz() const noexcept { return dz_; }
    std::size_t size() const noexcept { return values_.size(); }
    double frequency(std::size_t i) const noexcept { return dz_ * static_cast<double>(i); }
    double z_max() const noexcept { return frequency(values_.size() - 1); }
    const std::vector<BandValues>& values() const noexcept { return values_; }
    double a_est() const noexcept { return a_est_; }
    double b_est() const noexcept { return b_est_; }
    double floor() const noexcept { return floor_; }
    const std::string& key() const noexcept { return key_; }

    /// Ŝ(z) by Catmull-Rom interpolation in |z|; held constant beyond the last grid point.
    double operator()(double z) const { return interpolate(z, [](const BandValues& v) { return v.total(); }); }

    BandValues bands(double z) const {
        return {interpolate(z, [](const BandValues& v) { return v.low; }),
                interpolate(z, [](const BandValues& v) { return v.mid; }),
                interpolate(z, [](const BandValues& v) { return v.high; })};
    }

private:
    template <typename Get>
    double interpolate(double z, Get get) const {
        const double pos = std::abs(z) / dz_;
        const auto last = static_cast<long>(values_.size()) - 1;
        if (pos >= static_cast<double>(last)) return get(values_.back());
        const long i = static_cast<long>(pos);
        const double t = pos - static_cast<double>(i);
        auto at = [&](long j) { return get(values_[static_cast<std::size_t>(std::min(std::abs(j), last))]); };
        const double p0 = at(i - 1), p1 = at(i), p2 = at(i + 1), p3 = at(i + 2);
        return p1 + 0.5 * t * (p2 - p0 + t * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 + t * (3.0 * (p1 - p2) + p3 - p0)));
    }

    double dz_ = 1.0;
    std::vector<BandValues> values_;
    double a_est_ = 0.0;
    double b_est_ = 0.0;
    double floor_ = 0.0;
    std::string key_;
};

/// Builds Ŝ on [0, z_max] with spacing dz.
inline FrameFilter build_frame_filter(const LTFTParams& params, double z_max, double dz,
                                      const FilterQuadrature& quad = {}, std::string key = {}) {
    require(dz > 0.0 && z_max > 0.0 && std::isfinite(z_max), ErrorKind::InvalidParameter,
            "frame filter grid needs z_max > 0 and dz > 0");
    const auto n = static_cast<std::size_t>(std::ceil(z_max / dz - 1e-9)) + 1;
    std::vector<double> zs(std::max<std::size_t>(n, 2));
    for (std::size_t i = 0; i < zs.size(); ++i) zs[i] = dz * static_cast<double>(i);
    const SpectralEnergyTable table(params.window);
    const double inf = std::numeric_limits<double>::infinity();
    FrameFilter ff(dz, integrate_filter(params, table, zs, {{-inf, inf}}, quad), quad.floor, std::move(key));
    if (!(ff.a_est() > quad.floor)) {
        std::ostringstream os;
        os << "frame filter minimum " << ff.a_est() << " is at or below the floor " << quad.floor;
        throw Error(ErrorKind::FrameDegeneracy, os.str());
    }
    return ff;
}

/// Filter sampled on the DFT bins of a signal with `size` samples at `rate`, up to Nyquist.
inline FrameFilter build_frame_filter_for(const LTFTParams& params, double rate, std::size_t size,
                                          const FilterQuadrature& quad = {}) {
    return build_frame_filter(params, 0.5 * rate, rate / static_cast<double>(size), quad);
}

/// S_f s: multiply the spectrum by Ŝ.
inline Signal apply_frame_op(const Signal& s, const FrameFilter& ff) {
    return filter_spectrum(s, [&](double z) { return cplx(ff(z)); });
}

/// S_f^{-1} s: divide the spectrum by Ŝ. Bins where Ŝ falls to the floor are rejected.
inline Signal apply_inverse_frame_op(const Signal& s, const FrameFilter& ff) {
    return filter_spectrum(s, [&](double z) {
        const double v = ff(z);
        if (!(v > ff.floor())) {
            std::ostringstream os;
            os << "frame filter value " << v << " at " << z << " Hz is at or below the floor " << ff.floor();
            throw Error(ErrorKind::IllConditionedFilter, os.str());
        }
        return cplx(1.0 / v);
    });
}

// ---- cache files ------------------------------------------------------------------
//
// Text format, one record per line:
//   ltft-frame-filter 1
//   key <16 hex digits>
//   params <canonical parameter string>
//   grid <dz> <n> <floor>
//   z low mid high           (n rows, %.17g)

inline constexpr int kFrameFilterFormatVersion = 1;

inline std::uint64_t fnv1a(const std::string& text) noexcept {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string frame_filter_key(const LTFTParams& params, double rate, std::size_t size,
                                    const FilterQuadrature& quad) {
    std::ostringstream os;
    os.precision(17);
    os << params.canonical() << "|R=" << rate << "|N=" << size << "|tol=" << quad.rel_tol
       << "|floor=" << quad.floor;
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016" PRIx64, fnv1a(os.str()));
    return hex;
}

inline void save_frame_filter(const FrameFilter& ff, const std::string& params_text,
                              const std::filesystem::path& path) {
    std::ofstream out(path);
    require(static_cast<bool>(out), ErrorKind::Io, "cannot write frame filter cache " + path.string());
    out << "ltft-frame-filter " << kFrameFilterFormatVersion << "\n";
    out << "key " << ff.key() << "\n";
    out << "params " << params_text << "\n";
    char line[160];
    std::snprintf(line, sizeof line, "grid %.17g %zu %.17g\n", ff.dz(), ff.size(), ff.floor());
    out << line;
    for (std::size_t i = 0; i < ff.size(); ++i) {
        const BandValues& v = ff.values()[i];
        std::snprintf(line, sizeof line, "%.17g %.17g %.17g %.17g\n", ff.frequency(i), v.low, v.mid, v.high);
        out << line;
    }
    require(static_cast<bool>(out), ErrorKind::Io, "failed writing frame filter cache " + path.string());
}

/// Reads a cache file. Returns nothing if the file is missing, of another version, or
/// holds a different key; malformed contents raise an Io error.
inline std::optional<FrameFilter> load_frame_filter(const std::filesystem::path& path, const std::string& key) {
    std::ifstream in(path);
    if (!in) return std::nullopt;
    std::string tag, word;
    int version = 0;
    if (!(in >> tag >> version) || tag != "ltft-frame-filter" || version != kFrameFilterFormatVersion)
        return std::nullopt;
    std::string file_key;
    if (!(in >> word >> file_key) || word != "key") throw Error(ErrorKind::Io, "malformed cache header in " + path.string());
    if (file_key != key) return std::nullopt;
    std::string params_line;
    std::getline(in >> std::ws, params_line);
    double dz = 0.0, floor = 0.0;
    std::size_t n = 0;
    if (!(in >> word >> dz >> n >> floor) || word != "grid" || n < 2)
        throw Error(ErrorKind::Io, "malformed cache grid line in " + path.string());
    std::vector<BandValues> values(n);
    for (std::size_t i = 0; i < n; ++i) {
        double z = 0.0;
        if (!(in >> z >> values[i].low >> values[i].mid >> values[i].high))
            throw Error(ErrorKind::Io, "truncated cache file " + path.string());
    }
    return FrameFilter(dz, std::move(values), floor, file_key);
}

/// Loads the filter for (params, rate, size) from `cache_dir` or builds and stores it.
inline FrameFilter cached_frame_filter(const std::filesystem::path& cache_dir, const LTFTParams& params,
                                       double rate, std::size_t size, const FilterQuadrature& quad = {}) {
    const std::string key = frame_filter_key(params, rate, size, quad);
    const auto path = cache_dir / ("frame_filter_" + key + ".txt");
    if (auto hit = load_frame_filter(path, key)) return *hit;
    FrameFilter ff = build_frame_filter(params, 0.5 * rate, rate / static_cast<double>(size), quad, key);
    std::filesystem::create_directories(cache_dir);
    save_frame_filter(ff, params.canonical(), path);
    return ff;
}

}  // namespace ltft
