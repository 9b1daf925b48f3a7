#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "ltft/error.hpp"
#include "ltft/quadrature.hpp"

namespace ltft {

/// sin(pi z) / (pi z), with a series expansion near the origin.
inline double sinc(double z) noexcept {
    const double x = std::numbers::pi * z;
    if (std::abs(x) < 1e-4) {
        const double x2 = x * x;
        return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
    }
    return std::sin(x) / x;
}

/// Hann window (1 + cos 2 pi t) / 2 on [-1/2, 1/2], zero elsewhere.
inline double hann_eval(double t) noexcept {
    if (t < -0.5 || t > 0.5) return 0.0;
    return 0.5 * (1.0 + std::cos(2.0 * std::numbers::pi * t));
}

/// Closed-form Fourier transform of the Hann window:
/// 1/2 sinc(z) + 1/4 sinc(z - 1) + 1/4 sinc(z + 1).
inline double hann_ft(double z) noexcept {
    return 0.5 * sinc(z) + 0.25 * sinc(z - 1.0) + 0.25 * sinc(z + 1.0);
}

/// Non-negative window supported on [-1/2, 1/2].
///
/// Hann has closed forms for everything. A custom table is sampled uniformly on
/// [-1/2, 1/2] (first and last entries at the endpoints), linearly interpolated,
/// and its Fourier transform is computed numerically.
class Window {
public:
    enum class Kind { Hann, Table };

    Window() = default;

    static Window hann() { return Window{}; }

    static Window table(std::vector<double> values) {
        require(values.size() >= 2, ErrorKind::InvalidParameter, "window table needs at least 2 entries");
        for (double v : values)
            require(v >= 0.0 && std::isfinite(v), ErrorKind::InvalidParameter,
                    "window table entries must be finite and non-negative");
        Window w;
        w.kind_ = Kind::Table;
        w.table_ = std::move(values);
        return w;
    }

    Kind kind() const noexcept { return kind_; }
    const std::vector<double>& table_values() const noexcept { return table_; }

    double eval(double t) const noexcept {
        if (kind_ == Kind::Hann) return hann_eval(t);
        if (t < -0.5 || t > 0.5) return 0.0;
        const double pos = (t + 0.5) * static_cast<double>(table_.size() - 1);
        const auto i = std::min(static_cast<std::size_t>(pos), table_.size() - 2);
        const double frac = pos - static_cast<double>(i);
        return table_[i] * (1.0 - frac) + table_[i + 1] * frac;
    }

    /// Tables are assumed even, so only the cosine transform is computed.
    double ft(double z) const {
        if (kind_ == Kind::Hann) return hann_ft(z);
        const std::size_t cells = table_.size() - 1;
        const double width = 1.0 / static_cast<double>(cells);
        double acc = 0.0;
        for (std::size_t i = 0; i < cells; ++i) {
            const double lo = -0.5 + width * static_cast<double>(i);
            acc += gauss_legendre(
                [&](double t) { return eval(t) * std::cos(2.0 * std::numbers::pi * z * t); }, lo,
                lo + width);
        }
        return acc;
    }

    /// ||h||_2^2.
    double energy() const {
        if (kind_ == Kind::Hann) return 0.375;
        const std::size_t cells = table_.size() - 1;
        const double width = 1.0 / static_cast<double>(cells);
        double acc = 0.0;
        for (std::size_t i = 0; i < cells; ++i) {
            const double lo = -0.5 + width * static_cast<double>(i);
            acc += gauss_legendre([&](double t) { return eval(t) * eval(t); }, lo, lo + width);
        }
        return acc;
    }

    /// Decay horizon for |ĥ|^2 tails: beyond |u| > horizon the remaining mass is negligible.
    double ft_horizon() const noexcept { return kind_ == Kind::Hann ? 40.0 : 96.0; }

    friend bool operator==(const Window&, const Window&) = default;

private:
    Kind kind_ = Kind::Hann;
    std::vector<double> table_;
};

}  // namespace ltft
