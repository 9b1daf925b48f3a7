#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "ltft/error.hpp"
#include "ltft/frames.hpp"
#include "ltft/phase_space.hpp"
#include "ltft/quadrature.hpp"
#include "ltft/signal.hpp"

namespace ltft {

/// Resolution of the deterministic phase-space quadrature. Rows are omega midpoints
/// times tau Gauss-Legendre nodes; x runs over the signal's sample grid.
struct DenseGrid {
    double omega_step = 1.0;   // Hz, rounded down to divide each frequency interval evenly
    int tau_panels = 1;        // 8-point Gauss-Legendre panels in tau
    int oversample = 0;        // 0 picks a factor from the highest frequency in the domain

    /// Default resolution for a signal at `rate`: omega step R/640.
    static DenseGrid for_rate(double rate) {
        DenseGrid g;
        g.omega_step = rate / 640.0;
        return g;
    }
};

/// Oversampling factor needed so that atoms up to omega_max are not aliased.
inline int auto_oversample(double omega_max, double rate) {
    if (omega_max <= 0.5 * rate) return 1;
    return static_cast<int>(std::ceil(2.0 * omega_max / rate)) + 1;
}

struct CoefficientRow {
    double omega = 0.0;
    double tau = 1.0;
    double weight = 0.0;         // d omega * tau weight * dx
    long first = 0;              // x_j = origin + (first + j) / rate
    std::vector<cplx> values;
};

struct CoefficientGrid {
    double rate = 1.0;
    double origin = 0.0;
    std::size_t size = 0;
    int oversample = 1;
    std::vector<CoefficientRow> rows;
};

namespace detail {

struct DenseRow {
    double omega;
    double tau;
    double weight;  // d omega * tau weight (without dx)
};

inline std::vector<DenseRow> dense_rows(const PhaseDomain& domain, const DenseGrid& grid) {
    require(grid.omega_step > 0.0 && grid.tau_panels >= 1, ErrorKind::InvalidParameter, "dense grid steps must be positive");
    domain.validate();
    require(domain.measure() > 0.0, ErrorKind::InvalidParameter, "dense quadrature over an empty domain");
    std::vector<double> taus{domain.tau_min}, tau_w{domain.tau_mass};
    if (domain.tau_max > domain.tau_min) {
        const QuadratureNodes q = composite_gauss_nodes(domain.tau_min, domain.tau_max, grid.tau_panels);
        taus = q.nodes;
        tau_w = q.weights;
        for (auto& w : tau_w) w *= domain.tau_mass / (domain.tau_max - domain.tau_min);
    }
    std::vector<DenseRow> rows;
    for (const Interval& iv : domain.omega_set()) {
        const auto n = static_cast<long>(std::max(2.0, std::ceil(iv.length() / grid.omega_step - 1e-9)));
        const double dw = iv.length() / static_cast<double>(n);
        for (long i = 0; i < n; ++i) {
            const double w = iv.lo + dw * (static_cast<double>(i) + 0.5);
            for (std::size_t j = 0; j < taus.size(); ++j) rows.push_back({w, taus[j], dw * tau_w[j]});
        }
    }
    return rows;
}

inline double max_abs_omega(const PhaseDomain& d) { return std::max(std::abs(d.omega_lo), std::abs(d.omega_hi)); }

// Atom centred at 0 on the fine grid offsets q / fine_rate, q in [-Q, Q].
template <typename Frame>
long centered_kernel(const Frame& frame, const PhasePoint& p, double fine_rate, std::vector<cplx>& kernel) {
    PhasePoint c = p;
    c.x = 0.0;
    const long Q = static_cast<long>(std::floor(frame.half_support(c) * fine_rate + 1e-9));
    kernel.resize(static_cast<std::size_t>(2 * Q + 1));
    frame.sample_centered(c, -static_cast<double>(Q) / fine_rate, fine_rate, kernel);
    return Q;
}

// x-grid index range (relative to the signal origin, coarse rate) of a row.
inline std::pair<long, long> x_range(const PhaseDomain& d, double omega, double origin, double rate) {
    const double ext = d.x_extent(omega);
    return {static_cast<long>(std::ceil((d.x_center - ext - origin) * rate - 1e-9)),
            static_cast<long>(std::floor((d.x_center + ext - origin) * rate + 1e-9))};
}

// Coefficients of one row: V_j = (1/R_f) Σ_q fine[P (first + j) + q] conj(g_q).
inline void analyse_row(const std::vector<cplx>& fine, int P, double fine_rate, long first, long last, long Q,
                        const std::vector<cplx>& kernel, std::vector<cplx>& out) {
    const long nf = static_cast<long>(fine.size());
    out.assign(static_cast<std::size_t>(std::max(0L, last - first + 1)), cplx{});
    for (long j = first; j <= last; ++j) {
        const long centre = static_cast<long>(P) * j;
        const long q_lo = std::max(-Q, -centre), q_hi = std::min(Q, nf - 1 - centre);
        cplx acc{};
        for (long q = q_lo; q <= q_hi; ++q)
            acc += fine[static_cast<std::size_t>(centre + q)] * std::conj(kernel[static_cast<std::size_t>(q + Q)]);
        out[static_cast<std::size_t>(j - first)] = acc / fine_rate;
    }
}

inline void synthesise_row(std::vector<cplx>& acc_fine, int P, long first, long Q, const std::vector<cplx>& kernel,
                           const std::vector<cplx>& coeffs, double weight) {
    const long nf = static_cast<long>(acc_fine.size());
    for (std::size_t j = 0; j < coeffs.size(); ++j) {
        const cplx c = coeffs[j] * weight;
        if (c == cplx{}) continue;
        const long centre = static_cast<long>(P) * (first + static_cast<long>(j));
        const long q_lo = std::max(-Q, -centre), q_hi = std::min(Q, nf - 1 - centre);
        for (long q = q_lo; q <= q_hi; ++q)
            acc_fine[static_cast<std::size_t>(centre + q)] += c * kernel[static_cast<std::size_t>(q + Q)];
    }
}

}  // namespace detail

/// V_f s on the dense grid over `domain`.
template <typename Frame>
CoefficientGrid dense_analysis(const Signal& s, const Frame& frame, const PhaseDomain& domain, const DenseGrid& grid) {
    s.validate();
    const auto rows = detail::dense_rows(domain, grid);
    const int P = grid.oversample > 0 ? grid.oversample : auto_oversample(detail::max_abs_omega(domain), s.rate);
    const Signal fine = upsample(s, P);
    CoefficientGrid out;
    out.rate = s.rate;
    out.origin = s.origin;
    out.size = s.size();
    out.oversample = P;
    out.rows.reserve(rows.size());
    std::vector<cplx> kernel;
    for (const auto& r : rows) {
        const PhasePoint p{0.0, r.omega, r.tau};
        const long Q = detail::centered_kernel(frame, p, fine.rate, kernel);
        const auto [first, last] = detail::x_range(domain, r.omega, s.origin, s.rate);
        CoefficientRow row{r.omega, r.tau, r.weight / s.rate, first, {}};
        detail::analyse_row(fine.samples, P, fine.rate, first, last, Q, kernel, row.values);
        out.rows.push_back(std::move(row));
    }
    return out;
}

/// V_f^* applied to a coefficient grid, projected back onto the signal's grid and band.
template <typename Frame>
Signal dense_synthesis(const CoefficientGrid& coeffs, const Frame& frame) {
    const int P = coeffs.oversample;
    const double fine_rate = coeffs.rate * P;
    std::vector<cplx> acc(coeffs.size * static_cast<std::size_t>(P), cplx{});
    std::vector<cplx> kernel;
    for (const auto& row : coeffs.rows) {
        const long Q = detail::centered_kernel(frame, {0.0, row.omega, row.tau}, fine_rate, kernel);
        detail::synthesise_row(acc, P, row.first, Q, kernel, row.values, row.weight);
    }
    return downsample(Signal(std::move(acc), fine_rate, coeffs.origin), P);
}

/// Fused V_f^* T V_f s over `domain` without storing the coefficients. `op` maps
/// (phase point, coefficient) to the new coefficient; the identity gives S_f restricted
/// to the domain.
template <typename Frame, typename Op>
Signal dense_phase_operator(const Signal& s, const Frame& frame, const PhaseDomain& domain, const DenseGrid& grid, Op&& op) {
    s.validate();
    const auto rows = detail::dense_rows(domain, grid);
    const int P = grid.oversample > 0 ? grid.oversample : auto_oversample(detail::max_abs_omega(domain), s.rate);
    const Signal fine = upsample(s, P);
    std::vector<cplx> acc(fine.size(), cplx{});
    std::vector<cplx> kernel, values;
    for (const auto& r : rows) {
        const long Q = detail::centered_kernel(frame, {0.0, r.omega, r.tau}, fine.rate, kernel);
        const auto [first, last] = detail::x_range(domain, r.omega, s.origin, s.rate);
        detail::analyse_row(fine.samples, P, fine.rate, first, last, Q, kernel, values);
        for (std::size_t j = 0; j < values.size(); ++j)
            values[j] = op(PhasePoint{s.origin + static_cast<double>(first + static_cast<long>(j)) / s.rate, r.omega, r.tau},
                           values[j]);
        detail::synthesise_row(acc, P, first, Q, kernel, values, r.weight / s.rate);
    }
    return downsample(Signal(std::move(acc), fine.rate, s.origin), P);
}

template <typename Frame>
Signal dense_frame_apply(const Signal& s, const Frame& frame, const PhaseDomain& domain, const DenseGrid& grid) {
    return dense_phase_operator(s, frame, domain, grid, [](const PhasePoint&, cplx c) { return c; });
}

/// ||V_f s||^2 over `domain` by the dense rule.
template <typename Frame>
double dense_coefficient_energy(const Signal& s, const Frame& frame, const PhaseDomain& domain, const DenseGrid& grid) {
    const CoefficientGrid g = dense_analysis(s, frame, domain, grid);
    double acc = 0.0;
    for (const auto& row : g.rows) {
        double r = 0.0;
        for (const cplx& v : row.values) r += std::norm(v);
        acc += r * row.weight;
    }
    return acc;
}

}  // namespace ltft
