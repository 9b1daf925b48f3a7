#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "ltft/dense.hpp"
#include "ltft/error.hpp"
#include "ltft/frame_filter.hpp"
#include "ltft/frames.hpp"
#include "ltft/phase_space.hpp"
#include "ltft/pipelines.hpp"
#include "ltft/signal.hpp"

namespace ltft::verify {

// ---- report rows ---------------------------------------------------------------------

struct Row {
    std::string test_id;
    std::string params;
    std::string metric;
    double value = 0.0;
    std::string threshold;
    bool pass = true;
};

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) out += (c == '"') ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}

inline void write_csv_header(std::ostream& os) { os << "test_id,params,metric,value,threshold,pass\n"; }

inline void write_csv(std::ostream& os, const std::vector<Row>& rows) {
    for (const Row& r : rows) {
        std::ostringstream v;
        v.precision(10);
        v << r.value;
        os << csv_field(r.test_id) << ',' << csv_field(r.params) << ',' << csv_field(r.metric) << ',' << v.str() << ','
           << csv_field(r.threshold) << ',' << (r.pass ? "true" : "false") << '\n';
    }
}

inline bool all_pass(const std::vector<Row>& rows) {
    return std::all_of(rows.begin(), rows.end(), [](const Row& r) { return r.pass; });
}

template <typename... Args>
std::string params_text(Args&&... kv) {
    std::ostringstream os;
    os.precision(10);
    bool first = true;
    auto put = [&](const auto& x) {
        if constexpr (std::is_same_v<std::decay_t<decltype(x)>, bool>) os << (x ? "true" : "false");
        else os << x;
    };
    std::size_t i = 0;
    ((os << ((i++ % 2 == 0) ? (first ? (first = false, "") : ";") : "="), put(kv)), ...);
    return os.str();
}

// ---- statistics ------------------------------------------------------------------------

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double ci_half_width = 0.0;   // 95% two-sided
};

/// Ordinary least squares y = intercept + slope x with a Student-t interval on the slope.
inline SlopeFit slope_fit(const std::vector<double>& x, const std::vector<double>& y) {
    require(x.size() == y.size() && x.size() >= 3, ErrorKind::InvalidParameter, "slope fit needs >= 3 paired points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i] / n;
        my += y[i] / n;
    }
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    require(sxx > 0.0, ErrorKind::InvalidParameter, "slope fit needs at least two distinct x values");
    SlopeFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double sse = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = y[i] - f.intercept - f.slope * x[i];
        sse += e * e;
    }
    const boost::math::students_t t(n - 2.0);
    f.ci_half_width = boost::math::quantile(boost::math::complement(t, 0.025)) * std::sqrt(sse / (n - 2.0) / sxx);
    return f;
}

struct ConvergenceRun {
    std::vector<std::size_t> Ks;
    std::vector<std::vector<double>> errors;   // errors[i][seed]

    double rms(std::size_t i) const {
        double acc = 0.0;
        for (double e : errors[i]) acc += e * e;
        return std::sqrt(acc / static_cast<double>(errors[i].size()));
    }
    double stddev(std::size_t i) const {
        double m = 0.0;
        for (double e : errors[i]) m += e / static_cast<double>(errors[i].size());
        double v = 0.0;
        for (double e : errors[i]) v += (e - m) * (e - m);
        return std::sqrt(v / std::max<double>(1.0, static_cast<double>(errors[i].size()) - 1.0));
    }

    /// Fit of log2(rms error) against log2 K.
    SlopeFit fit() const {
        require(Ks.size() >= 4, ErrorKind::InvalidParameter, "convergence runs need >= 4 K values");
        std::vector<double> x, y;
        for (std::size_t i = 0; i < Ks.size(); ++i) {
            x.push_back(std::log2(static_cast<double>(Ks[i])));
            y.push_back(std::log2(rms(i)));
        }
        return slope_fit(x, y);
    }
};

// ---- test signals ----------------------------------------------------------------------

/// Real signal with random spectral content in [R/32, R/4], Hann-tapered over its span.
inline Signal band_limited_test_signal(std::size_t n, double rate, std::uint64_t seed, double lo_frac = 1.0 / 32.0,
                                       double hi_frac = 0.25) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    Spectrum sp = dft(Signal::centered(std::vector<cplx>(n), rate));
    for (std::size_t i = 0; i < sp.size(); ++i) {
        const double z = sp.frequency(i);
        if (z >= lo_frac * rate && z <= hi_frac * rate) sp.bins[i] = {g(rng), g(rng)};
    }
    Signal s = idft(sp);
    const double half = s.end_time();
    for (std::size_t k = 0; k < s.size(); ++k) s.samples[k] = 2.0 * (hann_eval(0.5 * s.time(k) / half) * s.samples[k]).real();
    const double norm = s.norm();
    if (norm > 0.0)
        for (auto& v : s.samples) v /= norm;
    return s;
}

/// Tone with raised-cosine fade-in and fade-out.
inline Signal faded_tone(double rate, double seconds, double freq, double fade) {
    const auto n = static_cast<std::size_t>(std::llround(rate * seconds)) + 1;
    Signal s = Signal::centered(std::vector<cplx>(n), rate);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) / rate;
        const double edge = std::min(t, seconds - t);
        const double env = edge >= fade ? 1.0 : 0.5 * (1.0 - std::cos(std::numbers::pi * edge / fade));
        s.samples[k] = env * std::sin(2.0 * std::numbers::pi * freq * t);
    }
    return s;
}

// ---- oracles --------------------------------------------------------------------------

/// S_f s by dense quadrature over `domain` (folded for positive-frequency domains).
template <typename Frame>
Signal dense_frame_operator(const Signal& s, const Frame& frame, const PhaseDomain& domain, const DenseGrid& grid) {
    Signal out = dense_frame_apply(s, frame, domain, grid);
    if (!domain.symmetric && domain.omega_lo >= 0.0) out = fold_positive_frequencies(out);
    return out;
}

/// Relative L2 gap between the dense frame operator and multiplication by Ŝ.
template <typename Frame>
double frame_op_equivalence(const Signal& s, const Frame& frame, const FrameFilter& ff, const PhaseDomain& domain,
                            const DenseGrid& grid) {
    const Signal filtered = apply_frame_op(s, ff);
    if (filtered.norm() == 0.0) return 0.0;
    return relative_error(dense_frame_operator(s, frame, domain, grid), filtered);
}

/// ||S_f^{-1} V_f^* V_f s - s|| / ||s|| with V_f^* V_f by dense quadrature.
template <typename Frame>
double pseudo_inverse_residual(const Signal& s, const Frame& frame, const FrameFilter& ff, const PhaseDomain& domain,
                               const DenseGrid& grid) {
    if (s.norm() == 0.0) return 0.0;
    return relative_error(apply_inverse_frame_op(dense_frame_operator(s, frame, domain, grid), ff), s);
}

struct FrameReport {
    double a_est = 0.0;
    double b_est = 0.0;
    double parseval_ratio = std::numeric_limits<double>::quiet_NaN();   // STFT only
    double reconstruction_error = 0.0;                                  // worst residual
    std::vector<double> residuals;

    bool finite() const {
        bool ok = std::isfinite(a_est) && std::isfinite(b_est) && std::isfinite(reconstruction_error);
        for (double r : residuals) ok = ok && std::isfinite(r);
        return ok;
    }
};

/// Filter bounds plus pseudo-inverse residuals of an LTFT frame over `signals`.
inline FrameReport frame_report(const LtftFrame& frame, const FrameFilter& ff, const std::vector<Signal>& signals,
                                const PhaseDomain& domain, const DenseGrid& grid) {
    FrameReport r;
    r.a_est = ff.a_est();
    r.b_est = ff.b_est();
    for (const Signal& s : signals) {
        r.residuals.push_back(pseudo_inverse_residual(s, frame, ff, domain, grid));
        r.reconstruction_error = std::max(r.reconstruction_error, r.residuals.back());
    }
    return r;
}

/// max_z |ft(z) - dft(atom)(z)| / max_z |ft(z)| over the DFT bins of a sampled atom.
inline double atom_ft_discrepancy(const LtftFrame& frame, const PhasePoint& p, double rate, double span) {
    const auto n = static_cast<std::size_t>(std::llround(span * rate)) + 1;
    Signal s = Signal::centered(std::vector<cplx>(n), rate);
    for (std::size_t k = 0; k < n; ++k) s.samples[k] = frame.eval(p, s.time(k));
    const Spectrum sp = dft(s);
    double worst = 0.0, peak = 0.0;
    for (std::size_t i = 0; i < sp.size(); ++i) {
        const cplx exact = frame.ft(p, sp.frequency(i));
        peak = std::max(peak, std::abs(exact));
        worst = std::max(worst, std::abs(exact - sp.bins[i]));
    }
    return worst / peak;
}

// ---- criteria ---------------------------------------------------------------------------

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline std::string frame_text(const LTFTParams& p) {
    if (const auto* c = std::get_if<ConstantTransition>(&p.transition))
        return params_text("tau_min", p.tau_min, "tau_max", p.tau_max, "a", c->a, "b", c->b);
    const auto& j = std::get<SupportPinnedTransition>(p.transition);
    return params_text("tau_min", p.tau_min, "tau_max", p.tau_max, "j1", j.j1, "j2", j.j2);
}

inline LTFTParams default_params(double rate) { return LTFTParams::constant(3.0, 8.0, 0.05 * rate, 0.4 * rate); }

/// Frame filter validity: A_est > 0 and dense S_f agrees with Ŝ multiplication.
inline std::vector<Row> criterion_frame_filter(std::size_t M = 512, int signals = 10, double W = 2.0,
                                               std::optional<LTFTParams> frame_params = std::nullopt) {
    const auto t0 = std::chrono::steady_clock::now();
    const double rate = static_cast<double>(M);
    const LTFTParams params = frame_params.value_or(default_params(rate));
    const LtftFrame frame(params);
    const FrameFilter ff = build_frame_filter_for(params, rate, M + 1);
    std::vector<Row> rows;
    const std::string p = params_text("M", M, "R", rate, "W", W) + ";" + frame_text(params);
    rows.push_back({"frame_filter", p, "A_est", ff.a_est(), ">0", ff.a_est() > 0.0});
    rows.push_back({"frame_filter", p, "B_est", ff.b_est(), "report", true});
    const PhaseDomain domain = ltft_domain(static_cast<double>(M), rate, W, params);
    const DenseGrid grid = DenseGrid::for_rate(rate);
    double worst = 0.0;
    for (int k = 0; k < signals; ++k) {
        const Signal s = band_limited_test_signal(M + 1, rate, 100 + static_cast<std::uint64_t>(k));
        const double e = frame_op_equivalence(s, frame, ff, domain, grid);
        worst = std::max(worst, e);
        rows.push_back({"frame_filter", p + ";signal=" + std::to_string(k), "equivalence_rel_err", e, "<0.02", e < 0.02});
    }
    rows.push_back({"frame_filter", p, "max_equivalence_rel_err", worst, "<0.02", worst < 0.02});
    const double secs = seconds_since(t0);
    rows.push_back({"frame_filter", p, "runtime_s", secs, "<60", secs < 60.0});
    return rows;
}

/// Reconstruction through the pseudo-inverse S_f^{-1} V_f^* V_f.
inline std::vector<Row> criterion_reconstruction(std::size_t M = 1024, int signals = 5, double W = 2.0,
                                                 std::optional<LTFTParams> frame_params = std::nullopt) {
    const auto t0 = std::chrono::steady_clock::now();
    const double rate = static_cast<double>(M);
    const LTFTParams params = frame_params.value_or(default_params(rate));
    const LtftFrame frame(params);
    const FrameFilter ff = build_frame_filter_for(params, rate, M + 1);
    const PhaseDomain domain = ltft_domain(static_cast<double>(M), rate, W, params);
    const DenseGrid grid = DenseGrid::for_rate(rate);
    const std::string p = params_text("M", M, "R", rate, "W", W);
    std::vector<Row> rows;
    for (int k = 0; k < signals; ++k) {
        const Signal s = band_limited_test_signal(M + 1, rate, 200 + static_cast<std::uint64_t>(k));
        const double e = pseudo_inverse_residual(s, frame, ff, domain, grid);
        rows.push_back({"reconstruction", p + ";signal=" + std::to_string(k), "residual", e, "<0.05", e < 0.05});
    }
    const double secs = seconds_since(t0);
    rows.push_back({"reconstruction", p, "runtime_s", secs, "<300", secs < 300.0});
    return rows;
}

/// Monte Carlo convergence of the identity pipeline against the dense oracle.
/// `per_run` receives one row per (K, seed).
inline std::vector<Row> criterion_convergence(std::size_t M = 512, int seeds = 20, int k_min_log2 = 10, int k_max_log2 = 16,
                                              std::vector<Row>* per_run = nullptr, ConvergenceRun* run_out = nullptr,
                                              std::optional<LTFTParams> frame_params = std::nullopt) {
    const auto t0 = std::chrono::steady_clock::now();
    const double rate = static_cast<double>(M);
    const LTFTParams params = frame_params.value_or(default_params(rate));
    const LtftFrame frame(params);
    const FrameFilter ff = build_frame_filter_for(params, rate, M + 1);
    PipelineConfig cfg;
    cfg.domain = ltft_domain(static_cast<double>(M), rate, 1.0, params);
    const Signal s = band_limited_test_signal(M + 1, rate, 300);
    DenseGrid grid = DenseGrid::for_rate(rate);
    grid.oversample = 1;
    const Signal oracle = dense_frame_operator(apply_inverse_frame_op(s, ff), frame, cfg.domain, grid);

    ConvergenceRun run;
    for (int e = k_min_log2; e <= k_max_log2; ++e) {
        cfg.K = std::size_t{1} << e;
        run.Ks.push_back(cfg.K);
        run.errors.emplace_back();
        for (int seed = 0; seed < seeds; ++seed) {
            cfg.seed = 5000 + static_cast<std::uint64_t>(seed);
            const Signal out = run_mc_pipeline(s, frame, ff, cfg, IdentityOp{}, Nonlinearity::identity()).output;
            const double err = relative_error(out, oracle);
            run.errors.back().push_back(err);
            if (per_run)
                per_run->push_back({"convergence", params_text("M", M, "K", cfg.K, "seed", cfg.seed), "rel_err", err, "report", true});
        }
    }
    const SlopeFit fit = run.fit();
    if (run_out) *run_out = run;
    const std::string p = params_text("M", M, "W", 1, "seeds", seeds, "K", "2^" + std::to_string(k_min_log2) + "..2^" + std::to_string(k_max_log2));
    std::vector<Row> rows;
    rows.push_back({"convergence", p, "slope", fit.slope, "[-0.65,-0.35]", fit.slope >= -0.65 && fit.slope <= -0.35});
    rows.push_back({"convergence", p, "slope_ci95_half_width", fit.ci_half_width, "report", true});
    const double secs = seconds_since(t0);
    rows.push_back({"convergence", p, "runtime_s", secs, "<600", secs < 600.0});
    return rows;
}

/// Truncation report against references W_ref = 4W, 8W, ... (up to 64W), stopping at the first
/// whose tail indicator is clear. Returns the report and the W_ref used.
template <typename DomainAt, typename Ratio>
std::pair<LVDReport, double> truncation_with_growing_reference(double W, DomainAt domain_at, Ratio ratio) {
    const PhaseDomain dom = domain_at(W);
    LVDReport r;
    double w_ref = 4.0 * W;
    for (; ; w_ref *= 2.0) {
        r = ratio(dom, domain_at(w_ref));
        if (!r.reference_too_small || w_ref >= 64.0 * W) break;
    }
    return {r, w_ref};
}

/// Linear volume growth and truncation error of the LTFT domains.
inline std::vector<Row> criterion_lvd(const std::vector<std::size_t>& Ms = {256, 512, 1024, 2048},
                                      const std::vector<double>& Ws = {1.0, 2.0, 4.0}, int signals = 2,
                                      std::vector<LVDReport>* reports = nullptr) {
    std::vector<Row> rows;
    double cv_min = std::numeric_limits<double>::infinity(), cv_max = 0.0;
    for (std::size_t M : Ms) {
        const double rate = static_cast<double>(M);
        const LTFTParams params = LTFTParams::constant(3.0, 8.0, 8.0, 64.0);
        for (int k = 0; k < signals; ++k) {
            const Signal s = band_limited_test_signal(M + 1, rate, 400 + static_cast<std::uint64_t>(k));
            double previous = std::numeric_limits<double>::infinity();
            for (double W : Ws) {
                const auto [r, w_ref] = truncation_with_growing_reference(
                    W, [&](double w) { return ltft_domain(static_cast<double>(M), rate, w, params, true); },
                    [&](const PhaseDomain& d, const PhaseDomain& ref) { return truncation_ratio(params, s, d, ref); });
                if (reports) reports->push_back(r);
                const std::string p = params_text("M", M, "R", rate, "W", W, "W_ref", w_ref, "signal", k);
                if (k == 0) {
                    rows.push_back({"lvd", p, "mu_over_M", r.ratio_Cv, "report", true});
                    if (W == 2.0) {
                        cv_min = std::min(cv_min, r.ratio_Cv);
                        cv_max = std::max(cv_max, r.ratio_Cv);
                    }
                }
                rows.push_back({"lvd", p, "trunc_error", r.trunc_error, W == 2.0 ? "<0.1" : "report", W != 2.0 || r.trunc_error < 0.1});
                rows.push_back({"lvd", p, "trunc_error_decreases_in_W", r.trunc_error, "<=previous+1e-3", r.trunc_error <= previous + 1e-3});
                rows.push_back({"lvd", p, "reference_tail_fraction", r.tail_fraction, "<0.1", !r.reference_too_small});
                previous = r.trunc_error;
            }
        }
    }
    const double variation = cv_max / cv_min - 1.0;
    rows.push_back({"lvd", params_text("W", 2, "M", "256..2048"), "mu_over_M_variation", variation, "<0.1", variation < 0.1});
    return rows;
}

/// CWT volume bound and truncation error for enveloped trigonometric polynomials.
inline std::vector<Row> criterion_cwt(std::size_t M = 256, double W = 4.0, int signals = 5, double S = 0.5) {
    std::vector<Row> rows;
    const long m0 = cwt_volume_threshold(W, S, 1 << 16);
    const std::string pb = params_text("W", W, "S", S);
    rows.push_back({"cwt", pb, "M0", static_cast<double>(m0), "report", true});
    bool bound = true;
    for (long m = m0; m <= (1 << 16); ++m) bound = bound && cwt_domain_measure(static_cast<double>(m), W, S) <= 3.0 * W * static_cast<double>(m);
    rows.push_back({"cwt", pb + ";M=M0..65536", "mu_le_3WM", bound ? 1.0 : 0.0, "1", bound});
    const double mu = cwt_domain_measure(static_cast<double>(M), W, S);
    rows.push_back({"cwt", params_text("M", M, "W", W, "S", S), "mu_over_3WM", mu / (3.0 * W * static_cast<double>(M)), "<=1 when M>=M0",
                    static_cast<long>(M) < m0 || mu <= 3.0 * W * static_cast<double>(M)});

    const MotherWavelet mw;
    const double rate = 4.0 * static_cast<double>(M);
    std::mt19937_64 rng(600);
    std::normal_distribution<double> g;
    int made = 0, attempts = 0;
    while (made < signals && attempts < 100 * signals) {
        ++attempts;
        std::vector<cplx> c(2 * M + 1);
        for (auto& v : c) v = {g(rng), g(rng)};
        const Signal s = enveloped_trig_poly(c, Window::hann(), rate);
        if (!rc_membership(s, Window::hann(), 100.0)) continue;
        const auto [r, w_ref] = truncation_with_growing_reference(
            W, [&](double w) { return cwt_domain(static_cast<double>(M), w, S); },
            [&](const PhaseDomain& d, const PhaseDomain& ref) { return cwt_truncation_ratio(mw, s, d, ref); });
        const std::string p = params_text("M", M, "W", W, "W_ref", w_ref, "signal", made);
        rows.push_back({"cwt", p, "trunc_error", r.trunc_error, "<0.15", r.trunc_error < 0.15});
        rows.push_back({"cwt", p, "reference_tail_fraction", r.tail_fraction, "<0.1", !r.reference_too_small});
        ++made;
    }
    rows.push_back({"cwt", params_text("M", M, "C", 100), "signals_in_class", static_cast<double>(made), ">=" + std::to_string(signals), made >= signals});
    return rows;
}

/// Parseval property of the unit-norm STFT family.
inline std::vector<Row> criterion_stft_parseval(std::size_t M = 512, int signals = 3, double window_samples = 32.0) {
    const double rate = static_cast<double>(M);
    const StftFrame frame(Window::hann(), window_samples / rate);
    PhaseDomain d;
    d.x_half = 0.5 * static_cast<double>(M) / rate + 0.5 * frame.length();
    d.omega_hi = rate;
    d.symmetric = true;
    std::vector<Row> rows;
    for (int k = 0; k < signals; ++k) {
        const Signal s = band_limited_test_signal(M + 1, rate, 700 + static_cast<std::uint64_t>(k));
        const double ratio = dense_coefficient_energy(s, frame, d, DenseGrid::for_rate(rate)) / s.energy();
        rows.push_back({"stft_parseval", params_text("M", M, "L", window_samples / rate, "signal", k), "energy_ratio", ratio,
                        "[0.98,1.02]", ratio >= 0.98 && ratio <= 1.02});
    }
    return rows;
}

/// Vocoder sanity on a faded pure tone.
inline std::vector<Row> criterion_vocoder(double rate = 8000.0, double freq = 440.0, double Z = 64.0, std::uint64_t seed = 1,
                                          std::optional<LTFTParams> frame_params = std::nullopt) {
    std::vector<Row> rows;
    const Signal s = faded_tone(rate, 1.0, freq, 0.01);
    const LTFTParams params = frame_params.value_or(default_params(rate));
    const LtftFrame frame(params);
    const FrameFilter ff = build_frame_filter_for(params, rate, s.size());
    PipelineConfig cfg;
    cfg.domain = ltft_domain(static_cast<double>(s.size() - 1), rate, 1.0, params);
    cfg.Z = Z;
    cfg.seed = seed;

    const auto stretched = phase_vocoder(s, frame, ff, 2, cfg);
    const double ratio = stretched.output.duration() / s.duration();
    const std::string p2 = params_text("R", rate, "f", freq, "delta", 2, "Z", Z, "seed", seed);
    rows.push_back({"vocoder", p2, "duration_ratio", ratio, "2", std::abs(ratio - 2.0) < 1e-9});
    const Spectrum sp = dft(stretched.output);
    std::size_t peak = 0;
    for (std::size_t i = 0; i < sp.size(); ++i)
        if (sp.frequency(i) > 0.0 && std::abs(sp.bins[i]) > std::abs(sp.bins[peak])) peak = i;
    const double offset = std::abs(sp.frequency(peak) - freq);
    rows.push_back({"vocoder", p2, "peak_offset_bins", offset / sp.bin_hz, "<=1", offset <= sp.bin_hz});

    const auto same = phase_vocoder(s, frame, ff, 1, cfg);
    const double err2 = std::pow(relative_error(same.output, s), 2);
    const double snr = -10.0 * std::log10(err2);
    rows.push_back({"vocoder", params_text("R", rate, "f", freq, "delta", 1, "Z", Z, "seed", seed), "snr_db", snr, ">20", snr > 20.0});
    return rows;
}

/// Expected versus measured per-sample work of the vocoder.
inline std::vector<Row> criterion_complexity(std::size_t M = 4096, double alpha = 0.1, double beta = 0.5, double Z = 4.0,
                                             int seeds = 20) {
    const double rate = static_cast<double>(M);
    const LTFTParams params = LTFTParams::constant(2.0, 8.0, alpha * rate, beta * rate);
    double measured = 0.0, expected = 0.0, fft = 0.0;
    for (int k = 0; k < seeds; ++k) {
        const OpCount c = op_count(params, rate, M, Z, 800 + static_cast<std::uint64_t>(k));
        measured += c.measured / seeds;
        expected = c.expected;
        fft = c.fft_term;
    }
    const std::string p = params_text("M", M, "alpha", alpha, "beta", beta, "tau0", params.tau_mean(), "Z", Z, "seeds", seeds);
    const double rel = measured / expected - 1.0;
    return {{"complexity", p, "expected_ops", expected, "report", true},
            {"complexity", p, "measured_ops_mean", measured, "report", true},
            {"complexity", p, "relative_gap", rel, "|x|<0.25", std::abs(rel) < 0.25},
            {"complexity", p, "fft_term", fft, "report", true}};
}

/// Closed-form atom transforms against the DFT of sampled atoms. Points are drawn for a frame at `rate`;
/// atoms are sampled at `oversample * rate` (at 1x the fastest atoms get about five samples per period).
inline std::vector<Row> criterion_atom_ft(double rate = 512.0, int points = 20, std::uint64_t seed = 900, double oversample = 2.0) {
    const LTFTParams params = default_params(rate);
    const LtftFrame frame(params);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(-0.25, 0.25), uw(-0.25 * rate, 0.25 * rate), ut(params.tau_min, params.tau_max);
    std::vector<Row> rows;
    double worst = 0.0;
    for (int k = 0; k < points; ++k) {
        const PhasePoint p{ux(rng), uw(rng), ut(rng)};
        const double span = 2.0 * (std::abs(p.x) + frame.half_support(p)) + 1.0;
        const double e = atom_ft_discrepancy(frame, p, oversample * rate, span);
        worst = std::max(worst, e);
        rows.push_back({"atom_ft", params_text("x", p.x, "omega", p.omega, "tau", p.tau), "rel_err", e, "<=1e-3", e <= 1e-3});
    }
    rows.push_back({"atom_ft", params_text("R", rate, "points", points, "oversample", oversample), "max_rel_err", worst, "<=1e-3", worst <= 1e-3});
    return rows;
}

}  // namespace ltft::verify
