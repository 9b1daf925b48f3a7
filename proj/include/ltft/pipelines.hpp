#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "ltft/error.hpp"
#include "ltft/frame_filter.hpp"
#include "ltft/frames.hpp"
#include "ltft/phase_space.hpp"
#include "ltft/signal.hpp"

namespace ltft {

// ---- nonlinearities ----------------------------------------------------------------

/// Pointwise coefficient map r with |r(c)| <= E |c|.
class Nonlinearity {
public:
    enum class Kind { Identity, VocoderPhase, SoftThreshold, Custom };

    static Nonlinearity identity() { return Nonlinearity(Kind::Identity); }

    /// r(a e^{i theta}) = a e^{i delta theta}.
    static Nonlinearity vocoder_phase(int delta) {
        require(delta >= 1, ErrorKind::InvalidParameter, "vocoder phase factor must be >= 1");
        Nonlinearity n(Kind::VocoderPhase);
        n.delta_ = delta;
        return n;
    }

    /// r(c) = c max(0, 1 - lambda/|c|).
    static Nonlinearity soft_threshold(double lambda) {
        require(lambda >= 0.0, ErrorKind::InvalidParameter, "threshold must be >= 0");
        Nonlinearity n(Kind::SoftThreshold);
        n.lambda_ = lambda;
        return n;
    }

    static Nonlinearity custom(std::function<cplx(cplx)> fn, double growth) {
        require(static_cast<bool>(fn) && growth >= 0.0, ErrorKind::InvalidParameter, "custom nonlinearity needs a map and E >= 0");
        Nonlinearity n(Kind::Custom);
        n.fn_ = std::move(fn);
        n.growth_ = growth;
        return n;
    }

    Kind kind() const noexcept { return kind_; }
    int delta() const noexcept { return delta_; }
    double lambda() const noexcept { return lambda_; }
    double growth() const noexcept { return growth_; }

    cplx operator()(cplx c) const {
        switch (kind_) {
        case Kind::Identity: return c;
        case Kind::VocoderPhase:
            if (delta_ == 1 || c == cplx{}) return c;
            return std::polar(std::abs(c), static_cast<double>(delta_) * std::arg(c));
        case Kind::SoftThreshold: {
            const double a = std::abs(c);
            if (!(a > lambda_)) return {};
            return c * (1.0 - lambda_ / a);
        }
        case Kind::Custom: return fn_(c);
        }
        return c;
    }

private:
    explicit Nonlinearity(Kind k) : kind_(k) {}
    Kind kind_;
    int delta_ = 1;
    double lambda_ = 0.0;
    double growth_ = 1.0;
    std::function<cplx(cplx)> fn_;
};

// ---- phase-space operators -----------------------------------------------------------

struct IdentityOp {};

/// Moves coefficients: (T F)(d(g)) = F(g). `jacobian` is |det d'| at g.
struct DiffeoOp {
    std::function<PhasePoint(const PhasePoint&)> map;
    std::function<PhasePoint(const PhasePoint&)> inverse;
    std::function<double(const PhasePoint&)> jacobian;
};

/// Pointwise multiplication by a bounded symbol.
struct MultiplierOp {
    std::function<double(const PhasePoint&)> symbol;
    double bound = 1.0;
};

/// Integral operator (T F)(y) = ∫ R(y, g) F(g) dg with output envelope domain.
struct KernelOp {
    std::function<double(const PhasePoint& y, const PhasePoint& g)> kernel;
    PhaseDomain output_domain;
};

using PhaseOpSpec = std::variant<IdentityOp, DiffeoOp, MultiplierOp, KernelOp>;

/// Translation-dilation d(x, omega, tau) = (delta x, omega, tau).
inline DiffeoOp time_stretch(int delta) {
    require(delta >= 1, ErrorKind::InvalidParameter, "stretch factor must be >= 1");
    const double d = delta;
    return {[d](const PhasePoint& p) { return PhasePoint{d * p.x, p.omega, p.tau}; },
            [d](const PhasePoint& p) { return PhasePoint{p.x / d, p.omega, p.tau}; },
            [d](const PhasePoint&) { return d; }};
}

/// Checks d^{-1}(d(g)) = g on the given points.
inline bool diffeo_round_trip(const DiffeoOp& op, const std::vector<PhasePoint>& points, double tol = 1e-9) {
    for (const auto& p : points) {
        const PhasePoint q = op.inverse(op.map(p));
        const double scale = 1.0 + std::abs(p.x) + std::abs(p.omega) + std::abs(p.tau);
        if (std::abs(q.x - p.x) + std::abs(q.omega - p.omega) + std::abs(q.tau - p.tau) > tol * scale) return false;
    }
    return true;
}

// ---- configuration -------------------------------------------------------------------

enum class PipelineMode { Synthesis, Analysis };

struct PipelineConfig {
    PipelineMode mode = PipelineMode::Synthesis;
    std::size_t K = 0;        // 0 derives K = ceil(Z mu(domain))
    double Z = 16.0;
    std::size_t L = 0;        // kernel pipelines: 0 derives L = ceil(Z mu(output domain))
    std::uint64_t seed = 1;
    PhaseDomain domain;
    int workers = 0;          // 0 uses the hardware concurrency

    std::size_t resolve_K() const {
        if (K > 0) return K;
        require(Z > 0.0, ErrorKind::InvalidParameter, "Z must be positive");
        return static_cast<std::size_t>(std::ceil(Z * domain.measure()));
    }
};

/// Output sample grid (same rate as the input).
struct OutputGrid {
    std::size_t size = 0;
    double origin = 0.0;
};

struct PipelineStats {
    std::size_t K = 0;
    std::size_t L = 0;
    double measure = 0.0;
    double normalization = 0.0;   // mu / K
    std::uint64_t support_samples = 0;  // atom samples touched by analysis plus synthesis
    double seconds = 0.0;
};

struct PipelineResult {
    Signal output;
    PipelineStats stats;
};

inline constexpr std::size_t kSampleChunk = 2048;

namespace detail {

inline bool positive_frequency_domain(const PhaseDomain& d) { return !d.symmetric && d.omega_lo >= 0.0; }

inline int resolve_workers(int requested) {
    if (requested > 0) return requested;
    return std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
}

// Runs `work(chunk_index, buffer)` for consecutive chunks, each into a zeroed buffer,
// and adds the buffers into `out` in chunk order. The result does not depend on the
// number of workers.
template <typename Work>
void run_chunks(std::size_t chunks, int workers, std::vector<cplx>& out, Work&& work) {
    const std::size_t batch = static_cast<std::size_t>(std::max(1, workers));
    std::vector<std::vector<cplx>> buffers(std::min(batch, std::max<std::size_t>(chunks, 1)));
    for (std::size_t first = 0; first < chunks; first += batch) {
        const std::size_t count = std::min(batch, chunks - first);
        auto job = [&](std::size_t b) {
            buffers[b].assign(out.size(), cplx{});
            work(first + b, buffers[b]);
        };
        if (count == 1) {
            job(0);
        } else {
            std::vector<std::thread> threads;
            threads.reserve(count - 1);
            for (std::size_t b = 1; b < count; ++b) threads.emplace_back(job, b);
            job(0);
            for (auto& t : threads) t.join();
        }
        for (std::size_t b = 0; b < count; ++b)
            for (std::size_t i = 0; i < out.size(); ++i) out[i] += buffers[b][i];
    }
}

inline std::vector<PhasePoint> draw_chunk(const PhaseDomain& d, std::mt19937_64& rng, std::size_t count) {
    std::vector<PhasePoint> pts(count);
    for (auto& p : pts) p = sample_point(d, rng);
    return pts;
}

}  // namespace detail

/// Monte Carlo phase-space pipeline
///   synthesis mode: (mu/K) Σ_k r(T V_f[S^{-1} s](g_k)) f_{g_k}
///   analysis mode:  S^{-1} (mu/K) Σ_k r(T V_f[s](g_k)) f_{g_k}
/// with g_k uniform in cfg.domain. On a positive-frequency domain the input must be real
/// and the result is 2 Re(.) of the estimate. Diffeo samples are weighted by |J_d|.
template <typename Frame>
PipelineResult run_mc_pipeline(const Signal& s, const Frame& frame, const FrameFilter& filter, const PipelineConfig& cfg,
                               const PhaseOpSpec& op, const Nonlinearity& r, std::optional<OutputGrid> output = {}) {
    const auto start = std::chrono::steady_clock::now();
    s.validate();
    require(!std::holds_alternative<KernelOp>(op), ErrorKind::InvalidParameter,
            "kernel operators run through run_kernel_pipeline");
    cfg.domain.validate();
    const bool fold = detail::positive_frequency_domain(cfg.domain);
    require(!fold || s.is_real(), ErrorKind::InvalidParameter,
            "positive-frequency domains need a real input signal");
    const std::size_t K = cfg.resolve_K();
    require(K >= 1, ErrorKind::InvalidParameter, "K must be >= 1");

    const OutputGrid grid = output.value_or(OutputGrid{s.size(), s.origin});
    require(grid.size >= 1, ErrorKind::InvalidParameter, "empty output grid");
    const Signal input = cfg.mode == PipelineMode::Synthesis ? apply_inverse_frame_op(s, filter) : s;

    PipelineStats stats;
    stats.K = K;
    stats.measure = cfg.domain.measure();
    stats.normalization = stats.measure / static_cast<double>(K);

    const auto* diffeo = std::get_if<DiffeoOp>(&op);
    const auto* mult = std::get_if<MultiplierOp>(&op);
    const std::size_t chunks = (K + kSampleChunk - 1) / kSampleChunk;
    const int workers = detail::resolve_workers(cfg.workers);

    std::mt19937_64 rng(cfg.seed);
    std::vector<std::vector<PhasePoint>> pending;
    std::vector<cplx> acc(grid.size, cplx{});
    // samples are drawn sequentially in the calling thread, one batch of chunks at a time
    const std::size_t batch = static_cast<std::size_t>(workers);
    for (std::size_t first = 0; first < chunks; first += batch) {
        const std::size_t count = std::min(batch, chunks - first);
        pending.clear();
        for (std::size_t c = 0; c < count; ++c)
            pending.push_back(detail::draw_chunk(cfg.domain, rng, std::min(kSampleChunk, K - (first + c) * kSampleChunk)));
        std::vector<std::uint64_t> per_chunk(count, 0);
        detail::run_chunks(count, workers, acc, [&](std::size_t c, std::vector<cplx>& buf) {
            std::vector<cplx> atom, out_atom;
            std::uint64_t work = 0;
            for (const PhasePoint& g : pending[c]) {
                const long n0 = sample_atom_on_grid(frame, g, input.origin, input.rate, input.size(), atom);
                cplx coeff{};
                for (std::size_t q = 0; q < atom.size(); ++q)
                    coeff += input.samples[static_cast<std::size_t>(n0) + q] * std::conj(atom[q]);
                coeff /= input.rate;
                work += atom.size();

                PhasePoint where = g;
                double weight = stats.normalization;
                if (diffeo) {
                    where = diffeo->map(g);
                    weight *= std::abs(diffeo->jacobian(g));
                } else if (mult) {
                    coeff *= mult->symbol(g);
                }
                const cplx value = r(coeff) * weight;
                if (value == cplx{}) continue;

                const bool same_grid = where.x == g.x && grid.origin == input.origin && grid.size == input.size();
                const std::vector<cplx>* synth = &atom;
                long m0 = n0;
                if (!same_grid) {
                    m0 = sample_atom_on_grid(frame, where, grid.origin, input.rate, grid.size, out_atom);
                    synth = &out_atom;
                }
                for (std::size_t q = 0; q < synth->size(); ++q) buf[static_cast<std::size_t>(m0) + q] += value * (*synth)[q];
                work += synth->size();
            }
            per_chunk[c] = work;
        });
        for (auto w : per_chunk) stats.support_samples += w;
    }

    Signal out(std::move(acc), input.rate, grid.origin);
    if (cfg.mode == PipelineMode::Analysis) out = apply_inverse_frame_op(out, filter);
    if (fold) out = fold_positive_frequencies(out);
    stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {std::move(out), stats};
}

/// Two-stage estimator for kernel operators:
///   (|eta| mu / (K L)) Σ_j Σ_k R(y_j, g_k) r(V_f[.](g_k)) f_{y_j}
/// with g_k uniform in cfg.domain and y_j uniform in the kernel's output domain.
template <typename Frame>
PipelineResult run_kernel_pipeline(const Signal& s, const Frame& frame, const FrameFilter& filter, const PipelineConfig& cfg,
                                   const KernelOp& kernel, const Nonlinearity& r) {
    const auto start = std::chrono::steady_clock::now();
    s.validate();
    cfg.domain.validate();
    kernel.output_domain.validate();
    require(static_cast<bool>(kernel.kernel), ErrorKind::InvalidParameter, "kernel operator needs a kernel");
    const bool fold = detail::positive_frequency_domain(cfg.domain);
    require(fold == detail::positive_frequency_domain(kernel.output_domain), ErrorKind::InvalidParameter,
            "input and output domains must both be positive-frequency or both not");
    require(!fold || s.is_real(), ErrorKind::InvalidParameter, "positive-frequency domains need a real input signal");
    const std::size_t K = cfg.resolve_K();
    const std::size_t L = cfg.L > 0 ? cfg.L : static_cast<std::size_t>(std::ceil(cfg.Z * kernel.output_domain.measure()));
    require(K >= 1 && L >= 1, ErrorKind::InvalidParameter, "K and L must be >= 1");

    const Signal input = cfg.mode == PipelineMode::Synthesis ? apply_inverse_frame_op(s, filter) : s;
    PipelineStats stats;
    stats.K = K;
    stats.L = L;
    stats.measure = cfg.domain.measure();
    stats.normalization = kernel.output_domain.measure() * stats.measure / (static_cast<double>(K) * static_cast<double>(L));

    std::mt19937_64 rng(cfg.seed);
    std::vector<PhasePoint> gs(K);
    for (auto& g : gs) g = sample_point(cfg.domain, rng);
    std::vector<cplx> coeffs(K);
    std::vector<cplx> atom;
    for (std::size_t k = 0; k < K; ++k) {
        coeffs[k] = r(analysis_coeff(input, frame, gs[k], atom));
        stats.support_samples += atom.size();
    }
    std::vector<PhasePoint> ys(L);
    for (auto& y : ys) y = sample_point(kernel.output_domain, rng);

    std::vector<cplx> acc(input.size(), cplx{});
    const std::size_t chunks = (L + kSampleChunk - 1) / kSampleChunk;
    std::vector<std::uint64_t> per_chunk(chunks, 0);
    detail::run_chunks(chunks, detail::resolve_workers(cfg.workers), acc, [&](std::size_t c, std::vector<cplx>& buf) {
        std::vector<cplx> yatom;
        const std::size_t lo = c * kSampleChunk, hi = std::min(L, lo + kSampleChunk);
        for (std::size_t j = lo; j < hi; ++j) {
            cplx d{};
            for (std::size_t k = 0; k < K; ++k) {
                const double w = kernel.kernel(ys[j], gs[k]);
                if (w != 0.0) d += w * coeffs[k];
            }
            d *= stats.normalization;
            if (d == cplx{}) continue;
            const long m0 = sample_atom_on_grid(frame, ys[j], input.origin, input.rate, input.size(), yatom);
            for (std::size_t q = 0; q < yatom.size(); ++q) buf[static_cast<std::size_t>(m0) + q] += d * yatom[q];
            per_chunk[c] += yatom.size();
        }
    });
    for (auto w : per_chunk) stats.support_samples += w;

    Signal out(std::move(acc), input.rate, input.origin);
    if (cfg.mode == PipelineMode::Analysis) out = apply_inverse_frame_op(out, filter);
    if (fold) out = fold_positive_frequencies(out);
    stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {std::move(out), stats};
}

// ---- applications ----------------------------------------------------------------------

/// Stochastic phase vocoder: atoms move from x to delta x and phases are multiplied by
/// delta. The output has delta (N - 1) + 1 samples starting at delta * origin.
template <typename Frame>
PipelineResult phase_vocoder(const Signal& s, const Frame& frame, const FrameFilter& filter, int delta,
                             const PipelineConfig& cfg) {
    require(delta >= 1, ErrorKind::InvalidParameter, "stretch factor must be >= 1");
    require(s.is_real(), ErrorKind::InvalidParameter, "the phase vocoder needs a real signal");
    const OutputGrid grid{static_cast<std::size_t>(delta) * (s.size() - 1) + 1, static_cast<double>(delta) * s.origin};
    if (delta == 1) return run_mc_pipeline(s, frame, filter, cfg, IdentityOp{}, Nonlinearity::identity(), grid);
    return run_mc_pipeline(s, frame, filter, cfg, time_stretch(delta), Nonlinearity::vocoder_phase(delta), grid);
}

template <typename Frame>
PipelineResult denoise(const Signal& s, const Frame& frame, const FrameFilter& filter, double lambda,
                       const PipelineConfig& cfg) {
    return run_mc_pipeline(s, frame, filter, cfg, IdentityOp{}, Nonlinearity::soft_threshold(lambda));
}

/// Nearest-neighbour symbol on a rectangular (x, omega) lattice.
class SymbolGrid {
public:
    SymbolGrid(std::vector<double> xs, std::vector<double> omegas, std::vector<double> values)
        : xs_(std::move(xs)), omegas_(std::move(omegas)), values_(std::move(values)) {
        require(!xs_.empty() && !omegas_.empty() && values_.size() == xs_.size() * omegas_.size(),
                ErrorKind::InvalidParameter, "symbol grid shape mismatch");
        bound_ = 0.0;
        for (double v : values_) bound_ = std::max(bound_, std::abs(v));
    }

    static SymbolGrid constant(double value) { return SymbolGrid({0.0}, {0.0}, {value}); }

    double operator()(const PhasePoint& p) const {
        return values_[nearest(xs_, p.x) * omegas_.size() + nearest(omegas_, p.omega)];
    }
    double bound() const noexcept { return bound_; }
    std::size_t x_count() const noexcept { return xs_.size(); }
    std::size_t omega_count() const noexcept { return omegas_.size(); }

    MultiplierOp as_operator() const {
        return {[g = *this](const PhasePoint& p) { return g(p); }, bound_};
    }

private:
    static std::size_t nearest(const std::vector<double>& axis, double v) {
        const auto it = std::lower_bound(axis.begin(), axis.end(), v);
        if (it == axis.begin()) return 0;
        if (it == axis.end()) return axis.size() - 1;
        const auto i = static_cast<std::size_t>(it - axis.begin());
        return (v - axis[i - 1] <= axis[i] - v) ? i - 1 : i;
    }
    std::vector<double> xs_, omegas_, values_;
    double bound_ = 0.0;
};

/// Parses a symbol mask. Format: optional header "x,omega,value", then one
/// "x,omega,value" row per lattice point; the rows must fill a rectangular lattice.
/// Lines starting with '#' are ignored. Errors name the 1-based line number.
inline SymbolGrid parse_symbol_csv(std::istream& in) {
    std::map<std::pair<double, double>, double> cells;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (line_no == 1 && line.rfind("x", 0) == 0) continue;
        std::array<double, 3> v{};
        std::stringstream ss(line);
        std::string field;
        std::size_t n = 0;
        bool ok = true;
        while (std::getline(ss, field, ',')) {
            if (n == 3) {
                ok = false;
                break;
            }
            try {
                std::size_t used = 0;
                v[n] = std::stod(field, &used);
                while (used < field.size() && std::isspace(static_cast<unsigned char>(field[used]))) ++used;
                ok = ok && used == field.size() && std::isfinite(v[n]);
            } catch (const std::exception&) {
                ok = false;
            }
            ++n;
        }
        if (!ok || n != 3)
            throw Error(ErrorKind::Usage, "symbol mask row " + std::to_string(line_no) + ": expected three numbers x,omega,value");
        if (!cells.emplace(std::make_pair(v[0], v[1]), v[2]).second)
            throw Error(ErrorKind::Usage, "symbol mask row " + std::to_string(line_no) + ": duplicate lattice point");
    }
    require(!cells.empty(), ErrorKind::Usage, "symbol mask has no rows");
    std::vector<double> xs, ws;
    for (const auto& [k, value] : cells) {
        xs.push_back(k.first);
        ws.push_back(k.second);
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    std::sort(ws.begin(), ws.end());
    ws.erase(std::unique(ws.begin(), ws.end()), ws.end());
    require(cells.size() == xs.size() * ws.size(), ErrorKind::Usage,
            "symbol mask rows do not form a complete rectangular lattice");
    std::vector<double> values;
    values.reserve(cells.size());
    for (double x : xs)
        for (double w : ws) values.push_back(cells.at({x, w}));
    return SymbolGrid(std::move(xs), std::move(ws), std::move(values));
}

template <typename Frame>
PipelineResult multiply(const Signal& s, const Frame& frame, const FrameFilter& filter, const SymbolGrid& symbol,
                        const PipelineConfig& cfg) {
    return run_mc_pipeline(s, frame, filter, cfg, symbol.as_operator(), Nonlinearity::identity());
}

// ---- operation count ---------------------------------------------------------------------

struct OpCount {
    double expected = 0.0;   // 2 tau0 Z M (1 + (1-beta)/beta + ln(beta/alpha))
    double measured = 0.0;   // analysis + synthesis support samples summed over the K draws
    double fft_term = 0.0;   // two length-N FFTs for the frame-filter inversion, 5 N log2 N each
    std::size_t K = 0;
};

/// Expected and measured per-sample work of the vocoder inner loop for constant
/// transitions a = alpha R, b = beta R. The counting model draws K = Z M points with x over
/// the signal support and omega uniform on (0, R]; each draw costs the number of grid
/// samples inside the atom support, once for analysis and once for synthesis.
inline OpCount op_count(const LTFTParams& params, double rate, std::size_t M, double Z, std::uint64_t seed) {
    const auto* c = std::get_if<ConstantTransition>(&params.transition);
    require(c != nullptr, ErrorKind::InvalidParameter, "op_count needs constant transition frequencies");
    require(rate > 0.0 && M >= 1 && Z > 0.0, ErrorKind::InvalidParameter, "op_count needs R > 0, M >= 1, Z > 0");
    const double alpha = c->a / rate, beta = c->b / rate;
    const double tau0 = params.tau_mean();
    OpCount out;
    out.expected = 2.0 * tau0 * Z * static_cast<double>(M) * (1.0 + (1.0 - beta) / beta + std::log(beta / alpha));
    const double n = static_cast<double>(M + 1);
    out.fft_term = 2.0 * 5.0 * n * std::log2(n);

    PhaseDomain d;
    d.x_half = 0.5 * static_cast<double>(M) / rate;
    d.omega_lo = 0.0;
    d.omega_hi = rate;
    d.tau_min = params.tau_min;
    d.tau_max = params.tau_max;
    out.K = static_cast<std::size_t>(std::llround(Z * static_cast<double>(M)));
    const LtftFrame frame(params);
    std::mt19937_64 rng(seed);
    double total = 0.0;
    for (std::size_t k = 0; k < out.K; ++k) {
        const PhasePoint g = sample_point(d, rng);
        const Interval sup = frame.support(g);
        const double first = std::ceil(sup.lo * rate - 1e-9), last = std::floor(sup.hi * rate + 1e-9);
        total += 2.0 * std::max(0.0, last - first + 1.0);
    }
    out.measured = total;
    return out;
}

}  // namespace ltft
