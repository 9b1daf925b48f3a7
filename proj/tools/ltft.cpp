// ltft command-line front end. Exit codes: 0 ok, 1 acceptance rows failed, 2 usage or input
// error, 3 numerical failure.
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ltft/ltft.hpp"

using namespace ltft;
using nlohmann::json;

namespace {

struct Overrides {
    std::string config;
    std::optional<double> tau_min, tau_max, a, b, W, Z, threshold;
    std::optional<std::size_t> K;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> workers;
    std::optional<int> stretch;
    std::optional<std::string> mode, input, output, mask, log, cache_dir;

    RunConfig resolve() const {
        RunConfig c = config.empty() ? RunConfig{} : load_run_config(config);
        auto set = [](auto& dst, const auto& src) {
            if (src) dst = *src;
        };
        set(c.frame.tau_min, tau_min);
        set(c.frame.tau_max, tau_max);
        if (a) c.frame.a = *a;
        if (b) c.frame.b = *b;
        set(c.pipeline.W, W);
        set(c.pipeline.Z, Z);
        set(c.pipeline.K, K);
        set(c.pipeline.seed, seed);
        set(c.pipeline.workers, workers);
        set(c.pipeline.mode, mode);
        set(c.ops.stretch, stretch);
        set(c.ops.threshold, threshold);
        set(c.io.input, input);
        set(c.io.output, output);
        set(c.io.mask, mask);
        set(c.io.log, log);
        set(c.io.cache_dir, cache_dir);
        c.validate();
        return c;
    }
};

void add_frame_options(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config, "JSON run configuration")->check(CLI::ExistingFile);
    cmd->add_option("--tau-min", o.tau_min, "smallest oscillation count");
    cmd->add_option("--tau-max", o.tau_max, "largest oscillation count");
    cmd->add_option("--a", o.a, "lower transition frequency in Hz (default 0.05 R)");
    cmd->add_option("--b", o.b, "upper transition frequency in Hz (default 0.4 R)");
    cmd->add_option("--log", o.log, "write a JSON run log here");
}

void add_audio_options(CLI::App* cmd, Overrides& o) {
    add_frame_options(cmd, o);
    cmd->add_option("--input", o.input, "input WAV (16-bit PCM or 32-bit float)");
    cmd->add_option("--output", o.output, "output WAV");
    cmd->add_option("--z", o.Z, "samples per unit of phase-space volume");
    cmd->add_option("--k", o.K, "number of samples (overrides --z)");
    cmd->add_option("--seed", o.seed, "random seed");
    cmd->add_option("--w", o.W, "frequency extent factor W >= 1");
    cmd->add_option("--workers", o.workers, "worker threads (0 = all cores)");
    cmd->add_option("--mode", o.mode, "synthesis or analysis");
    cmd->add_option("--cache-dir", o.cache_dir, "directory for cached frame filters");
}

std::uint64_t channel_seed(std::uint64_t seed, std::size_t channel) {
    if (channel == 0) return seed;
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * channel;   // splitmix64 step
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

void write_log(const RunConfig& c, const json& log) {
    if (c.io.log.empty()) return;
    std::ofstream out(c.io.log);
    if (!out) throw Error(ErrorKind::Io, "cannot write log " + c.io.log);
    out << log.dump(2) << '\n';
}

enum class AudioOp { Vocode, Denoise, Multiply };

int run_audio(const std::string& name, AudioOp op, const Overrides& o) {
    const RunConfig c = o.resolve();
    if (c.io.input.empty() || c.io.output.empty()) throw Error(ErrorKind::Usage, "--input and --output are required");
    std::optional<SymbolGrid> symbol;
    if (op == AudioOp::Multiply) {
        if (c.io.mask.empty()) throw Error(ErrorKind::Usage, "--mask is required");
        std::ifstream in(c.io.mask);
        if (!in) throw Error(ErrorKind::Usage, "cannot open mask " + c.io.mask);
        symbol = parse_symbol_csv(in);
    }
    const Audio in = read_wav(c.io.input);
    if (in.frames() < 2) throw Error(ErrorKind::Usage, "input has fewer than two samples");
    const double rate = in.rate;
    const LTFTParams params = c.params(rate);
    const LtftFrame frame(params);
    const std::size_t n = in.frames();
    const FrameFilter ff = c.io.cache_dir.empty() ? build_frame_filter_for(params, rate, n)
                                                  : cached_frame_filter(c.io.cache_dir, params, rate, n);

    json log = {{"command", name}, {"config", to_json(c, rate)}, {"input", {{"rate", rate}, {"frames", n}, {"channels", in.channels.size()}}}};
    log["frame_filter"] = {{"A_est", ff.a_est()}, {"B_est", ff.b_est()}, {"key", ff.key()}};
    Audio out;
    out.rate = rate;
    out.format = in.format;
    for (std::size_t ch = 0; ch < in.channels.size(); ++ch) {
        Signal s = Signal::centered(in.channels[ch].samples, rate);
        PipelineConfig cfg;
        cfg.mode = c.mode();
        cfg.K = c.pipeline.K;
        cfg.Z = c.pipeline.Z;
        cfg.seed = channel_seed(c.pipeline.seed, ch);
        cfg.workers = static_cast<int>(c.pipeline.workers);
        cfg.domain = ltft_domain(static_cast<double>(n - 1), rate, c.pipeline.W, params);
        PipelineResult r;
        switch (op) {
            case AudioOp::Vocode: r = phase_vocoder(s, frame, ff, c.ops.stretch, cfg); break;
            case AudioOp::Denoise: r = denoise(s, frame, ff, c.ops.threshold, cfg); break;
            case AudioOp::Multiply: r = multiply(s, frame, ff, *symbol, cfg); break;
        }
        Signal o_ch = r.output;
        o_ch.origin = 0.0;
        out.channels.push_back(o_ch);
        log["channels"].push_back({{"seed", cfg.seed},
                                   {"K", r.stats.K},
                                   {"measure", r.stats.measure},
                                   {"normalization", r.stats.normalization},
                                   {"op_count", r.stats.support_samples},
                                   {"seconds", r.stats.seconds}});
        std::fprintf(stderr, "%s channel %zu: K=%zu mu=%.6g op_count=%llu %.2fs\n", name.c_str(), ch, r.stats.K, r.stats.measure,
                     static_cast<unsigned long long>(r.stats.support_samples), r.stats.seconds);
    }
    write_wav(c.io.output, out);
    write_log(c, log);
    return 0;
}

struct VerifyOptions {
    std::string csv;
    std::size_t M = 0;
    int signals = 0;
    int seeds = 20;
    int k_min = 10, k_max = 16;
};

int emit(const std::string& name, const RunConfig& c, const VerifyOptions& v, const std::vector<verify::Row>& rows) {
    std::ofstream file;
    if (!v.csv.empty()) {
        file.open(v.csv);
        if (!file) throw Error(ErrorKind::Io, "cannot write " + v.csv);
    }
    std::ostream& os = v.csv.empty() ? std::cout : file;
    verify::write_csv_header(os);
    verify::write_csv(os, rows);
    std::size_t failed = 0;
    for (const auto& r : rows) failed += r.pass ? 0 : 1;
    json log = {{"command", name}, {"config", to_json(c)}, {"rows", rows.size()}, {"failed", failed}};
    write_log(c, log);
    std::fprintf(stderr, "%s: %zu rows, %zu failed\n", name.c_str(), rows.size(), failed);
    return failed == 0 ? 0 : 1;
}

std::optional<LTFTParams> frame_override(const RunConfig& c, double rate, const Overrides& o) {
    if (o.config.empty() && !o.tau_min && !o.tau_max && !o.a && !o.b) return std::nullopt;
    return c.params(rate);
}

void append(std::vector<verify::Row>& dst, const std::vector<verify::Row>& src) { dst.insert(dst.end(), src.begin(), src.end()); }

int exit_code(const Error& e) {
    switch (e.kind()) {
        case ErrorKind::Usage:
        case ErrorKind::InvalidParameter:
        case ErrorKind::Io: return 2;
        default: return 3;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"LTFT frames and Monte Carlo phase-space processing"};
    app.require_subcommand(1);

    Overrides vo, dn, mu, vf, bc, bl;
    auto* vocode = app.add_subcommand("vocode", "time-stretch by an integer factor");
    add_audio_options(vocode, vo);
    vocode->add_option("--stretch", vo.stretch, "integer stretch factor >= 1");

    auto* den = app.add_subcommand("denoise", "soft-threshold phase-space coefficients");
    add_audio_options(den, dn);
    den->add_option("--threshold", dn.threshold, "soft threshold on coefficient magnitude");

    auto* mul = app.add_subcommand("multiply", "apply a phase-space multiplier");
    add_audio_options(mul, mu);
    mul->add_option("--mask", mu.mask, "CSV rows x,omega,value on a rectangular lattice");

    VerifyOptions vfo, bco, blo;
    auto* vframe = app.add_subcommand("verify-frame", "frame filter, reconstruction, Parseval and atom transform checks");
    add_frame_options(vframe, vf);
    vframe->add_option("--csv", vfo.csv, "write rows here instead of stdout");
    vframe->add_option("--m", vfo.M, "signal length M (default 512 for the filter check, 1024 for reconstruction)");
    vframe->add_option("--signals", vfo.signals, "number of random signals per check");

    auto* bconv = app.add_subcommand("bench-convergence", "Monte Carlo convergence, vocoder sanity and operation counts");
    add_frame_options(bconv, bc);
    bconv->add_option("--csv", bco.csv, "write rows here instead of stdout");
    bconv->add_option("--m", bco.M, "signal length M (default 512)");
    bconv->add_option("--seeds", bco.seeds, "seeds per K")->check(CLI::Range(1, 10000));
    bconv->add_option("--k-min", bco.k_min, "smallest K as a power of two");
    bconv->add_option("--k-max", bco.k_max, "largest K as a power of two");

    auto* blvd = app.add_subcommand("bench-lvd", "linear volume growth and truncation error (LTFT and CWT)");
    blvd->add_option("--config", bl.config, "JSON run configuration")->check(CLI::ExistingFile);
    blvd->add_option("--log", bl.log, "write a JSON run log here");
    blvd->add_option("--csv", blo.csv, "write rows here instead of stdout");
    blvd->add_option("--signals", blo.signals, "signals per M");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*vocode) return run_audio("vocode", AudioOp::Vocode, vo);
        if (*den) return run_audio("denoise", AudioOp::Denoise, dn);
        if (*mul) return run_audio("multiply", AudioOp::Multiply, mu);
        if (*vframe) {
            const RunConfig c = vf.resolve();
            const std::size_t m1 = vfo.M ? vfo.M : 512, m2 = vfo.M ? vfo.M : 1024;
            std::vector<verify::Row> rows;
            append(rows, verify::criterion_frame_filter(m1, vfo.signals ? vfo.signals : 10, 2.0, frame_override(c, static_cast<double>(m1), vf)));
            append(rows, verify::criterion_reconstruction(m2, vfo.signals ? vfo.signals : 5, 2.0, frame_override(c, static_cast<double>(m2), vf)));
            append(rows, verify::criterion_stft_parseval(m1));
            append(rows, verify::criterion_atom_ft(static_cast<double>(m1)));
            return emit("verify-frame", c, vfo, rows);
        }
        if (*bconv) {
            const RunConfig c = bc.resolve();
            if (bco.k_max - bco.k_min < 3 || bco.k_min < 1 || bco.k_max > 30)
                throw Error(ErrorKind::Usage, "need 1 <= k-min and k-max - k-min >= 3 (k-max <= 30)");
            const std::size_t m = bco.M ? bco.M : 512;
            std::vector<verify::Row> rows;
            const auto summary = verify::criterion_convergence(m, bco.seeds, bco.k_min, bco.k_max, &rows, nullptr,
                                                               frame_override(c, static_cast<double>(m), bc));
            append(rows, summary);
            append(rows, verify::criterion_vocoder(8000.0, 440.0, 64.0, c.pipeline.seed, frame_override(c, 8000.0, bc)));
            append(rows, verify::criterion_complexity());
            return emit("bench-convergence", c, bco, rows);
        }
        if (*blvd) {
            const RunConfig c = bl.resolve();
            std::vector<verify::Row> rows = verify::criterion_lvd({256, 512, 1024, 2048}, {1.0, 2.0, 4.0}, blo.signals ? blo.signals : 2);
            append(rows, verify::criterion_cwt(256, 4.0, blo.signals ? blo.signals : 5));
            return emit("bench-lvd", c, blo, rows);
        }
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_code(e);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 2;
}
