#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "ltft/error.hpp"
#include "ltft/frames.hpp"
#include "ltft/pipelines.hpp"

namespace ltft {

namespace detail {
inline std::string num(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}
}  // namespace detail

/// Run settings shared by the CLI commands. a and b default to 0.05 R and 0.4 R once R is known.
struct RunConfig {
    struct Frame {
        double tau_min = 3.0;
        double tau_max = 8.0;
        std::string transition = "constant";   // or "support-pinned"
        std::optional<double> a, b;            // Hz
        double j1 = 0.0, j2 = 0.0;             // seconds, support-pinned only
        std::string tau_measure = "probability";
    } frame;
    struct Pipeline {
        std::string mode = "synthesis";
        double W = 1.0;
        double Z = 16.0;
        std::size_t K = 0;
        std::size_t L = 0;
        std::uint64_t seed = 1;
        unsigned workers = 0;
    } pipeline;
    struct Io {
        std::string input, output, mask, log, cache_dir;
    } io;
    struct Ops {
        int stretch = 2;
        double threshold = 0.0;
    } ops;

    /// LTFT parameters for sample rate R; inconsistent values are usage errors.
    LTFTParams params(double rate) const {
        LTFTParams p;
        p.tau_min = frame.tau_min;
        p.tau_max = frame.tau_max;
        if (frame.transition == "constant") {
            const double a = frame.a.value_or(0.05 * rate), b = frame.b.value_or(0.4 * rate);
            if (!(a > 0.0 && a < b)) throw Error(ErrorKind::Usage, "need 0 < a < b (a=" + detail::num(a) + ", b=" + detail::num(b) + ")");
            if (!(b < rate)) throw Error(ErrorKind::Usage, "need b < R (b=" + detail::num(b) + ", R=" + detail::num(rate) + ")");
            p.transition = ConstantTransition{a, b};
        } else if (frame.transition == "support-pinned") {
            if (!(frame.j1 > frame.j2 && frame.j2 > 0.0)) throw Error(ErrorKind::Usage, "need j1 > j2 > 0");
            p.transition = SupportPinnedTransition{frame.j1, frame.j2};
            if (!(p.b(p.tau_max) < rate)) throw Error(ErrorKind::Usage, "need b_tau < R for every tau");
        } else {
            throw Error(ErrorKind::Usage, "unknown transition '" + frame.transition + "'");
        }
        if (frame.tau_measure == "probability") p.tau_measure = TauMeasure::Probability;
        else if (frame.tau_measure == "lebesgue") p.tau_measure = TauMeasure::Lebesgue;
        else throw Error(ErrorKind::Usage, "unknown tau_measure '" + frame.tau_measure + "'");
        try {
            p.validate();
        } catch (const Error& e) {
            throw Error(ErrorKind::Usage, e.what());
        }
        return p;
    }

    PipelineMode mode() const {
        if (pipeline.mode == "synthesis") return PipelineMode::Synthesis;
        if (pipeline.mode == "analysis") return PipelineMode::Analysis;
        throw Error(ErrorKind::Usage, "unknown pipeline mode '" + pipeline.mode + "'");
    }

    void validate() const {
        if (!(pipeline.W >= 1.0)) throw Error(ErrorKind::Usage, "W must be >= 1");
        if (!(pipeline.Z > 0.0) && pipeline.K == 0) throw Error(ErrorKind::Usage, "Z must be > 0 when K is not set");
        if (ops.stretch < 1) throw Error(ErrorKind::Usage, "stretch must be >= 1");
        if (!(ops.threshold >= 0.0)) throw Error(ErrorKind::Usage, "threshold must be >= 0");
        if (!(frame.tau_min > 0.0 && frame.tau_max >= frame.tau_min)) throw Error(ErrorKind::Usage, "need 0 < tau_min <= tau_max");
        mode();
    }
};

namespace detail {

inline void reject_unknown(const nlohmann::json& j, const std::string& where, const std::set<std::string>& known) {
    if (!j.is_object()) throw Error(ErrorKind::Usage, "config: '" + where + "' must be an object");
    for (const auto& item : j.items())
        if (!known.count(item.key())) throw Error(ErrorKind::Usage, "config: unknown key '" + where + item.key() + "'");
}

template <typename T>
void take(const nlohmann::json& j, const char* key, T& out, const std::string& where) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw Error(ErrorKind::Usage, "config: bad value for '" + where + key + "'");
    }
}

template <typename T>
void take(const nlohmann::json& j, const char* key, std::optional<T>& out, const std::string& where) {
    if (!j.contains(key)) return;
    if (j.at(key).is_null()) {
        out.reset();
        return;
    }
    T v{};
    take(j, key, v, where);
    out = v;
}

}  // namespace detail

inline RunConfig parse_run_config(const nlohmann::json& j) {
    RunConfig c;
    detail::reject_unknown(j, "", {"frame", "pipeline", "io", "ops"});
    if (j.contains("frame")) {
        const auto& f = j["frame"];
        detail::reject_unknown(f, "frame.", {"tau_min", "tau_max", "transition", "a", "b", "j1", "j2", "tau_measure"});
        detail::take(f, "tau_min", c.frame.tau_min, "frame.");
        detail::take(f, "tau_max", c.frame.tau_max, "frame.");
        detail::take(f, "transition", c.frame.transition, "frame.");
        detail::take(f, "a", c.frame.a, "frame.");
        detail::take(f, "b", c.frame.b, "frame.");
        detail::take(f, "j1", c.frame.j1, "frame.");
        detail::take(f, "j2", c.frame.j2, "frame.");
        detail::take(f, "tau_measure", c.frame.tau_measure, "frame.");
    }
    if (j.contains("pipeline")) {
        const auto& p = j["pipeline"];
        detail::reject_unknown(p, "pipeline.", {"mode", "W", "Z", "K", "L", "seed", "workers"});
        detail::take(p, "mode", c.pipeline.mode, "pipeline.");
        detail::take(p, "W", c.pipeline.W, "pipeline.");
        detail::take(p, "Z", c.pipeline.Z, "pipeline.");
        detail::take(p, "K", c.pipeline.K, "pipeline.");
        detail::take(p, "L", c.pipeline.L, "pipeline.");
        detail::take(p, "seed", c.pipeline.seed, "pipeline.");
        detail::take(p, "workers", c.pipeline.workers, "pipeline.");
    }
    if (j.contains("io")) {
        const auto& io = j["io"];
        detail::reject_unknown(io, "io.", {"input", "output", "mask", "log", "cache_dir"});
        detail::take(io, "input", c.io.input, "io.");
        detail::take(io, "output", c.io.output, "io.");
        detail::take(io, "mask", c.io.mask, "io.");
        detail::take(io, "log", c.io.log, "io.");
        detail::take(io, "cache_dir", c.io.cache_dir, "io.");
    }
    if (j.contains("ops")) {
        const auto& o = j["ops"];
        detail::reject_unknown(o, "ops.", {"stretch", "threshold"});
        detail::take(o, "stretch", c.ops.stretch, "ops.");
        detail::take(o, "threshold", c.ops.threshold, "ops.");
    }
    c.validate();
    return c;
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open config " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorKind::Usage, "config " + path.string() + ": " + e.what());
    }
    return parse_run_config(j);
}

/// Fully resolved config (a and b filled in for `rate` when given).
inline nlohmann::json to_json(const RunConfig& c, std::optional<double> rate = std::nullopt) {
    nlohmann::json f = {{"tau_min", c.frame.tau_min}, {"tau_max", c.frame.tau_max}, {"transition", c.frame.transition},
                        {"tau_measure", c.frame.tau_measure}};
    if (c.frame.transition == "constant") {
        auto ab = [&](const std::optional<double>& v, double frac) -> nlohmann::json {
            if (v) return *v;
            if (rate) return frac * *rate;
            return nullptr;
        };
        f["a"] = ab(c.frame.a, 0.05);
        f["b"] = ab(c.frame.b, 0.4);
    } else {
        f["j1"] = c.frame.j1;
        f["j2"] = c.frame.j2;
    }
    return {{"frame", f},
            {"pipeline",
             {{"mode", c.pipeline.mode}, {"W", c.pipeline.W}, {"Z", c.pipeline.Z}, {"K", c.pipeline.K}, {"L", c.pipeline.L},
              {"seed", c.pipeline.seed}, {"workers", c.pipeline.workers}}},
            {"io",
             {{"input", c.io.input}, {"output", c.io.output}, {"mask", c.io.mask}, {"log", c.io.log}, {"cache_dir", c.io.cache_dir}}},
            {"ops", {{"stretch", c.ops.stretch}, {"threshold", c.ops.threshold}}}};
}

}  // namespace ltft
