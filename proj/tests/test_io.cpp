#include <catch_amalgamated.hpp>

#include <cstring>
#include <filesystem>
#include <random>

#include "ltft/config.hpp"
#include "ltft/wav.hpp"

using namespace ltft;
using Catch::Matchers::ContainsSubstring;

namespace {

Audio noise_audio(std::size_t frames, int channels, SampleFormat fmt, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Audio a;
    a.rate = 44100.0;
    a.format = fmt;
    for (int c = 0; c < channels; ++c) {
        Signal s = Signal::zeros(frames, a.rate, 0.0);
        for (auto& v : s.samples) v = u(rng);
        a.channels.push_back(s);
    }
    return a;
}

std::string header_with_format(int format_tag, int bits) {
    std::string out = "RIFF";
    detail::put_le(out, 36 + 4, 4);
    out += "WAVEfmt ";
    detail::put_le(out, 16, 4);
    detail::put_le(out, static_cast<std::uint32_t>(format_tag), 2);
    detail::put_le(out, 1, 2);
    detail::put_le(out, 8000, 4);
    detail::put_le(out, 8000u * static_cast<std::uint32_t>(bits / 8), 4);
    detail::put_le(out, static_cast<std::uint32_t>(bits / 8), 2);
    detail::put_le(out, static_cast<std::uint32_t>(bits), 2);
    out += "data";
    detail::put_le(out, 4, 4);
    out += std::string(4, '\0');
    return out;
}

}  // namespace

TEST_CASE("float32 wav round trip is bit exact", "[io]") {
    const std::string bytes = encode_wav(noise_audio(257, 2, SampleFormat::Float32, 1));
    const Audio back = decode_wav(bytes);
    CHECK(back.format == SampleFormat::Float32);
    CHECK(back.channels.size() == 2);
    CHECK(back.rate == 44100.0);
    CHECK(encode_wav(back) == bytes);
}

TEST_CASE("pcm16 wav round trip is sample exact", "[io]") {
    const Audio first = decode_wav(encode_wav(noise_audio(1000, 1, SampleFormat::Pcm16, 2)));
    const std::string bytes = encode_wav(first);
    const Audio second = decode_wav(bytes);
    REQUIRE(second.frames() == 1000);
    CHECK(second.channels[0].samples == first.channels[0].samples);
    CHECK(encode_wav(second) == bytes);
    for (const auto& v : second.channels[0].samples) CHECK(std::round(v.real() * 32768.0) == v.real() * 32768.0);
}

TEST_CASE("pcm16 writes truncate toward zero and clip", "[io]") {
    Audio a;
    a.rate = 8000.0;
    Signal s = Signal::zeros(6, a.rate, 0.0);
    s.samples = {cplx{0.99999 / 32768.0}, cplx{-1.5 / 32768.0}, cplx{2.0}, cplx{-2.0}, cplx{1.0}, cplx{100.7 / 32768.0}};
    a.channels.push_back(s);
    const Audio back = decode_wav(encode_wav(a));
    const std::vector<double> expect{0.0, -1.0, 32767.0, -32768.0, 32767.0, 100.0};
    for (std::size_t k = 0; k < expect.size(); ++k) CHECK(back.channels[0].samples[k].real() * 32768.0 == expect[k]);
}

TEST_CASE("wav files on disk", "[io]") {
    const auto path = std::filesystem::temp_directory_path() / "ltft_test_io.wav";
    const Audio a = noise_audio(64, 2, SampleFormat::Float32, 3);
    write_wav(path, a);
    CHECK(read_wav(path).channels[1].samples == decode_wav(encode_wav(a)).channels[1].samples);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(read_wav(path), Error);
}

TEST_CASE("wav decoding diagnoses bad input", "[io]") {
    auto kind_of = [](const std::string& bytes) {
        try {
            decode_wav(bytes);
        } catch (const Error& e) {
            return e.kind();
        }
        return ErrorKind::InvalidParameter;
    };
    CHECK(kind_of("not a wav file at all") == ErrorKind::Io);
    CHECK_THROWS_WITH(decode_wav(header_with_format(1, 24)), ContainsSubstring("unsupported encoding"));
    CHECK_THROWS_WITH(decode_wav(header_with_format(6, 8)), ContainsSubstring("unsupported encoding"));
    std::string cut = header_with_format(1, 16);
    cut.resize(cut.size() - 2);
    CHECK_THROWS_WITH(decode_wav(cut), ContainsSubstring("truncated"));
    CHECK(decode_wav(header_with_format(3, 32)).format == SampleFormat::Float32);
}

TEST_CASE("extensible wav headers are accepted", "[io]") {
    std::string out = "RIFF";
    detail::put_le(out, 4 + 8 + 40 + 8 + 4, 4);
    out += "WAVEfmt ";
    detail::put_le(out, 40, 4);
    detail::put_le(out, 0xfffe, 2);
    detail::put_le(out, 1, 2);
    detail::put_le(out, 16000, 4);
    detail::put_le(out, 32000, 4);
    detail::put_le(out, 2, 2);
    detail::put_le(out, 16, 2);
    detail::put_le(out, 22, 2);
    detail::put_le(out, 16, 2);
    detail::put_le(out, 0, 4);
    detail::put_le(out, 1, 2);   // PCM sub-format
    out += std::string(14, '\0');
    out += "data";
    detail::put_le(out, 4, 4);
    detail::put_le(out, 16384, 2);
    detail::put_le(out, 0xc000, 2);
    const Audio a = decode_wav(out);
    CHECK(a.rate == 16000.0);
    CHECK(a.channels[0].samples[0].real() == 0.5);
    CHECK(a.channels[0].samples[1].real() == -0.5);
}

TEST_CASE("run config defaults and overrides", "[io]") {
    const RunConfig d = parse_run_config(nlohmann::json::object());
    const LTFTParams p = d.params(1000.0);
    CHECK(p.a(5.0) == 50.0);
    CHECK(p.b(5.0) == 400.0);
    CHECK(d.mode() == PipelineMode::Synthesis);

    const auto j = nlohmann::json::parse(R"({"frame": {"tau_min": 2, "a": 20, "b": 100},
                                             "pipeline": {"Z": 64, "seed": 9, "W": 2},
                                             "ops": {"stretch": 3}})");
    const RunConfig c = parse_run_config(j);
    CHECK(c.pipeline.Z == 64.0);
    CHECK(c.pipeline.seed == 9);
    CHECK(c.params(1000.0).a(2.0) == 20.0);
    // resolved config round-trips
    const nlohmann::json resolved = to_json(c, 1000.0);
    CHECK(to_json(parse_run_config(resolved), 1000.0) == resolved);
    CHECK(to_json(d, 1000.0)["frame"]["b"] == 400.0);
    CHECK(to_json(d)["frame"]["b"].is_null());
}

TEST_CASE("run config rejects unknown keys and inconsistent values", "[io]") {
    auto usage = [](const char* text) {
        try {
            parse_run_config(nlohmann::json::parse(text)).params(1000.0);
        } catch (const Error& e) {
            return e.kind() == ErrorKind::Usage;
        }
        return false;
    };
    CHECK_THROWS_WITH(parse_run_config(nlohmann::json::parse(R"({"pipeline": {"Zed": 3}})")),
                      ContainsSubstring("pipeline.Zed"));
    CHECK(usage(R"({"extra": 1})"));
    CHECK(usage(R"({"frame": {"a": 300, "b": 200}})"));
    CHECK(usage(R"({"frame": {"a": 10, "b": 1000}})"));
    CHECK(usage(R"({"frame": {"transition": "other"}})"));
    CHECK(usage(R"({"pipeline": {"W": 0.5}})"));
    CHECK(usage(R"({"pipeline": {"mode": "sideways"}})"));
    CHECK(usage(R"({"pipeline": {"Z": "many"}})"));
    CHECK(usage(R"({"ops": {"stretch": 0}})"));
    CHECK(usage(R"({"frame": {"transition": "support-pinned", "j1": 0.1, "j2": 0.2}})"));
    CHECK_FALSE(usage(R"({"frame": {"transition": "support-pinned", "j1": 0.2, "j2": 0.1}})"));
}
