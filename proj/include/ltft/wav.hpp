#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "ltft/error.hpp"
#include "ltft/signal.hpp"

namespace ltft {

enum class SampleFormat { Pcm16, Float32 };

/// Multichannel audio; every channel has the same rate and length, origin 0.
struct Audio {
    double rate = 0.0;
    std::vector<Signal> channels;
    SampleFormat format = SampleFormat::Pcm16;

    std::size_t frames() const noexcept { return channels.empty() ? 0 : channels.front().size(); }
};

namespace detail {

inline std::uint32_t read_le(const unsigned char* p, int bytes) {
    std::uint32_t v = 0;
    for (int i = bytes - 1; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}

inline void put_le(std::string& out, std::uint32_t v, int bytes) {
    for (int i = 0; i < bytes; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

}  // namespace detail

inline Audio decode_wav(const std::string& bytes) {
    auto bad = [](const std::string& what) { return Error(ErrorKind::Io, "wav: " + what); };
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    if (bytes.size() < 12 || std::memcmp(p, "RIFF", 4) != 0 || std::memcmp(p + 8, "WAVE", 4) != 0)
        throw bad("not a RIFF/WAVE file");
    std::size_t pos = 12;
    int format = 0, channels = 0, bits = 0;
    std::uint32_t rate = 0;
    const unsigned char* data = nullptr;
    std::size_t data_size = 0;
    while (pos + 8 <= bytes.size()) {
        const std::uint32_t size = detail::read_le(p + pos + 4, 4);
        const std::size_t body = pos + 8;
        if (size > bytes.size() - body) throw bad("truncated chunk");
        if (std::memcmp(p + pos, "fmt ", 4) == 0) {
            if (size < 16) throw bad("short fmt chunk");
            format = static_cast<int>(detail::read_le(p + body, 2));
            channels = static_cast<int>(detail::read_le(p + body + 2, 2));
            rate = detail::read_le(p + body + 4, 4);
            bits = static_cast<int>(detail::read_le(p + body + 14, 2));
            if (format == 0xfffe) {
                if (size < 40) throw bad("short extensible fmt chunk");
                format = static_cast<int>(detail::read_le(p + body + 24, 2));
            }
        } else if (std::memcmp(p + pos, "data", 4) == 0) {
            data = p + body;
            data_size = size;
        }
        pos = body + size + (size & 1u);
    }
    if (format == 0 || data == nullptr) throw bad("missing fmt or data chunk");
    if (channels < 1 || channels > 2) throw bad("only mono and stereo are supported");
    if (rate == 0) throw bad("zero sample rate");
    SampleFormat sf;
    if (format == 1 && bits == 16) sf = SampleFormat::Pcm16;
    else if (format == 3 && bits == 32) sf = SampleFormat::Float32;
    else throw bad("unsupported encoding (need 16-bit PCM or 32-bit float)");

    const std::size_t width = static_cast<std::size_t>(bits / 8);
    const std::size_t frames = data_size / (width * static_cast<std::size_t>(channels));
    Audio a;
    a.rate = rate;
    a.format = sf;
    for (int c = 0; c < channels; ++c) a.channels.push_back(Signal::zeros(frames, rate, 0.0));
    for (std::size_t k = 0; k < frames; ++k)
        for (int c = 0; c < channels; ++c) {
            const unsigned char* q = data + (k * static_cast<std::size_t>(channels) + static_cast<std::size_t>(c)) * width;
            double v;
            if (sf == SampleFormat::Pcm16) {
                v = static_cast<std::int16_t>(detail::read_le(q, 2)) / 32768.0;
            } else {
                const std::uint32_t u = detail::read_le(q, 4);
                float f;
                std::memcpy(&f, &u, 4);
                v = f;
            }
            a.channels[static_cast<std::size_t>(c)].samples[k] = v;
        }
    return a;
}

/// PCM16 samples are scaled by 32768, truncated toward zero and clipped; no dither.
inline std::string encode_wav(const Audio& a) {
    require(!a.channels.empty() && a.channels.size() <= 2, ErrorKind::InvalidParameter, "wav needs 1 or 2 channels");
    const double r = std::round(a.rate);
    require(r >= 1.0 && r <= 4294967295.0 && std::abs(r - a.rate) < 1e-9, ErrorKind::InvalidParameter,
            "wav sample rate must be a positive integer");
    for (const auto& ch : a.channels)
        require(ch.size() == a.frames(), ErrorKind::InvalidParameter, "wav channels must have equal length");
    const int channels = static_cast<int>(a.channels.size());
    const int width = a.format == SampleFormat::Pcm16 ? 2 : 4;
    const auto data_size = static_cast<std::uint64_t>(a.frames()) * static_cast<std::uint64_t>(channels * width);
    require(data_size + 36 <= 0xffffffffull, ErrorKind::InvalidParameter, "wav data exceeds 4 GiB");

    std::string out = "RIFF";
    detail::put_le(out, static_cast<std::uint32_t>(36 + data_size), 4);
    out += "WAVEfmt ";
    detail::put_le(out, 16, 4);
    detail::put_le(out, a.format == SampleFormat::Pcm16 ? 1 : 3, 2);
    detail::put_le(out, static_cast<std::uint32_t>(channels), 2);
    detail::put_le(out, static_cast<std::uint32_t>(r), 4);
    detail::put_le(out, static_cast<std::uint32_t>(r) * static_cast<std::uint32_t>(channels * width), 4);
    detail::put_le(out, static_cast<std::uint32_t>(channels * width), 2);
    detail::put_le(out, static_cast<std::uint32_t>(8 * width), 2);
    out += "data";
    detail::put_le(out, static_cast<std::uint32_t>(data_size), 4);
    out.reserve(out.size() + data_size);
    for (std::size_t k = 0; k < a.frames(); ++k)
        for (const auto& ch : a.channels) {
            const double v = ch.samples[k].real();
            if (a.format == SampleFormat::Pcm16) {
                const double scaled = std::clamp(std::trunc(v * 32768.0), -32768.0, 32767.0);
                detail::put_le(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(std::isnan(scaled) ? 0.0 : scaled)), 2);
            } else {
                const float f = static_cast<float>(v);
                std::uint32_t u;
                std::memcpy(&u, &f, 4);
                detail::put_le(out, u, 4);
            }
        }
    return out;
}

inline Audio read_wav(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decode_wav(bytes);
}

inline void write_wav(const std::filesystem::path& path, const Audio& a) {
    const std::string bytes = encode_wav(a);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

}  // namespace ltft
