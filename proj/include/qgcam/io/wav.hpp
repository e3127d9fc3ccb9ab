#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qgcam::io {

// 16-bit PCM mono 16 kHz little-endian WAV, the only flavor accepted.

namespace detail {

inline std::uint32_t read_le32(std::istream& f, const std::string& what) {
    std::uint8_t b[4];
    f.read(reinterpret_cast<char*>(b), 4);
    if (f.gcount() != 4) throw std::runtime_error(what + ": truncated");
    return b[0] | (b[1] << 8) | (b[2] << 16) |
           (static_cast<std::uint32_t>(b[3]) << 24);
}

inline std::uint16_t read_le16(std::istream& f, const std::string& what) {
    std::uint8_t b[2];
    f.read(reinterpret_cast<char*>(b), 2);
    if (f.gcount() != 2) throw std::runtime_error(what + ": truncated");
    return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

inline void write_le32(std::ostream& f, std::uint32_t v) {
    const char b[4] = {static_cast<char>(v), static_cast<char>(v >> 8),
                       static_cast<char>(v >> 16), static_cast<char>(v >> 24)};
    f.write(b, 4);
}

inline void write_le16(std::ostream& f, std::uint16_t v) {
    const char b[2] = {static_cast<char>(v), static_cast<char>(v >> 8)};
    f.write(b, 2);
}

inline std::string read_tag(std::istream& f, const std::string& what) {
    char tag[4];
    f.read(tag, 4);
    if (f.gcount() != 4) throw std::runtime_error(what + ": truncated");
    return std::string(tag, 4);
}

}  // namespace detail

// Samples normalized to [-1, 1).
inline std::vector<double> read_wav_16k_mono(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("read_wav: cannot open " + path);
    if (detail::read_tag(f, path) != "RIFF")
        throw std::runtime_error(path + ": not a RIFF file");
    detail::read_le32(f, path);  // riff size
    if (detail::read_tag(f, path) != "WAVE")
        throw std::runtime_error(path + ": not a WAVE file");

    bool have_fmt = false;
    while (true) {
        const std::string tag = detail::read_tag(f, path);
        const std::uint32_t size = detail::read_le32(f, path);
        if (tag == "fmt ") {
            const std::uint16_t format = detail::read_le16(f, path);
            const std::uint16_t channels = detail::read_le16(f, path);
            const std::uint32_t rate = detail::read_le32(f, path);
            detail::read_le32(f, path);  // byte rate
            detail::read_le16(f, path);  // block align
            const std::uint16_t bits = detail::read_le16(f, path);
            if (format != 1) throw std::runtime_error(path + ": not PCM");
            if (channels != 1) throw std::runtime_error(path + ": not mono");
            if (rate != 16000) throw std::runtime_error(path + ": not 16 kHz");
            if (bits != 16) throw std::runtime_error(path + ": not 16-bit");
            if (size > 16) f.seekg(size - 16, std::ios::cur);
            have_fmt = true;
        } else if (tag == "data") {
            if (!have_fmt) throw std::runtime_error(path + ": data before fmt");
            std::vector<double> samples(size / 2);
            for (auto& s : samples) {
                const std::uint16_t raw = detail::read_le16(f, path);
                s = static_cast<std::int16_t>(raw) / 32768.0;
            }
            return samples;
        } else {
            f.seekg(size + (size & 1), std::ios::cur);
            if (!f) throw std::runtime_error(path + ": truncated chunk list");
        }
    }
}

inline void write_wav_16k_mono(const std::string& path,
                               const std::vector<double>& samples) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("write_wav: cannot open " + path);
    const std::uint32_t data_size = static_cast<std::uint32_t>(samples.size() * 2);
    f.write("RIFF", 4);
    detail::write_le32(f, 36 + data_size);
    f.write("WAVE", 4);
    f.write("fmt ", 4);
    detail::write_le32(f, 16);
    detail::write_le16(f, 1);      // PCM
    detail::write_le16(f, 1);      // mono
    detail::write_le32(f, 16000);  // sample rate
    detail::write_le32(f, 32000);  // byte rate
    detail::write_le16(f, 2);      // block align
    detail::write_le16(f, 16);     // bits
    f.write("data", 4);
    detail::write_le32(f, data_size);
    for (double s : samples) {
        const double clamped = s < -1.0 ? -1.0 : (s > 1.0 ? 1.0 : s);
        const auto v = static_cast<std::int16_t>(std::lround(clamped * 32767.0));
        detail::write_le16(f, static_cast<std::uint16_t>(v));
    }
    if (!f) throw std::runtime_error("write_wav: write failed for " + path);
}

}  // namespace qgcam::io
