#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qgcam::io {

// 8-bit grayscale image helpers plus a minimal deterministic PNG encoder.
// The PNG path writes stored (uncompressed) deflate blocks, so the output
// bytes depend only on the pixel data.

inline std::uint8_t quantize(double v) {
    const double clamped = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
    return static_cast<std::uint8_t>(std::lround(clamped * 255.0));
}

// ---- PGM (P5, maxval 255) ----

inline std::string pgm_bytes(int height, int width,
                             const std::vector<std::uint8_t>& pixels) {
    if (pixels.size() != static_cast<std::size_t>(height) * width)
        throw std::invalid_argument("pgm_bytes: pixel count mismatch");
    std::string out = "P5\n" + std::to_string(width) + " " + std::to_string(height) +
                      "\n255\n";
    out.append(reinterpret_cast<const char*>(pixels.data()), pixels.size());
    return out;
}

inline void write_pgm(const std::string& path, int height, int width,
                      const std::vector<std::uint8_t>& pixels) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("write_pgm: cannot open " + path);
    const std::string bytes = pgm_bytes(height, width, pixels);
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw std::runtime_error("write_pgm: write failed for " + path);
}

struct GrayImage {
    int height = 0;
    int width = 0;
    std::vector<std::uint8_t> pixels;
};

inline GrayImage read_pgm(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("read_pgm: cannot open " + path);
    std::string magic;
    f >> magic;
    if (magic != "P5") throw std::runtime_error("read_pgm: not a P5 PGM: " + path);
    const auto next_token = [&] {
        std::string tok;
        while (f >> tok) {
            if (tok[0] == '#') {
                std::string rest;
                std::getline(f, rest);
                continue;
            }
            return tok;
        }
        throw std::runtime_error("read_pgm: truncated header: " + path);
    };
    GrayImage img;
    img.width = std::stoi(next_token());
    img.height = std::stoi(next_token());
    const int maxval = std::stoi(next_token());
    if (maxval != 255) throw std::runtime_error("read_pgm: unsupported maxval");
    f.get();  // single whitespace after header
    img.pixels.resize(static_cast<std::size_t>(img.width) * img.height);
    f.read(reinterpret_cast<char*>(img.pixels.data()),
           static_cast<std::streamsize>(img.pixels.size()));
    if (f.gcount() != static_cast<std::streamsize>(img.pixels.size()))
        throw std::runtime_error("read_pgm: truncated pixel data: " + path);
    return img;
}

// ---- Heat colormap ----

// Five-stop ramp, linearly interpolated:
//   0.00 -> (0,0,0)  0.25 -> (128,0,0)  0.50 -> (255,0,0)
//   0.75 -> (255,255,0)  1.00 -> (255,255,255)
inline std::array<std::uint8_t, 3> heat_color(double t) {
    static constexpr double stops[5][3] = {{0, 0, 0},
                                           {128, 0, 0},
                                           {255, 0, 0},
                                           {255, 255, 0},
                                           {255, 255, 255}};
    const double clamped = t < 0.0 ? 0.0 : (t > 1.0 ? 1.0 : t);
    const double pos = clamped * 4.0;
    const int lo = std::min(static_cast<int>(pos), 3);
    const double f = pos - lo;
    std::array<std::uint8_t, 3> rgb{};
    for (int c = 0; c < 3; ++c)
        rgb[c] = static_cast<std::uint8_t>(
            std::lround(stops[lo][c] * (1.0 - f) + stops[lo + 1][c] * f));
    return rgb;
}

// Heat colormap at 50% alpha over a grayscale base.
inline std::vector<std::uint8_t> overlay_rgb(const std::vector<std::uint8_t>& base,
                                             const std::vector<double>& heat) {
    if (base.size() != heat.size())
        throw std::invalid_argument("overlay_rgb: size mismatch");
    std::vector<std::uint8_t> rgb(base.size() * 3);
    for (std::size_t i = 0; i < base.size(); ++i) {
        const auto hc = heat_color(heat[i]);
        for (int c = 0; c < 3; ++c)
            rgb[3 * i + c] = static_cast<std::uint8_t>(
                std::lround(0.5 * base[i] + 0.5 * hc[c]));
    }
    return rgb;
}

// ---- PNG (8-bit RGB, stored deflate) ----

namespace detail {

inline std::uint32_t crc32(const std::uint8_t* data, std::size_t len,
                           std::uint32_t crc = 0) {
    static const auto table = [] {
        std::array<std::uint32_t, 256> t{};
        for (std::uint32_t i = 0; i < 256; ++i) {
            std::uint32_t c = i;
            for (int k = 0; k < 8; ++k)
                c = (c & 1) ? 0xedb88320u ^ (c >> 1) : c >> 1;
            t[i] = c;
        }
        return t;
    }();
    crc ^= 0xffffffffu;
    for (std::size_t i = 0; i < len; ++i)
        crc = table[(crc ^ data[i]) & 0xff] ^ (crc >> 8);
    return crc ^ 0xffffffffu;
}

inline std::uint32_t adler32(const std::uint8_t* data, std::size_t len) {
    std::uint32_t a = 1, b = 0;
    for (std::size_t i = 0; i < len; ++i) {
        a = (a + data[i]) % 65521u;
        b = (b + a) % 65521u;
    }
    return (b << 16) | a;
}

inline void put_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

inline void put_chunk(std::vector<std::uint8_t>& out, const char type[4],
                      const std::vector<std::uint8_t>& payload) {
    put_be32(out, static_cast<std::uint32_t>(payload.size()));
    std::vector<std::uint8_t> body(type, type + 4);
    body.insert(body.end(), payload.begin(), payload.end());
    out.insert(out.end(), body.begin(), body.end());
    put_be32(out, crc32(body.data(), body.size()));
}

}  // namespace detail

inline std::vector<std::uint8_t> png_bytes(int height, int width,
                                           const std::vector<std::uint8_t>& rgb) {
    if (rgb.size() != static_cast<std::size_t>(height) * width * 3)
        throw std::invalid_argument("png_bytes: pixel count mismatch");

    std::vector<std::uint8_t> out = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

    std::vector<std::uint8_t> ihdr;
    detail::put_be32(ihdr, static_cast<std::uint32_t>(width));
    detail::put_be32(ihdr, static_cast<std::uint32_t>(height));
    ihdr.push_back(8);  // bit depth
    ihdr.push_back(2);  // truecolor
    ihdr.push_back(0);  // deflate
    ihdr.push_back(0);  // adaptive filtering
    ihdr.push_back(0);  // no interlace
    detail::put_chunk(out, "IHDR", ihdr);

    // Raw scanlines, filter byte 0 per row.
    std::vector<std::uint8_t> raw;
    raw.reserve(static_cast<std::size_t>(height) * (1 + 3 * width));
    for (int i = 0; i < height; ++i) {
        raw.push_back(0);
        const std::size_t row = static_cast<std::size_t>(i) * width * 3;
        raw.insert(raw.end(), rgb.begin() + row, rgb.begin() + row + 3 * width);
    }

    // zlib stream of stored deflate blocks (max 65535 bytes each).
    std::vector<std::uint8_t> idat = {0x78, 0x01};
    std::size_t pos = 0;
    while (pos < raw.size() || raw.empty()) {
        const std::size_t chunk = std::min<std::size_t>(65535, raw.size() - pos);
        const bool last = pos + chunk == raw.size();
        idat.push_back(last ? 1 : 0);
        idat.push_back(static_cast<std::uint8_t>(chunk & 0xff));
        idat.push_back(static_cast<std::uint8_t>(chunk >> 8));
        idat.push_back(static_cast<std::uint8_t>(~chunk & 0xff));
        idat.push_back(static_cast<std::uint8_t>((~chunk >> 8) & 0xff));
        idat.insert(idat.end(), raw.begin() + pos, raw.begin() + pos + chunk);
        pos += chunk;
        if (raw.empty()) break;
    }
    detail::put_be32(idat, detail::adler32(raw.data(), raw.size()));
    detail::put_chunk(out, "IDAT", idat);
    detail::put_chunk(out, "IEND", {});
    return out;
}

inline void write_png(const std::string& path, int height, int width,
                      const std::vector<std::uint8_t>& rgb) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("write_png: cannot open " + path);
    const auto bytes = png_bytes(height, width, rgb);
    f.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
    if (!f) throw std::runtime_error("write_png: write failed for " + path);
}

}  // namespace qgcam::io
