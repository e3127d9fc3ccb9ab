#pragma once

#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qgcam::io {

// IDX (ubyte) container as used by the MNIST distribution: big-endian magic
// 0x0000 08 <ndims>, then one big-endian u32 per dimension, then raw bytes.

struct IdxData {
    std::vector<int> dims;
    std::vector<std::uint8_t> bytes;
};

namespace detail {

inline std::uint32_t read_be32(std::istream& f, const std::string& what) {
    std::uint8_t b[4];
    f.read(reinterpret_cast<char*>(b), 4);
    if (f.gcount() != 4) throw std::runtime_error(what + ": truncated header");
    return (static_cast<std::uint32_t>(b[0]) << 24) |
           (static_cast<std::uint32_t>(b[1]) << 16) |
           (static_cast<std::uint32_t>(b[2]) << 8) | b[3];
}

inline void write_be32(std::ostream& f, std::uint32_t v) {
    const std::uint8_t b[4] = {static_cast<std::uint8_t>(v >> 24),
                               static_cast<std::uint8_t>(v >> 16),
                               static_cast<std::uint8_t>(v >> 8),
                               static_cast<std::uint8_t>(v)};
    f.write(reinterpret_cast<const char*>(b), 4);
}

}  // namespace detail

inline IdxData read_idx(const std::string& path, std::uint32_t expected_magic) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("read_idx: cannot open " + path);
    const std::uint32_t magic = detail::read_be32(f, path);
    if (magic != expected_magic) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "0x%08x (expected 0x%08x)", magic,
                      expected_magic);
        throw std::runtime_error(path + ": magic mismatch " + buf);
    }
    const int ndims = static_cast<int>(magic & 0xff);
    IdxData data;
    std::size_t total = 1;
    for (int d = 0; d < ndims; ++d) {
        const std::uint32_t dim = detail::read_be32(f, path);
        data.dims.push_back(static_cast<int>(dim));
        total *= dim;
    }
    data.bytes.resize(total);
    f.read(reinterpret_cast<char*>(data.bytes.data()),
           static_cast<std::streamsize>(total));
    if (f.gcount() != static_cast<std::streamsize>(total))
        throw std::runtime_error(path + ": truncated payload (expected " +
                                 std::to_string(total) + " bytes)");
    return data;
}

inline void write_idx(const std::string& path, const std::vector<int>& dims,
                      const std::vector<std::uint8_t>& bytes) {
    std::size_t total = 1;
    for (int d : dims) total *= static_cast<std::size_t>(d);
    if (total != bytes.size())
        throw std::invalid_argument("write_idx: dims do not match payload size");
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("write_idx: cannot open " + path);
    detail::write_be32(f, 0x00000800u | static_cast<std::uint32_t>(dims.size()));
    for (int d : dims) detail::write_be32(f, static_cast<std::uint32_t>(d));
    f.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
    if (!f) throw std::runtime_error("write_idx: write failed for " + path);
}

inline constexpr std::uint32_t kIdxImagesMagic = 0x00000803u;
inline constexpr std::uint32_t kIdxLabelsMagic = 0x00000801u;

}  // namespace qgcam::io
