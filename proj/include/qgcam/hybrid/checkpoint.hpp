#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qgcam/hybrid/model.hpp"
#include "qgcam/vqc/circuit.hpp"

namespace qgcam::hybrid {

// Versioned binary container:
//   magic "QGCM" | u32 version | dimension table (u32 each) |
//   all weight blocks as little-endian f64 in declared order |
//   u64 length-prefixed UTF-8 JSON circuit description.
//
// Dimension table: input C,H,W; stage count; per stage in,out,kernel,stride,
// pad,pool; flat dim; qubits; blocks; classes.
inline constexpr std::uint32_t kCheckpointVersion = 1;

namespace detail {

inline void put_u32(std::string& out, std::uint32_t v) {
    for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
}

inline void put_u64(std::string& out, std::uint64_t v) {
    for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
}

inline std::uint64_t bswap64(std::uint64_t v) {
    std::uint64_t out = 0;
    for (int b = 0; b < 8; ++b) out = (out << 8) | ((v >> (8 * b)) & 0xff);
    return out;
}

inline void put_f64(std::string& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    if constexpr (std::endian::native == std::endian::big) bits = bswap64(bits);
    put_u64(out, bits);
}

inline void put_block(std::string& out, const std::vector<double>& v) {
    for (double x : v) put_f64(out, x);
}

class Reader {
public:
    Reader(const std::string& bytes, std::string what)
        : bytes_(bytes), what_(std::move(what)) {}

    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int b = 0; b < 4; ++b)
            v |= static_cast<std::uint32_t>(
                     static_cast<unsigned char>(bytes_[pos_ + b]))
                 << (8 * b);
        pos_ += 4;
        return v;
    }

    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int b = 0; b < 8; ++b)
            v |= static_cast<std::uint64_t>(
                     static_cast<unsigned char>(bytes_[pos_ + b]))
                 << (8 * b);
        pos_ += 8;
        return v;
    }

    double f64() {
        std::uint64_t bits = u64();
        if constexpr (std::endian::native == std::endian::big) bits = bswap64(bits);
        double v;
        std::memcpy(&v, &bits, sizeof v);
        return v;
    }

    void block(std::vector<double>& v, std::size_t count) {
        v.resize(count);
        for (auto& x : v) x = f64();
    }

    std::string raw(std::size_t count) {
        need(count);
        std::string s = bytes_.substr(pos_, count);
        pos_ += count;
        return s;
    }

    bool exhausted() const { return pos_ == bytes_.size(); }

private:
    void need(std::size_t count) const {
        if (pos_ + count > bytes_.size())
            throw std::runtime_error(what_ + ": truncated checkpoint");
    }

    const std::string& bytes_;
    std::string what_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline std::string serialize_checkpoint(const HybridModel& m) {
    m.validate();
    std::string out = "QGCM";
    detail::put_u32(out, kCheckpointVersion);
    detail::put_u32(out, static_cast<std::uint32_t>(m.input_c));
    detail::put_u32(out, static_cast<std::uint32_t>(m.input_h));
    detail::put_u32(out, static_cast<std::uint32_t>(m.input_w));
    detail::put_u32(out, static_cast<std::uint32_t>(m.net.stages.size()));
    for (const auto& stage : m.net.stages) {
        detail::put_u32(out, static_cast<std::uint32_t>(stage.spec.in_channels));
        detail::put_u32(out, static_cast<std::uint32_t>(stage.spec.out_channels));
        detail::put_u32(out, static_cast<std::uint32_t>(stage.spec.kernel));
        detail::put_u32(out, static_cast<std::uint32_t>(stage.spec.stride));
        detail::put_u32(out, static_cast<std::uint32_t>(stage.spec.padding));
        detail::put_u32(out, stage.pool ? 1 : 0);
    }
    detail::put_u32(out, static_cast<std::uint32_t>(m.flat_dim));
    detail::put_u32(out, static_cast<std::uint32_t>(m.qubits));
    detail::put_u32(out, static_cast<std::uint32_t>(m.circuit.ansatz.blocks));
    detail::put_u32(out, static_cast<std::uint32_t>(m.classes));

    for (const auto& stage : m.net.stages) {
        detail::put_block(out, stage.kernels);
        detail::put_block(out, stage.biases);
    }
    detail::put_block(out, m.projection.data());
    detail::put_block(out, m.projection_bias);
    detail::put_block(out, m.theta.theta);
    detail::put_block(out, m.readout.data());
    detail::put_block(out, m.readout_bias);

    const std::string json = vqc::circuit_to_json(m.circuit).dump();
    detail::put_u64(out, json.size());
    out += json;
    return out;
}

inline HybridModel deserialize_checkpoint(const std::string& bytes,
                                          const std::string& what = "checkpoint") {
    detail::Reader r(bytes, what);
    if (r.raw(4) != "QGCM")
        throw std::runtime_error(what + ": bad magic (not a QGCM checkpoint)");
    const std::uint32_t version = r.u32();
    if (version != kCheckpointVersion)
        throw std::runtime_error(what + ": unsupported version " +
                                 std::to_string(version));

    HybridModel m;
    m.input_c = static_cast<int>(r.u32());
    m.input_h = static_cast<int>(r.u32());
    m.input_w = static_cast<int>(r.u32());
    const std::uint32_t stages = r.u32();
    for (std::uint32_t s = 0; s < stages; ++s) {
        cnn::ConvStage stage;
        stage.spec.in_channels = static_cast<int>(r.u32());
        stage.spec.out_channels = static_cast<int>(r.u32());
        stage.spec.kernel = static_cast<int>(r.u32());
        stage.spec.stride = static_cast<int>(r.u32());
        stage.spec.padding = static_cast<int>(r.u32());
        stage.pool = r.u32() != 0;
        m.net.stages.push_back(std::move(stage));
    }
    m.flat_dim = static_cast<int>(r.u32());
    m.qubits = static_cast<int>(r.u32());
    const int blocks = static_cast<int>(r.u32());
    m.classes = static_cast<int>(r.u32());

    for (auto& stage : m.net.stages) {
        r.block(stage.kernels, stage.spec.kernel_count());
        r.block(stage.biases, static_cast<std::size_t>(stage.spec.out_channels));
    }
    m.projection = RealMatrix(m.qubits, m.flat_dim);
    r.block(m.projection.data(), static_cast<std::size_t>(m.qubits) * m.flat_dim);
    r.block(m.projection_bias, static_cast<std::size_t>(m.qubits));
    r.block(m.theta.theta, static_cast<std::size_t>(m.qubits) * blocks);
    m.readout = RealMatrix(m.classes, m.classes);
    r.block(m.readout.data(), static_cast<std::size_t>(m.classes) * m.classes);
    r.block(m.readout_bias, static_cast<std::size_t>(m.classes));

    const std::uint64_t json_len = r.u64();
    const std::string json = r.raw(json_len);
    m.circuit = vqc::circuit_from_json(nlohmann::json::parse(json));
    if (!r.exhausted())
        throw std::runtime_error(what + ": trailing bytes after checkpoint");

    m.net.output_shape(m.input_c, m.input_h, m.input_w, m.map_c, m.map_h, m.map_w);
    if (m.map_c * m.map_h * m.map_w != m.flat_dim)
        throw std::runtime_error(what + ": dimension table inconsistent");
    m.validate();
    return m;
}

inline void save_checkpoint(const HybridModel& m, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("save_checkpoint: cannot open " + path);
    const std::string bytes = serialize_checkpoint(m);
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw std::runtime_error("save_checkpoint: write failed for " + path);
}

inline HybridModel load_checkpoint(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("load_checkpoint: cannot open " + path);
    std::string bytes((std::istreambuf_iterator<char>(f)),
                      std::istreambuf_iterator<char>());
    return deserialize_checkpoint(bytes, path);
}

}  // namespace qgcam::hybrid
