#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qgcam/data/dataset.hpp"
#include "qgcam/io/idx.hpp"
#include "qgcam/util/rng.hpp"

namespace qgcam::data {

// MNIST-style IDX pair. Pixels scale to [0,1]; digit d becomes label d+1.
inline Dataset load_mnist_idx(const std::string& images_path,
                              const std::string& labels_path) {
    const io::IdxData images = io::read_idx(images_path, io::kIdxImagesMagic);
    const io::IdxData labels = io::read_idx(labels_path, io::kIdxLabelsMagic);
    if (images.dims.size() != 3)
        throw std::runtime_error(images_path + ": expected 3 dimensions");
    if (labels.dims.size() != 1)
        throw std::runtime_error(labels_path + ": expected 1 dimension");
    if (images.dims[0] != labels.dims[0])
        throw std::runtime_error("image/label count mismatch: " +
                                 std::to_string(images.dims[0]) + " vs " +
                                 std::to_string(labels.dims[0]));
    const int count = images.dims[0];
    const int h = images.dims[1];
    const int w = images.dims[2];

    Dataset ds;
    ds.classes = 10;
    for (int s = 0; s < count; ++s) {
        Sample sample;
        sample.input = cnn::FeatureTensor(1, h, w);
        const std::size_t base = static_cast<std::size_t>(s) * h * w;
        for (int i = 0; i < h * w; ++i)
            sample.input.v[i] = images.bytes[base + i] / 255.0;
        const int digit = labels.bytes[s];
        if (digit > 9) throw std::runtime_error(labels_path + ": label out of range");
        sample.label = digit + 1;
        ds.samples.push_back(std::move(sample));
    }
    return ds;
}

// Keep two digits and relabel them 1/2.
inline Dataset filter_binary(const Dataset& ds, int digit_a, int digit_b) {
    Dataset out;
    out.classes = 2;
    out.split = ds.split;
    for (const auto& s : ds.samples) {
        const int digit = s.label - 1;
        if (digit == digit_a)
            out.samples.push_back({s.input, 1});
        else if (digit == digit_b)
            out.samples.push_back({s.input, 2});
    }
    return out;
}

namespace detail {

// Soft-edged brightness: full inside, linear falloff across one pixel.
inline double soft(double dist, double band) {
    if (dist <= band) return 1.0;
    if (dist >= band + 1.0) return 0.0;
    return band + 1.0 - dist;
}

inline void draw_ring_digit(cnn::FeatureTensor& img, Rng& rng) {
    // Full-range translation: channel features have to carry the class, not
    // absolute pixel positions.
    const double ry = rng.uniform(6.0, 9.0);
    const double rx = rng.uniform(4.5, 7.5);
    const double cy = rng.uniform(ry + 1.5, 26.0 - ry);
    const double cx = rng.uniform(rx + 1.5, 26.0 - rx);
    const double thickness = rng.uniform(1.2, 2.2);
    const double intensity = rng.uniform(0.75, 1.0);
    for (int i = 0; i < img.height; ++i)
        for (int j = 0; j < img.width; ++j) {
            const double dy = (i - cy) / ry;
            const double dx = (j - cx) / rx;
            const double r = std::sqrt(dy * dy + dx * dx);
            // Distance from the unit ellipse in pixel-ish units.
            const double d = std::abs(r - 1.0) * std::min(rx, ry);
            img.at(0, i, j) =
                std::min(1.0, img.at(0, i, j) + intensity * soft(d, thickness / 2));
        }
}

// Printed-style one: vertical stroke plus a head flag and a base bar.
inline void draw_stroke_digit(cnn::FeatureTensor& img, Rng& rng) {
    const double x_mid = rng.uniform(8.0, 20.0);
    const double slant = rng.uniform(-0.2, 0.2);
    const double y0 = rng.uniform(3.0, 8.0);
    const double y1 = y0 + rng.uniform(13.0, 17.0);
    const double thickness = rng.uniform(2.2, 3.2);
    const double intensity = rng.uniform(0.75, 1.0);
    const double y_mid = (y0 + y1) / 2.0;
    for (int i = 0; i < img.height; ++i)
        for (int j = 0; j < img.width; ++j) {
            if (i < y0 - 1 || i > y1 + 1) continue;
            const double line_x = x_mid + slant * (i - y_mid);
            const double d = std::abs(j - line_x);
            img.at(0, i, j) =
                std::min(1.0, img.at(0, i, j) + intensity * soft(d, thickness / 2));
        }
    // Head flag going down-left from the stroke top.
    const double flag = rng.uniform(3.0, 5.0);
    for (int step = 0; step < static_cast<int>(flag); ++step) {
        const int i = static_cast<int>(y0) + step;
        const int j = static_cast<int>(x_mid + slant * (y0 - y_mid)) - step - 1;
        if (i >= 0 && i < img.height && j >= 0 && j < img.width) {
            img.at(0, i, j) = std::min(1.0, img.at(0, i, j) + intensity);
            if (j + 1 < img.width)
                img.at(0, i, j + 1) = std::min(1.0, img.at(0, i, j + 1) + intensity);
        }
    }
    // Base bar.
    const double base_half = rng.uniform(2.5, 4.5);
    const double base_x = x_mid + slant * (y1 - y_mid);
    for (int i = static_cast<int>(y1) - 1; i <= static_cast<int>(y1) + 1; ++i)
        for (int j = static_cast<int>(base_x - base_half);
             j <= static_cast<int>(base_x + base_half); ++j)
            if (i >= 0 && i < img.height && j >= 0 && j < img.width)
                img.at(0, i, j) = std::min(1.0, img.at(0, i, j) + intensity);
}

// Dense noise floor under every pixel. With no truly blank pixels anywhere,
// darkness and texture carry no class signal and classifiers have to key on
// the digit's own ink structure.
inline constexpr double kDigitNoiseCeiling = 0.15;

inline void draw_noise_floor(cnn::FeatureTensor& img, Rng& rng) {
    for (double& v : img.v) v = rng.uniform(0.0, kDigitNoiseCeiling);
}

}  // namespace detail

// Stand-in for the MNIST 0-vs-1 subset: 28x28 grayscale ring digits (label 0)
// and stroke digits (label 1), balanced and deterministic per seed. Written
// through write_digits_idx these exercise the exact IDX pipeline real MNIST
// files would.
struct RawDigits {
    std::vector<std::uint8_t> images;  // count * 28 * 28
    std::vector<std::uint8_t> labels;  // digits, 0 or 1
    int count = 0;
};

inline RawDigits synth_digits(int count, std::uint64_t seed) {
    Rng rng(seed);
    RawDigits out;
    out.count = count;
    out.labels.resize(count);
    out.images.resize(static_cast<std::size_t>(count) * 28 * 28);
    for (int s = 0; s < count; ++s) {
        cnn::FeatureTensor img(1, 28, 28);
        detail::draw_noise_floor(img, rng);
        const int digit = s % 2;
        if (digit == 0)
            detail::draw_ring_digit(img, rng);
        else
            detail::draw_stroke_digit(img, rng);
        out.labels[s] = static_cast<std::uint8_t>(digit);
        const std::size_t base = static_cast<std::size_t>(s) * 28 * 28;
        for (int i = 0; i < 28 * 28; ++i)
            out.images[base + i] =
                static_cast<std::uint8_t>(std::lround(img.v[i] * 255.0));
    }
    return out;
}

inline void write_digits_idx(const RawDigits& digits, const std::string& images_path,
                             const std::string& labels_path) {
    io::write_idx(images_path, {digits.count, 28, 28}, digits.images);
    io::write_idx(labels_path, {digits.count}, digits.labels);
}

}  // namespace qgcam::data
