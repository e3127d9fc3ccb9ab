#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "qgcam/util/matrix.hpp"

namespace qgcam::data {

// Iterative radix-2 FFT, in natural order. Size must be a power of two.
inline void fft_radix2(std::vector<cdouble>& x) {
    const std::size_t n = x.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw std::invalid_argument("fft_radix2: size must be a power of two");

    // Bit-reversal permutation.
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(x[i], x[j]);
    }

    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double angle = -2.0 * std::numbers::pi / static_cast<double>(len);
        const cdouble wlen{std::cos(angle), std::sin(angle)};
        for (std::size_t i = 0; i < n; i += len) {
            cdouble w{1.0, 0.0};
            for (std::size_t k = 0; k < len / 2; ++k) {
                const cdouble u = x[i + k];
                const cdouble v = x[i + k + len / 2] * w;
                x[i + k] = u + v;
                x[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

// Periodic Hann window.
inline std::vector<double> hann_window(int n) {
    std::vector<double> w(n);
    for (int t = 0; t < n; ++t)
        w[t] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * t / n);
    return w;
}

// Magnitude spectrogram: bins = window/2 + 1 one-sided bins per frame.
struct Spectrogram {
    int bins = 0;
    int frames = 0;
    int window = 0;
    int hop = 0;
    double sample_rate = 0.0;
    std::vector<double> mag;  // [bin][frame] row-major

    double& at(int bin, int frame) {
        return mag[static_cast<std::size_t>(bin) * frames + frame];
    }
    double at(int bin, int frame) const {
        return mag[static_cast<std::size_t>(bin) * frames + frame];
    }
};

inline Spectrogram stft(const std::vector<double>& signal, int window = 256,
                        int hop = 128, double sample_rate = 16000.0) {
    if (window < 2 || (window & (window - 1)) != 0)
        throw std::invalid_argument("stft: window must be a power of two");
    if (hop < 1) throw std::invalid_argument("stft: hop must be >= 1");
    if (signal.size() < static_cast<std::size_t>(window))
        throw std::invalid_argument("stft: signal shorter than the window");

    Spectrogram spec;
    spec.window = window;
    spec.hop = hop;
    spec.sample_rate = sample_rate;
    spec.bins = window / 2 + 1;
    spec.frames =
        static_cast<int>((signal.size() - static_cast<std::size_t>(window)) / hop) + 1;
    spec.mag.assign(static_cast<std::size_t>(spec.bins) * spec.frames, 0.0);

    const std::vector<double> win = hann_window(window);
    std::vector<cdouble> frame(window);
    for (int f = 0; f < spec.frames; ++f) {
        const std::size_t start = static_cast<std::size_t>(f) * hop;
        for (int t = 0; t < window; ++t)
            frame[t] = cdouble{signal[start + t] * win[t], 0.0};
        fft_radix2(frame);
        for (int b = 0; b < spec.bins; ++b) spec.at(b, f) = std::abs(frame[b]);
    }
    return spec;
}

}  // namespace qgcam::data
