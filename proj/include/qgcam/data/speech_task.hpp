#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "qgcam/data/audio.hpp"
#include "qgcam/data/dataset.hpp"
#include "qgcam/data/stft.hpp"

namespace qgcam::data {

inline constexpr int kSpeechImageSize = 28;
inline constexpr double kSpeechSampleRate = 16000.0;
inline constexpr std::size_t kSpeechClipSamples = 8000;  // 0.5 s
inline constexpr double kSpeechSnrDb = 5.0;

// One spectrogram sample of the clean/noisy task. Band columns delimit the
// utterance in resized-pixel coordinates (inclusive).
struct SpeechSample {
    cnn::FeatureTensor input;  // 1 x 28 x 28, log-compressed, min-max scaled
    int label = 0;             // 1 = clean, 2 = noisy
    int band_lo = 0;
    int band_hi = 0;
};

namespace detail {

// Box-average resample of [bins x frames] down to [size x size].
inline cnn::FeatureTensor resize_box(const Spectrogram& spec, int size) {
    cnn::FeatureTensor out(1, size, size);
    for (int i = 0; i < size; ++i) {
        const int r0 = i * spec.bins / size;
        const int r1 = std::max(r0 + 1, (i + 1) * spec.bins / size);
        for (int j = 0; j < size; ++j) {
            const int c0 = j * spec.frames / size;
            const int c1 = std::max(c0 + 1, (j + 1) * spec.frames / size);
            double acc = 0.0;
            for (int r = r0; r < r1; ++r)
                for (int c = c0; c < c1; ++c) acc += spec.at(r, c);
            out.at(0, i, j) = acc / (static_cast<double>(r1 - r0) * (c1 - c0));
        }
    }
    return out;
}

inline cnn::FeatureTensor spectrogram_image(const std::vector<double>& signal,
                                            int size) {
    Spectrogram spec = stft(signal, 256, 128, kSpeechSampleRate);
    for (double& m : spec.mag) m = std::log1p(m);
    cnn::FeatureTensor img = resize_box(spec, size);
    const auto [lo_it, hi_it] = std::minmax_element(img.v.begin(), img.v.end());
    const double lo = *lo_it, hi = *hi_it;
    if (hi > lo)
        for (double& v : img.v) v = (v - lo) / (hi - lo);
    else
        for (double& v : img.v) v = 0.0;
    return img;
}

// Sample position -> resized pixel column, matching resize_box's partition.
inline int sample_to_column(std::size_t sample, int frames, int size) {
    const int frame = std::clamp(
        static_cast<int>((static_cast<long long>(sample) - 128) / 128), 0, frames - 1);
    // Invert c0 = j*frames/size: the column whose source range contains frame.
    int col = static_cast<int>((static_cast<long long>(frame) * size) / frames);
    return std::clamp(col, 0, size - 1);
}

}  // namespace detail

// Paired clean/noisy spectrogram task: sample 2k is a clean utterance, sample
// 2k+1 the same kind of utterance (fresh draw) mixed with rotor noise at
// 5 dB SNR. Even counts are exactly balanced.
inline std::vector<SpeechSample> synth_speech_task(int count, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<SpeechSample> out;
    out.reserve(count);
    const int frames =
        static_cast<int>((kSpeechClipSamples - 256) / 128) + 1;
    for (int s = 0; s < count; ++s) {
        const Utterance u = synth_utterance(kSpeechClipSamples, kSpeechSampleRate, rng);
        SpeechSample sample;
        sample.band_lo = detail::sample_to_column(u.start, frames, kSpeechImageSize);
        sample.band_hi = detail::sample_to_column(u.stop, frames, kSpeechImageSize);
        if (s % 2 == 0) {
            sample.label = 1;
            sample.input = detail::spectrogram_image(u.signal, kSpeechImageSize);
        } else {
            sample.label = 2;
            const std::vector<double> noise =
                rotor_noise(kSpeechClipSamples, kSpeechSampleRate, rng);
            sample.input = detail::spectrogram_image(
                mix_noise(u.signal, noise, kSpeechSnrDb), kSpeechImageSize);
        }
        out.push_back(std::move(sample));
    }
    return out;
}

inline Dataset speech_to_dataset(const std::vector<SpeechSample>& samples,
                                 const std::string& split = "") {
    Dataset ds;
    ds.classes = 2;
    ds.split = split;
    for (const auto& s : samples) ds.samples.push_back({s.input, s.label});
    return ds;
}

}  // namespace qgcam::data
