#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "qgcam/util/rng.hpp"

namespace qgcam::data {

inline double signal_power(const std::vector<double>& s) {
    double p = 0.0;
    for (double x : s) p += x * x;
    return p / static_cast<double>(s.size());
}

// Adds noise scaled so that 10*log10(P_clean / P_noise) equals snr_db. The
// noise is tiled or truncated to the clean length first.
inline std::vector<double> mix_noise(const std::vector<double>& clean,
                                     const std::vector<double>& noise,
                                     double snr_db) {
    if (clean.empty() || noise.empty())
        throw std::invalid_argument("mix_noise: empty signal");
    std::vector<double> tiled(clean.size());
    for (std::size_t i = 0; i < clean.size(); ++i) tiled[i] = noise[i % noise.size()];

    const double p_clean = signal_power(clean);
    const double p_noise = signal_power(tiled);
    if (p_clean <= 0.0)
        throw std::invalid_argument("mix_noise: silent clean signal, SNR undefined");
    if (p_noise <= 0.0)
        throw std::invalid_argument("mix_noise: silent noise signal");

    const double scale = std::sqrt(p_clean / (p_noise * std::pow(10.0, snr_db / 10.0)));
    std::vector<double> out(clean.size());
    for (std::size_t i = 0; i < clean.size(); ++i) out[i] = clean[i] + scale * tiled[i];
    return out;
}

struct Utterance {
    std::vector<double> signal;
    std::size_t start = 0;  // first sample of the burst
    std::size_t stop = 0;   // one past the last sample
};

// Harmonic tone burst with formant-like band emphasis and silence padding:
// a stack of partials of a random fundamental, each weighted by broad bumps
// around 700 Hz and 1800 Hz, under a raised-cosine on/off envelope.
inline Utterance synth_utterance(std::size_t length, double sample_rate, Rng& rng) {
    Utterance u;
    u.signal.assign(length, 0.0);
    const double f0 = rng.uniform(110.0, 220.0);
    const double burst_frac = rng.uniform(0.30, 0.45);
    const double start_frac = rng.uniform(0.15, 0.55 - burst_frac);
    u.start = static_cast<std::size_t>(start_frac * static_cast<double>(length));
    u.stop = u.start + static_cast<std::size_t>(burst_frac * static_cast<double>(length));

    // Partial weights: 1/h rolloff times formant bumps.
    std::vector<double> freqs, weights, phases;
    for (int h = 1; h * f0 < 3800.0; ++h) {
        const double f = h * f0;
        const double bump1 = std::exp(-0.5 * std::pow((f - 700.0) / 250.0, 2.0));
        const double bump2 = std::exp(-0.5 * std::pow((f - 1800.0) / 400.0, 2.0));
        freqs.push_back(f);
        weights.push_back((0.2 + bump1 + 0.7 * bump2) / h);
        phases.push_back(rng.uniform(0.0, 2.0 * std::numbers::pi));
    }

    const double ramp = 0.1 * static_cast<double>(u.stop - u.start);
    for (std::size_t t = u.start; t < u.stop && t < length; ++t) {
        const double pos = static_cast<double>(t - u.start);
        const double tail = static_cast<double>(u.stop - t);
        double env = 1.0;
        if (pos < ramp) env = 0.5 - 0.5 * std::cos(std::numbers::pi * pos / ramp);
        if (tail < ramp) env = std::min(env, 0.5 - 0.5 * std::cos(std::numbers::pi * tail / ramp));
        double v = 0.0;
        for (std::size_t h = 0; h < freqs.size(); ++h)
            v += weights[h] * std::sin(2.0 * std::numbers::pi * freqs[h] *
                                           static_cast<double>(t) / sample_rate +
                                       phases[h]);
        u.signal[t] = 0.25 * env * v;
    }
    return u;
}

// Rotor-like interference: broadband noise through a one-pole lowpass,
// amplitude-modulated at a blade-pass rate near 18 Hz, plus a faint hum.
inline std::vector<double> rotor_noise(std::size_t length, double sample_rate,
                                       Rng& rng) {
    std::vector<double> out(length);
    const double rate = rng.uniform(14.0, 22.0);
    const double depth = rng.uniform(0.5, 0.8);
    const double alpha = 0.35;  // lowpass pole, keeps energy spread but tilted low
    double state = 0.0;
    for (std::size_t t = 0; t < length; ++t) {
        state = alpha * state + (1.0 - alpha) * rng.uniform(-1.0, 1.0);
        const double am =
            1.0 + depth * std::sin(2.0 * std::numbers::pi * rate *
                                   static_cast<double>(t) / sample_rate);
        const double hum = 0.12 * std::sin(2.0 * std::numbers::pi * 105.0 *
                                           static_cast<double>(t) / sample_rate);
        out[t] = 0.5 * state * am + hum;
    }
    return out;
}

}  // namespace qgcam::data
