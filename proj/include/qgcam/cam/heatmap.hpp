#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "qgcam/cnn/tensor.hpp"
#include "qgcam/hybrid/model.hpp"
#include "qgcam/vqc/gradients.hpp"

namespace qgcam::cam {

using cnn::FeatureTensor;
using hybrid::ForwardCache;
using hybrid::HybridModel;

enum class GradPath { Shift, Analytic };

// d f^cls / d A: gradient of the pre-softmax class score with respect to the
// tapped activation maps. Runs backward through readout row cls, the chosen
// circuit input-gradient path (which carries the arctan Jacobian), and the
// projection transpose. No ReLU or pooling sits between A and the classifier
// head, so the chain ends at the reshape.
inline FeatureTensor activation_gradient(const HybridModel& m,
                                         const ForwardCache& cache, int cls,
                                         GradPath path = GradPath::Shift) {
    if (cls < 1 || cls > m.classes)
        throw std::invalid_argument("activation_gradient: class out of range");
    if (cache.scores.empty())
        throw std::invalid_argument("activation_gradient: forward cache missing");

    const RealMatrix dx = path == GradPath::Shift
                              ? vqc::grad_input_shift(cache.vqc_input, m.theta, m.circuit)
                              : vqc::grad_input_analytic(cache.vqc_input, m.theta,
                                                         m.circuit);
    std::vector<double> dz(m.qubits, 0.0);
    for (int q = 0; q < m.qubits; ++q)
        for (int j = 0; j < m.classes; ++j)
            dz[q] += m.readout(cls - 1, j) * dx(j, q);

    FeatureTensor grad(m.map_c, m.map_h, m.map_w);
    for (int d = 0; d < m.flat_dim; ++d) {
        double acc = 0.0;
        for (int q = 0; q < m.qubits; ++q) acc += m.projection(q, d) * dz[q];
        grad.v[d] = acc;
    }
    return grad;
}

inline FeatureTensor activation_gradient(const HybridModel& m,
                                         const FeatureTensor& image, int cls,
                                         GradPath path = GradPath::Shift) {
    ForwardCache cache;
    hybrid::forward(m, image, &cache);
    return activation_gradient(m, cache, cls, path);
}

// w_k = mean over (i,j) of the gradient tensor, one weight per channel.
inline std::vector<double> channel_weights(const FeatureTensor& g) {
    std::vector<double> w(g.channels, 0.0);
    const double inv = 1.0 / (static_cast<double>(g.height) * g.width);
    for (int k = 0; k < g.channels; ++k) {
        double acc = 0.0;
        for (int i = 0; i < g.height; ++i)
            for (int j = 0; j < g.width; ++j) acc += g.at(k, i, j);
        w[k] = acc * inv;
    }
    return w;
}

struct Heatmap {
    int height = 0;
    int width = 0;
    std::vector<double> raw;         // ReLU of the weighted sum, >= 0
    std::vector<double> normalized;  // raw / max, or all zeros
    bool all_zero = false;           // raw was identically zero
};

// raw[i][j] = max(0, sum_k A[k][i][j] w_k); normalized to peak 1 unless the
// raw map is identically zero (untrained models do this), which normalizes
// to zero and sets the flag instead of erroring.
inline Heatmap heatmap(const FeatureTensor& a, const std::vector<double>& w) {
    if (static_cast<int>(w.size()) != a.channels)
        throw std::invalid_argument("heatmap: channel count mismatch");
    Heatmap h;
    h.height = a.height;
    h.width = a.width;
    h.raw.assign(static_cast<std::size_t>(a.height) * a.width, 0.0);
    for (int i = 0; i < a.height; ++i)
        for (int j = 0; j < a.width; ++j) {
            double acc = 0.0;
            for (int k = 0; k < a.channels; ++k) acc += a.at(k, i, j) * w[k];
            h.raw[static_cast<std::size_t>(i) * a.width + j] = std::max(0.0, acc);
        }
    const double top = *std::max_element(h.raw.begin(), h.raw.end());
    h.normalized = h.raw;
    if (top > 0.0) {
        for (double& x : h.normalized) x /= top;
    } else {
        h.all_zero = true;
    }
    return h;
}

// Corner-aligned bilinear resampling. Constants map to constants exactly and
// outputs stay inside the input range.
inline std::vector<double> upsample_bilinear(const std::vector<double>& src, int sh,
                                             int sw, int th, int tw) {
    if (sh < 1 || sw < 1 || th < 1 || tw < 1)
        throw std::invalid_argument("upsample_bilinear: degenerate shape");
    std::vector<double> out(static_cast<std::size_t>(th) * tw);
    const double ry = th > 1 ? static_cast<double>(sh - 1) / (th - 1) : 0.0;
    const double rx = tw > 1 ? static_cast<double>(sw - 1) / (tw - 1) : 0.0;
    for (int i = 0; i < th; ++i) {
        const double y = i * ry;
        const int y0 = std::min(static_cast<int>(y), sh - 1);
        const int y1 = std::min(y0 + 1, sh - 1);
        const double fy = y - y0;
        for (int j = 0; j < tw; ++j) {
            const double x = j * rx;
            const int x0 = std::min(static_cast<int>(x), sw - 1);
            const int x1 = std::min(x0 + 1, sw - 1);
            const double fx = x - x0;
            const double top = src[static_cast<std::size_t>(y0) * sw + x0] * (1 - fx) +
                               src[static_cast<std::size_t>(y0) * sw + x1] * fx;
            const double bot = src[static_cast<std::size_t>(y1) * sw + x0] * (1 - fx) +
                               src[static_cast<std::size_t>(y1) * sw + x1] * fx;
            out[static_cast<std::size_t>(i) * tw + j] = top * (1 - fy) + bot * fy;
        }
    }
    return out;
}

struct Explanation {
    int requested_class = 0;
    int predicted_class = 0;
    std::vector<double> scores;
    Heatmap map;                     // at activation-map resolution
    std::vector<double> upsampled;   // normalized heat at input resolution
};

// Full pipeline for one input: forward, class pick (cls = 0 means "use the
// predicted class"), Eq.-style weighting, heatmap, upsample.
inline Explanation explain(const HybridModel& m, const FeatureTensor& image, int cls,
                           GradPath path = GradPath::Shift) {
    ForwardCache cache;
    hybrid::forward(m, image, &cache);
    Explanation ex;
    ex.scores = cache.scores;
    ex.predicted_class = hybrid::predict(cache.scores);
    ex.requested_class = cls == 0 ? ex.predicted_class : cls;

    const FeatureTensor grad = activation_gradient(m, cache, ex.requested_class, path);
    ex.map = heatmap(cache.activation, channel_weights(grad));
    ex.upsampled = upsample_bilinear(ex.map.normalized, ex.map.height, ex.map.width,
                                     m.input_h, m.input_w);
    return ex;
}

}  // namespace qgcam::cam
