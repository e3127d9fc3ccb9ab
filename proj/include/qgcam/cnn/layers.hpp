#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "qgcam/cnn/tensor.hpp"
#include "qgcam/util/rng.hpp"

namespace qgcam::cnn {

struct ConvLayerSpec {
    int in_channels = 0;
    int out_channels = 0;
    int kernel = 0;
    int stride = 1;
    int padding = 0;

    // floor((in - kernel + 2*pad)/stride) + 1
    int out_dim(int in) const {
        const int num = in - kernel + 2 * padding;
        if (num < 0 || stride < 1 || kernel < 1)
            throw std::invalid_argument("ConvLayerSpec: invalid output shape");
        return num / stride + 1;
    }

    std::size_t kernel_count() const {
        return static_cast<std::size_t>(out_channels) * in_channels * kernel * kernel;
    }

    // Kernels stored [out][in][s1][s2] row-major.
    std::size_t kernel_index(int out, int in, int s1, int s2) const {
        return ((static_cast<std::size_t>(out) * in_channels + in) * kernel + s1) *
                   kernel + s2;
    }
};

// Cross-correlation: out[k][i][j] = b_k + sum_{c,s1,s2} W[k][c][s1][s2] *
// in[c][i*stride + s1 - pad][j*stride + s2 - pad], zero outside the input.
inline FeatureTensor conv_forward(const FeatureTensor& input, const ConvLayerSpec& spec,
                                  const std::vector<double>& kernels,
                                  const std::vector<double>& biases) {
    if (input.channels != spec.in_channels)
        throw std::invalid_argument("conv_forward: channel count mismatch");
    if (kernels.size() != spec.kernel_count() ||
        biases.size() != static_cast<std::size_t>(spec.out_channels))
        throw std::invalid_argument("conv_forward: weight size mismatch");

    const int oh = spec.out_dim(input.height);
    const int ow = spec.out_dim(input.width);
    FeatureTensor out(spec.out_channels, oh, ow);
    for (int k = 0; k < spec.out_channels; ++k)
        for (int i = 0; i < oh; ++i)
            for (int j = 0; j < ow; ++j) {
                double acc = biases[k];
                for (int c = 0; c < spec.in_channels; ++c)
                    for (int s1 = 0; s1 < spec.kernel; ++s1) {
                        const int y = i * spec.stride + s1 - spec.padding;
                        if (y < 0 || y >= input.height) continue;
                        for (int s2 = 0; s2 < spec.kernel; ++s2) {
                            const int x = j * spec.stride + s2 - spec.padding;
                            if (x < 0 || x >= input.width) continue;
                            acc += kernels[spec.kernel_index(k, c, s1, s2)] *
                                   input.at(c, y, x);
                        }
                    }
                out.at(k, i, j) = acc;
            }
    return out;
}

struct ConvGrads {
    std::vector<double> kernels;
    std::vector<double> biases;
    FeatureTensor input;
};

inline ConvGrads conv_backward(const FeatureTensor& input, const ConvLayerSpec& spec,
                               const std::vector<double>& kernels,
                               const FeatureTensor& upstream) {
    ConvGrads g;
    g.kernels.assign(spec.kernel_count(), 0.0);
    g.biases.assign(spec.out_channels, 0.0);
    g.input = FeatureTensor(input.channels, input.height, input.width);

    for (int k = 0; k < spec.out_channels; ++k)
        for (int i = 0; i < upstream.height; ++i)
            for (int j = 0; j < upstream.width; ++j) {
                const double up = upstream.at(k, i, j);
                if (up == 0.0) continue;
                g.biases[k] += up;
                for (int c = 0; c < spec.in_channels; ++c)
                    for (int s1 = 0; s1 < spec.kernel; ++s1) {
                        const int y = i * spec.stride + s1 - spec.padding;
                        if (y < 0 || y >= input.height) continue;
                        for (int s2 = 0; s2 < spec.kernel; ++s2) {
                            const int x = j * spec.stride + s2 - spec.padding;
                            if (x < 0 || x >= input.width) continue;
                            const std::size_t w = spec.kernel_index(k, c, s1, s2);
                            g.kernels[w] += up * input.at(c, y, x);
                            g.input.at(c, y, x) += up * kernels[w];
                        }
                    }
            }
    return g;
}

inline FeatureTensor relu_forward(const FeatureTensor& t) {
    FeatureTensor out = t;
    for (double& x : out.v) x = std::max(0.0, x);
    return out;
}

// Subgradient 0 at exactly 0: gradient passes only where the pre-activation
// was strictly positive.
inline FeatureTensor relu_backward(const FeatureTensor& pre,
                                   const FeatureTensor& upstream) {
    if (!pre.same_shape(upstream))
        throw std::invalid_argument("relu_backward: shape mismatch");
    FeatureTensor out = upstream;
    for (std::size_t i = 0; i < out.v.size(); ++i)
        if (pre.v[i] <= 0.0) out.v[i] = 0.0;
    return out;
}

struct MaxPoolResult {
    FeatureTensor out;
    // Winning source cell (flat index into the input) per output cell.
    std::vector<std::size_t> argmax;
};

// Non-overlapping window maximum. Inputs whose dims are not divisible by the
// window are padded by replicating the last row/column; a replicated cell can
// never beat its source under the row-major first-found tie-break, so
// gradients always route to real cells.
inline MaxPoolResult maxpool_forward(const FeatureTensor& t, int window = 2) {
    if (window < 1) throw std::invalid_argument("maxpool_forward: window must be >= 1");
    const int oh = (t.height + window - 1) / window;
    const int ow = (t.width + window - 1) / window;
    MaxPoolResult r{FeatureTensor(t.channels, oh, ow), {}};
    r.argmax.assign(r.out.size(), 0);
    std::size_t cell = 0;
    for (int k = 0; k < t.channels; ++k)
        for (int i = 0; i < oh; ++i)
            for (int j = 0; j < ow; ++j, ++cell) {
                double best = 0.0;
                std::size_t best_idx = 0;
                bool first = true;
                for (int wi = 0; wi < window; ++wi)
                    for (int wj = 0; wj < window; ++wj) {
                        const int y = std::min(i * window + wi, t.height - 1);
                        const int x = std::min(j * window + wj, t.width - 1);
                        const double v = t.at(k, y, x);
                        if (first || v > best) {
                            best = v;
                            best_idx = (static_cast<std::size_t>(k) * t.height + y) *
                                           t.width + x;
                            first = false;
                        }
                    }
                r.out.v[cell] = best;
                r.argmax[cell] = best_idx;
            }
    return r;
}

inline FeatureTensor maxpool_backward(const MaxPoolResult& cache, int in_channels,
                                      int in_height, int in_width,
                                      const FeatureTensor& upstream) {
    if (!cache.out.same_shape(upstream))
        throw std::invalid_argument("maxpool_backward: shape mismatch");
    FeatureTensor out(in_channels, in_height, in_width);
    for (std::size_t cell = 0; cell < cache.argmax.size(); ++cell)
        out.v[cache.argmax[cell]] += upstream.v[cell];
    return out;
}

// One conv -> ReLU stage, optionally followed by a window-2 max pool.
struct ConvStage {
    ConvLayerSpec spec;
    std::vector<double> kernels;
    std::vector<double> biases;
    bool pool = false;
};

struct ConvNet {
    std::vector<ConvStage> stages;

    // Shape of the activation maps produced by a given input size.
    void output_shape(int in_c, int in_h, int in_w, int& out_c, int& out_h,
                      int& out_w) const {
        int c = in_c, h = in_h, w = in_w;
        for (const auto& s : stages) {
            if (s.spec.in_channels != c)
                throw std::invalid_argument("ConvNet: stage channel mismatch");
            h = s.spec.out_dim(h);
            w = s.spec.out_dim(w);
            c = s.spec.out_channels;
            if (s.pool) {
                h = (h + 1) / 2;
                w = (w + 1) / 2;
            }
        }
        out_c = c;
        out_h = h;
        out_w = w;
    }
};

struct StageCache {
    FeatureTensor input;     // what the conv saw
    FeatureTensor pre_relu;  // conv output
    FeatureTensor post_relu;
    MaxPoolResult pool;  // valid when stage.pool
};

struct ConvNetCache {
    std::vector<StageCache> stages;
};

// Forward pass; the returned tensor is the final stage's post-ReLU output
// (after its pool when present), the activation maps the rest of the model
// consumes.
inline FeatureTensor convnet_forward(const ConvNet& net, const FeatureTensor& input,
                                     ConvNetCache* cache = nullptr) {
    FeatureTensor cur = input;
    if (cache) cache->stages.clear();
    for (const auto& stage : net.stages) {
        StageCache sc;
        sc.input = cur;
        sc.pre_relu = conv_forward(cur, stage.spec, stage.kernels, stage.biases);
        sc.post_relu = relu_forward(sc.pre_relu);
        if (stage.pool) {
            sc.pool = maxpool_forward(sc.post_relu, 2);
            cur = sc.pool.out;
        } else {
            cur = sc.post_relu;
        }
        if (cache) cache->stages.push_back(std::move(sc));
    }
    return cur;
}

struct ConvNetGrads {
    std::vector<std::vector<double>> kernels;  // per stage
    std::vector<std::vector<double>> biases;
    FeatureTensor input;
};

inline ConvNetGrads convnet_backward(const ConvNet& net, const ConvNetCache& cache,
                                     const FeatureTensor& upstream) {
    if (cache.stages.size() != net.stages.size())
        throw std::invalid_argument("convnet_backward: missing forward cache");
    ConvNetGrads g;
    g.kernels.resize(net.stages.size());
    g.biases.resize(net.stages.size());
    FeatureTensor grad = upstream;
    for (int s = static_cast<int>(net.stages.size()) - 1; s >= 0; --s) {
        const ConvStage& stage = net.stages[s];
        const StageCache& sc = cache.stages[s];
        if (stage.pool)
            grad = maxpool_backward(sc.pool, sc.post_relu.channels,
                                    sc.post_relu.height, sc.post_relu.width, grad);
        grad = relu_backward(sc.pre_relu, grad);
        ConvGrads cg = conv_backward(sc.input, stage.spec, stage.kernels, grad);
        g.kernels[s] = std::move(cg.kernels);
        g.biases[s] = std::move(cg.biases);
        grad = std::move(cg.input);
    }
    g.input = std::move(grad);
    return g;
}

// Uniform [-a, a] with a = sqrt(6/(fan_in + fan_out)); biases zero.
inline void init_stage(ConvStage& stage, Rng& rng) {
    const auto& s = stage.spec;
    const double fan_in = static_cast<double>(s.in_channels) * s.kernel * s.kernel;
    const double fan_out = static_cast<double>(s.out_channels) * s.kernel * s.kernel;
    const double a = std::sqrt(6.0 / (fan_in + fan_out));
    stage.kernels.resize(s.kernel_count());
    for (double& w : stage.kernels) w = rng.uniform(-a, a);
    stage.biases.assign(s.out_channels, 0.0);
}

// conv(1->8,3x3,pad1)+pool, conv(8->16,3x3,pad1), conv(16->32,3x3,pad1): the
// default three-stage extractor for 16x16 and larger inputs. Same-padding
// keeps map cells aligned with the pixel grid and a single pool keeps the
// final maps at half the input resolution; with a second pool the cells'
// receptive fields blanket centered objects and the class-activation maps
// lose their spatial contrast.
inline ConvNet default_convnet(int in_channels, Rng& rng) {
    ConvNet net;
    net.stages.push_back({{in_channels, 8, 3, 1, 1}, {}, {}, true});
    net.stages.push_back({{8, 16, 3, 1, 1}, {}, {}, false});
    net.stages.push_back({{16, 32, 3, 1, 1}, {}, {}, false});
    for (auto& stage : net.stages) init_stage(stage, rng);
    return net;
}

// conv(1->4,3x3)+pool, conv(4->8,3x3): compact extractor for small inputs
// (8x8) used by the end-to-end gradient checks.
inline ConvNet small_convnet(int in_channels, Rng& rng) {
    ConvNet net;
    net.stages.push_back({{in_channels, 4, 3}, {}, {}, true});
    net.stages.push_back({{4, 8, 3}, {}, {}, false});
    for (auto& stage : net.stages) init_stage(stage, rng);
    return net;
}

}  // namespace qgcam::cnn
