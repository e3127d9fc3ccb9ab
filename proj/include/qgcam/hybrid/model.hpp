#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "qgcam/cnn/layers.hpp"
#include "qgcam/cnn/tensor.hpp"
#include "qgcam/util/matrix.hpp"
#include "qgcam/util/rng.hpp"
#include "qgcam/vqc/circuit.hpp"
#include "qgcam/vqc/gradients.hpp"

namespace qgcam::hybrid {

using cnn::ConvNet;
using cnn::FeatureTensor;

// CNN -> projection (+ arctan squash) -> VQC -> linear readout. The
// projection bounds angles to (-pi/2, pi/2) so encodings cannot wrap.
struct HybridModel {
    int input_c = 0, input_h = 0, input_w = 0;
    ConvNet net;
    int map_c = 0, map_h = 0, map_w = 0;  // activation map shape
    int flat_dim = 0;                     // map_c * map_h * map_w
    int qubits = 0;
    int classes = 0;

    RealMatrix projection;  // qubits x flat_dim
    std::vector<double> projection_bias;
    vqc::CircuitSpec circuit;  // arctan scaling on
    vqc::VqcParams theta;
    RealMatrix readout;  // classes x classes
    std::vector<double> readout_bias;

    void validate() const {
        if (projection.rows() != qubits || projection.cols() != flat_dim)
            throw std::invalid_argument("HybridModel: projection shape mismatch");
        if (circuit.qubits() != qubits || circuit.outputs() != classes)
            throw std::invalid_argument("HybridModel: circuit shape mismatch");
        if (readout.rows() != classes || readout.cols() != classes)
            throw std::invalid_argument("HybridModel: readout shape mismatch");
    }
};

inline void init_linear(RealMatrix& w, std::vector<double>& bias, int rows, int cols,
                        Rng& rng) {
    w = RealMatrix(rows, cols);
    const double a = std::sqrt(6.0 / (rows + cols));
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) w(i, j) = rng.uniform(-a, a);
    bias.assign(rows, 0.0);
}

// Readout init with zero column means. Softmax cross-entropy gradients sum
// to zero over classes, so the column sums of the readout never train; left
// random they would inject frozen initialization noise into every class's
// activation gradients.
inline void init_readout(RealMatrix& w, std::vector<double>& bias, int classes,
                         Rng& rng) {
    init_linear(w, bias, classes, classes, rng);
    for (int j = 0; j < classes; ++j) {
        double mean = 0.0;
        for (int i = 0; i < classes; ++i) mean += w(i, j);
        mean /= classes;
        for (int i = 0; i < classes; ++i) w(i, j) -= mean;
    }
}

// The projection starts as channel mixing times a uniform spatial pool:
// P(q, (k,i,j)) = s(q,k) / (H*W). A dense random init instead buries the
// class-activation channel weights (spatial means of dP) in initialization
// noise that training never clears at desk scale, leaving heatmaps
// unstructured. The matrix stays fully dense and trainable.
inline void init_projection(RealMatrix& p, std::vector<double>& bias, int qubits,
                            int map_c, int map_h, int map_w, Rng& rng) {
    p = RealMatrix(qubits, map_c * map_h * map_w);
    const double a = std::sqrt(6.0 / (qubits + map_c));
    const double spatial = 1.0 / (static_cast<double>(map_h) * map_w);
    for (int q = 0; q < qubits; ++q)
        for (int k = 0; k < map_c; ++k) {
            const double mix = rng.uniform(-a, a) * spatial;
            for (int cell = 0; cell < map_h * map_w; ++cell)
                p(q, k * map_h * map_w + cell) = mix;
        }
    bias.assign(qubits, 0.0);
}

inline HybridModel build_model(int input_c, int input_h, int input_w, ConvNet net,
                               int qubits, int blocks, int classes, Rng& rng) {
    HybridModel m;
    m.input_c = input_c;
    m.input_h = input_h;
    m.input_w = input_w;
    m.net = std::move(net);
    m.net.output_shape(input_c, input_h, input_w, m.map_c, m.map_h, m.map_w);
    m.flat_dim = m.map_c * m.map_h * m.map_w;
    m.qubits = qubits;
    m.classes = classes;
    init_projection(m.projection, m.projection_bias, qubits, m.map_c, m.map_h,
                    m.map_w, rng);
    m.circuit = vqc::default_circuit(qubits, blocks, classes, /*arctan_scaling=*/true);
    m.theta = vqc::VqcParams::zeros(m.circuit.ansatz);
    for (auto& t : m.theta.theta) t = rng.uniform(-std::numbers::pi, std::numbers::pi);
    init_readout(m.readout, m.readout_bias, classes, rng);
    m.validate();
    return m;
}

// Default desk-scale model: three-stage CNN, 8 qubits, 4 blocks.
inline HybridModel default_model(int input_h, int input_w, int classes,
                                 std::uint64_t seed, int qubits = 8, int blocks = 4) {
    Rng rng(seed);
    ConvNet net = cnn::default_convnet(1, rng);
    return build_model(1, input_h, input_w, std::move(net), qubits, blocks, classes,
                       rng);
}

struct ForwardCache {
    cnn::ConvNetCache cnn_cache;
    FeatureTensor activation;       // A, the tapped maps
    std::vector<double> flat;       // flatten(A)
    std::vector<double> vqc_input;  // z = P a + b (raw, pre-arctan)
    std::vector<double> expectations;
    std::vector<double> scores;
};

inline std::vector<double> forward(const HybridModel& m, const FeatureTensor& image,
                                   ForwardCache* cache = nullptr) {
    if (image.channels != m.input_c || image.height != m.input_h ||
        image.width != m.input_w)
        throw std::invalid_argument("forward: image shape mismatch");

    cnn::ConvNetCache local_cache;
    FeatureTensor a =
        cnn::convnet_forward(m.net, image, cache ? &cache->cnn_cache : &local_cache);

    std::vector<double> z(m.qubits, 0.0);
    for (int q = 0; q < m.qubits; ++q) {
        double acc = m.projection_bias[q];
        for (int d = 0; d < m.flat_dim; ++d) acc += m.projection(q, d) * a.v[d];
        z[q] = acc;
    }
    const std::vector<double> e = vqc::run(z, m.theta, m.circuit);
    std::vector<double> scores(m.classes, 0.0);
    for (int i = 0; i < m.classes; ++i) {
        double acc = m.readout_bias[i];
        for (int j = 0; j < m.classes; ++j) acc += m.readout(i, j) * e[j];
        scores[i] = acc;
    }
    if (cache) {
        cache->flat = a.v;
        cache->activation = std::move(a);
        cache->vqc_input = z;
        cache->expectations = e;
        cache->scores = scores;
    }
    return scores;
}

inline int predict(const std::vector<double>& scores) {
    return 1 + static_cast<int>(std::max_element(scores.begin(), scores.end()) -
                                scores.begin());
}

inline std::vector<double> softmax(const std::vector<double>& scores) {
    const double top = *std::max_element(scores.begin(), scores.end());
    std::vector<double> p(scores.size());
    double denom = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        p[i] = std::exp(scores[i] - top);
        denom += p[i];
    }
    for (double& x : p) x /= denom;
    return p;
}

// Softmax cross-entropy; labels are 1-based.
inline double loss(const std::vector<double>& scores, int label) {
    const int m = static_cast<int>(scores.size());
    if (label < 1 || label > m) throw std::invalid_argument("loss: invalid label");
    const double top = *std::max_element(scores.begin(), scores.end());
    double denom = 0.0;
    for (double s : scores) denom += std::exp(s - top);
    return std::log(denom) + top - scores[label - 1];
}

struct HybridGrads {
    cnn::ConvNetGrads cnn;
    RealMatrix projection;
    std::vector<double> projection_bias;
    std::vector<double> theta;
    RealMatrix readout;
    std::vector<double> readout_bias;
};

// Reverse chain: softmax CE -> readout -> parameter-shift gradients through
// the circuit (the input path carries the arctan Jacobian) -> projection ->
// CNN backprop.
inline HybridGrads backward(const HybridModel& m, const ForwardCache& cache,
                            int label) {
    if (cache.scores.empty())
        throw std::invalid_argument("backward: forward cache missing");
    if (label < 1 || label > m.classes)
        throw std::invalid_argument("backward: invalid label");

    HybridGrads g;
    const std::vector<double> p = softmax(cache.scores);
    std::vector<double> dscores(m.classes);
    for (int i = 0; i < m.classes; ++i)
        dscores[i] = p[i] - (i == label - 1 ? 1.0 : 0.0);

    g.readout = RealMatrix(m.classes, m.classes);
    g.readout_bias.assign(m.classes, 0.0);
    std::vector<double> de(m.classes, 0.0);
    for (int i = 0; i < m.classes; ++i) {
        g.readout_bias[i] = dscores[i];
        for (int j = 0; j < m.classes; ++j) {
            g.readout(i, j) = dscores[i] * cache.expectations[j];
            de[j] += m.readout(i, j) * dscores[i];
        }
    }

    const RealMatrix dtheta = vqc::grad_params_shift(cache.vqc_input, m.theta, m.circuit);
    g.theta.assign(m.theta.theta.size(), 0.0);
    for (std::size_t j = 0; j < g.theta.size(); ++j)
        for (int i = 0; i < m.classes; ++i)
            g.theta[j] += de[i] * dtheta(i, static_cast<int>(j));

    const RealMatrix dx = vqc::grad_input_shift(cache.vqc_input, m.theta, m.circuit);
    std::vector<double> dz(m.qubits, 0.0);
    for (int q = 0; q < m.qubits; ++q)
        for (int i = 0; i < m.classes; ++i) dz[q] += de[i] * dx(i, q);

    g.projection = RealMatrix(m.qubits, m.flat_dim);
    g.projection_bias.assign(m.qubits, 0.0);
    std::vector<double> dflat(m.flat_dim, 0.0);
    for (int q = 0; q < m.qubits; ++q) {
        g.projection_bias[q] = dz[q];
        for (int d = 0; d < m.flat_dim; ++d) {
            g.projection(q, d) = dz[q] * cache.flat[d];
            dflat[d] += m.projection(q, d) * dz[q];
        }
    }

    FeatureTensor da(m.map_c, m.map_h, m.map_w);
    da.v = dflat;
    g.cnn = cnn::convnet_backward(m.net, cache.cnn_cache, da);
    return g;
}

}  // namespace qgcam::hybrid
