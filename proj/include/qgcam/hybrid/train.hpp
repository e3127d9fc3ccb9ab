#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qgcam/data/dataset.hpp"
#include "qgcam/hybrid/model.hpp"
#include "qgcam/util/parallel.hpp"
#include "qgcam/util/rng.hpp"

namespace qgcam::hybrid {

struct TrainConfig {
    int epochs = 5;
    int batch = 16;
    double lr_classical = 0.01;
    double lr_quantum = 0.05;
    std::uint64_t seed = 42;
    bool momentum = false;
    double momentum_coeff = 0.9;

    void validate() const {
        if (epochs < 1 || batch < 1 || lr_classical < 0.0 || lr_quantum < 0.0)
            throw std::invalid_argument("TrainConfig: non-positive setting");
    }
};

struct EpochMetrics {
    int epoch = 0;
    double loss = 0.0;
    double train_accuracy = 0.0;
    double test_accuracy = 0.0;
};

struct TrainResult {
    HybridModel model;  // best-test-accuracy snapshot
    std::vector<EpochMetrics> metrics;
    int best_epoch = 0;
    double best_test_accuracy = 0.0;
    // FNV-1a over the index sequence of gradient-consumed samples; lets tests
    // prove no test sample ever contributed a gradient.
    std::uint64_t consumed_hash = 1469598103934665603ull;
};

namespace detail {

inline void fnv_mix(std::uint64_t& h, std::uint64_t value) {
    for (int b = 0; b < 8; ++b) {
        h ^= (value >> (8 * b)) & 0xff;
        h *= 1099511628211ull;
    }
}

inline double accuracy(const HybridModel& m, const data::Dataset& ds) {
    if (ds.samples.empty()) return 0.0;
    std::vector<int> hits(ds.samples.size(), 0);
    parallel_for(ds.samples.size(), [&](std::size_t i) {
        hits[i] = predict(forward(m, ds.samples[i].input)) == ds.samples[i].label;
    });
    int total = 0;
    for (int h : hits) total += h;
    return static_cast<double>(total) / static_cast<double>(ds.samples.size());
}

struct GradAccumulator {
    HybridGrads sum;
    bool has = false;

    void add(const HybridGrads& g) {
        if (!has) {
            sum = g;
            has = true;
            return;
        }
        for (std::size_t s = 0; s < sum.cnn.kernels.size(); ++s) {
            for (std::size_t i = 0; i < sum.cnn.kernels[s].size(); ++i)
                sum.cnn.kernels[s][i] += g.cnn.kernels[s][i];
            for (std::size_t i = 0; i < sum.cnn.biases[s].size(); ++i)
                sum.cnn.biases[s][i] += g.cnn.biases[s][i];
        }
        for (std::size_t i = 0; i < sum.projection.data().size(); ++i)
            sum.projection.data()[i] += g.projection.data()[i];
        for (std::size_t i = 0; i < sum.projection_bias.size(); ++i)
            sum.projection_bias[i] += g.projection_bias[i];
        for (std::size_t i = 0; i < sum.theta.size(); ++i) sum.theta[i] += g.theta[i];
        for (std::size_t i = 0; i < sum.readout.data().size(); ++i)
            sum.readout.data()[i] += g.readout.data()[i];
        for (std::size_t i = 0; i < sum.readout_bias.size(); ++i)
            sum.readout_bias[i] += g.readout_bias[i];
    }
};

inline void axpy(std::vector<double>& x, const std::vector<double>& g, double a) {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += a * g[i];
}

}  // namespace detail

// Plain SGD (optional momentum) over softmax cross-entropy, separate learning
// rates for classical weights and circuit angles. Per-sample gradients within
// a batch run in parallel but accumulate in ascending sample order, so the
// trajectory is bit-identical for any thread count. Returns the
// best-test-accuracy snapshot.
inline TrainResult train(HybridModel model, const data::Dataset& train_set,
                         const data::Dataset& test_set, const TrainConfig& config) {
    config.validate();
    if (train_set.samples.empty())
        throw std::invalid_argument("train: empty training set");
    model.validate();

    Rng rng(config.seed);
    TrainResult result;
    result.best_test_accuracy = -1.0;

    HybridGrads velocity;
    bool velocity_ready = false;

    std::vector<std::size_t> order(train_set.samples.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        rng.shuffle(order);
        double epoch_loss = 0.0;
        std::size_t seen = 0;

        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(config.batch)) {
            const std::size_t stop =
                std::min(order.size(), start + static_cast<std::size_t>(config.batch));
            const std::size_t count = stop - start;

            std::vector<HybridGrads> grads(count);
            std::vector<double> losses(count);
            parallel_for(count, [&](std::size_t i) {
                const auto& sample = train_set.samples[order[start + i]];
                ForwardCache cache;
                forward(model, sample.input, &cache);
                losses[i] = loss(cache.scores, sample.label);
                grads[i] = backward(model, cache, sample.label);
            });

            detail::GradAccumulator acc;
            for (std::size_t i = 0; i < count; ++i) {
                detail::fnv_mix(result.consumed_hash,
                                static_cast<std::uint64_t>(order[start + i]));
                epoch_loss += losses[i];
                if (!std::isfinite(losses[i]))
                    throw std::runtime_error(
                        "train: loss diverged (non-finite) at epoch " +
                        std::to_string(epoch));
                acc.add(grads[i]);
            }
            seen += count;

            const double inv = 1.0 / static_cast<double>(count);
            HybridGrads& step = acc.sum;
            if (config.momentum) {
                if (!velocity_ready) {
                    velocity = step;
                    // Scale the fresh velocity like a plain averaged step.
                    velocity_ready = true;
                } else {
                    const double mu = config.momentum_coeff;
                    for (std::size_t s = 0; s < step.cnn.kernels.size(); ++s) {
                        for (std::size_t i = 0; i < step.cnn.kernels[s].size(); ++i)
                            velocity.cnn.kernels[s][i] =
                                mu * velocity.cnn.kernels[s][i] + step.cnn.kernels[s][i];
                        for (std::size_t i = 0; i < step.cnn.biases[s].size(); ++i)
                            velocity.cnn.biases[s][i] =
                                mu * velocity.cnn.biases[s][i] + step.cnn.biases[s][i];
                    }
                    for (std::size_t i = 0; i < step.projection.data().size(); ++i)
                        velocity.projection.data()[i] =
                            mu * velocity.projection.data()[i] + step.projection.data()[i];
                    for (std::size_t i = 0; i < step.projection_bias.size(); ++i)
                        velocity.projection_bias[i] =
                            mu * velocity.projection_bias[i] + step.projection_bias[i];
                    for (std::size_t i = 0; i < step.theta.size(); ++i)
                        velocity.theta[i] = mu * velocity.theta[i] + step.theta[i];
                    for (std::size_t i = 0; i < step.readout.data().size(); ++i)
                        velocity.readout.data()[i] =
                            mu * velocity.readout.data()[i] + step.readout.data()[i];
                    for (std::size_t i = 0; i < step.readout_bias.size(); ++i)
                        velocity.readout_bias[i] =
                            mu * velocity.readout_bias[i] + step.readout_bias[i];
                }
                step = velocity;
            }

            const double lr_c = config.lr_classical * inv;
            const double lr_q = config.lr_quantum * inv;
            for (std::size_t s = 0; s < model.net.stages.size(); ++s) {
                detail::axpy(model.net.stages[s].kernels, step.cnn.kernels[s], -lr_c);
                detail::axpy(model.net.stages[s].biases, step.cnn.biases[s], -lr_c);
            }
            detail::axpy(model.projection.data(), step.projection.data(), -lr_c);
            detail::axpy(model.projection_bias, step.projection_bias, -lr_c);
            detail::axpy(model.theta.theta, step.theta, -lr_q);
            detail::axpy(model.readout.data(), step.readout.data(), -lr_c);
            detail::axpy(model.readout_bias, step.readout_bias, -lr_c);
        }

        EpochMetrics em;
        em.epoch = epoch;
        em.loss = epoch_loss / static_cast<double>(seen);
        em.train_accuracy = detail::accuracy(model, train_set);
        em.test_accuracy = detail::accuracy(model, test_set);
        result.metrics.push_back(em);

        // Best-validation snapshot; falls back to train accuracy when no
        // test split was provided. Ties go to the later epoch, which has the
        // more converged weights.
        const double score =
            test_set.samples.empty() ? em.train_accuracy : em.test_accuracy;
        if (score >= result.best_test_accuracy) {
            result.best_test_accuracy = score;
            result.best_epoch = epoch;
            result.model = model;
        }
    }
    if (result.best_epoch == 0) result.model = model;
    return result;
}

}  // namespace qgcam::hybrid
