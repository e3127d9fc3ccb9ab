#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>

#include "qgcam/data/dataset.hpp"
#include "qgcam/util/rng.hpp"

namespace qgcam::data {

// 16x16 binary shape images, two classes, alternating so any even count is
// exactly balanced. Class 1: filled square with random position and side in
// [4,8]. Class 2: plus-shaped cross with random center in [4,11]^2, arm
// half-length in [3,6], thickness 1 or 2.
inline Dataset synth_shapes(int count, std::uint64_t seed) {
    if (count < 2) throw std::invalid_argument("synth_shapes: count must be >= 2");
    Rng rng(seed);
    Dataset ds;
    ds.classes = 2;
    for (int s = 0; s < count; ++s) {
        cnn::FeatureTensor img(1, 16, 16);
        const int label = 1 + (s % 2);
        if (label == 1) {
            const int side = static_cast<int>(rng.uniform_int(4, 8));
            const int top = static_cast<int>(rng.uniform_int(0, 16 - side));
            const int left = static_cast<int>(rng.uniform_int(0, 16 - side));
            for (int i = top; i < top + side; ++i)
                for (int j = left; j < left + side; ++j) img.at(0, i, j) = 1.0;
        } else {
            const int cy = static_cast<int>(rng.uniform_int(4, 11));
            const int cx = static_cast<int>(rng.uniform_int(4, 11));
            const int arm = static_cast<int>(rng.uniform_int(3, 6));
            const int thick = static_cast<int>(rng.uniform_int(1, 2));
            for (int i = std::max(0, cy - arm); i <= std::min(15, cy + arm); ++i)
                for (int t = 0; t < thick; ++t) {
                    const int j = cx + t;
                    if (j < 16) img.at(0, i, j) = 1.0;
                }
            for (int j = std::max(0, cx - arm); j <= std::min(15, cx + arm); ++j)
                for (int t = 0; t < thick; ++t) {
                    const int i = cy + t;
                    if (i < 16) img.at(0, i, j) = 1.0;
                }
        }
        ds.samples.push_back({std::move(img), label});
    }
    return ds;
}

}  // namespace qgcam::data
