#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace qgcam::cnn {

// Channels-first 3-D real array [channel][row][col].
struct FeatureTensor {
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<double> v;

    FeatureTensor() = default;
    FeatureTensor(int c, int h, int w)
        : channels(c), height(h), width(w),
          v(static_cast<std::size_t>(c) * h * w, 0.0) {
        if (c < 1 || h < 1 || w < 1)
            throw std::invalid_argument("FeatureTensor: non-positive dimension");
    }

    std::size_t size() const { return v.size(); }

    double& at(int c, int i, int j) {
        return v[(static_cast<std::size_t>(c) * height + i) * width + j];
    }
    double at(int c, int i, int j) const {
        return v[(static_cast<std::size_t>(c) * height + i) * width + j];
    }

    bool same_shape(const FeatureTensor& o) const {
        return channels == o.channels && height == o.height && width == o.width;
    }

    bool all_finite() const {
        for (double x : v)
            if (!std::isfinite(x)) return false;
        return true;
    }
};

}  // namespace qgcam::cnn
