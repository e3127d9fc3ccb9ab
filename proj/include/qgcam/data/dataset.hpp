#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "qgcam/cnn/tensor.hpp"

namespace qgcam::data {

struct Sample {
    cnn::FeatureTensor input;
    int label = 0;  // 1..classes
};

struct Dataset {
    std::vector<Sample> samples;
    int classes = 0;
    std::string split;  // "train" or "test"

    void validate() const {
        for (const auto& s : samples) {
            if (s.label < 1 || s.label > classes)
                throw std::invalid_argument("Dataset: label out of range");
            if (!s.input.same_shape(samples.front().input))
                throw std::invalid_argument("Dataset: non-uniform input shapes");
        }
    }
};

}  // namespace qgcam::data
