#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "goodie/matrix.hpp"

namespace goodie {

enum class MissingScenario { uniform, structural };

struct MaskedFeatures {
    Matrix values;               // masked entries are exactly 0
    std::vector<uint8_t> observed;  // row-major N*F boolean mask
    MissingScenario scenario = MissingScenario::uniform;
    double missing_rate = 0.0;
    std::uint64_t seed = 0;

    bool is_observed(std::size_t i, std::size_t d) const {
        return observed[i * values.cols + d] != 0;
    }
};

struct LabelTable {
    std::vector<std::size_t> labels;  // class id per node
    std::vector<std::size_t> train_idx, val_idx, test_idx;
    Matrix y0;  // N x |C| one-hot, zero outside train rows
    std::size_t n_classes = 0;
};

MaskedFeatures mask_uniform(const Matrix& x, double mr, std::uint64_t seed);
MaskedFeatures mask_structural(const Matrix& x, double mr, std::uint64_t seed);

// Wrap a pre-masked matrix (nan entries treated as missing) without sampling.
MaskedFeatures wrap_observed(const Matrix& x);

LabelTable make_splits(const std::vector<std::size_t>& labels, std::size_t per_class_train,
                       std::size_t n_val, std::uint64_t seed);

// round-half-to-even on a nonnegative value
std::size_t round_even(double v);

}  // namespace goodie
