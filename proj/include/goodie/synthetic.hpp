#pragma once

#include <cstdint>

#include "goodie/graph.hpp"

namespace goodie {

// Stochastic block model with class-mean Gaussian features.
struct SyntheticSpec {
    std::size_t n_nodes = 400;
    std::size_t n_classes = 4;
    std::size_t feature_dim = 32;
    double intra_p = 0.05;
    double inter_p = 0.005;
    double signal = 1.0;  // class-mean separation scale
    std::uint64_t seed = 0;
};

struct SyntheticData {
    Graph graph;
    Matrix features;
    std::vector<std::size_t> labels;
};

SyntheticData generate_synthetic(const SyntheticSpec& spec);

}  // namespace goodie
