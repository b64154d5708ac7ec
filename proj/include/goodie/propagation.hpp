#pragma once

#include "goodie/graph.hpp"
#include "goodie/masking.hpp"

namespace goodie {

struct LPResult {
    Matrix y_hat;                          // N x |C| converged logits
    std::vector<std::size_t> pseudo_labels;  // row argmax, ties to lowest index
    std::vector<double> confidence;        // max of temperature softmax
    std::size_t iterations = 0;
    double alpha = 1.0;
};

struct FPResult {
    Matrix x_hat;  // N x F, observed entries preserved bit-exactly
    std::size_t iterations = 0;
};

// Iterate Y <- alpha * A Y + (1-alpha) * Y0, then clamp train rows to Y0.
LPResult label_propagate(const NormalizedAdjacency& adj, const LabelTable& labels,
                         double alpha, std::size_t k, double tau);

// Iterate X <- A X, then restore observed entries.
FPResult feature_propagate(const NormalizedAdjacency& adj, const MaskedFeatures& feats,
                           std::size_t k);

// Max-norm of one further LP step restricted to unclamped (non-train) rows.
double lp_residual(const NormalizedAdjacency& adj, const Matrix& state, const Matrix& y0,
                   const std::vector<std::size_t>& train_idx, double alpha);

// Max-norm of one further FP step restricted to unobserved entries.
double fp_residual(const NormalizedAdjacency& adj, const Matrix& state,
                   const MaskedFeatures& feats);

}  // namespace goodie
