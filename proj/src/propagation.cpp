#include "goodie/propagation.hpp"

#include <cmath>
#include <stdexcept>

namespace goodie {

namespace {

void clamp_train_rows(Matrix& y, const Matrix& y0, const std::vector<std::size_t>& train_idx) {
    for (std::size_t i : train_idx)
        for (std::size_t c = 0; c < y.cols; ++c) y(i, c) = y0(i, c);
}

void clamp_observed(Matrix& x, const MaskedFeatures& feats) {
    for (std::size_t k = 0; k < x.size(); ++k)
        if (feats.observed[k]) x.data[k] = feats.values.data[k];
}

}  // namespace

LPResult label_propagate(const NormalizedAdjacency& adj, const LabelTable& labels,
                         double alpha, std::size_t k, double tau) {
    if (alpha <= 0.0 || alpha > 1.0) throw std::invalid_argument("label_propagate: alpha outside (0,1]");
    if (k < 1) throw std::invalid_argument("label_propagate: k must be >= 1");
    if (tau <= 0.0) throw std::invalid_argument("label_propagate: tau must be positive");

    Matrix y = labels.y0;
    for (std::size_t it = 0; it < k; ++it) {
        Matrix prop = spmm(adj, y);
        if (alpha != 1.0) {
            for (std::size_t j = 0; j < prop.size(); ++j)
                prop.data[j] = alpha * prop.data[j] + (1.0 - alpha) * labels.y0.data[j];
        }
        clamp_train_rows(prop, labels.y0, labels.train_idx);
        y = std::move(prop);
    }

    LPResult res;
    res.y_hat = std::move(y);
    res.iterations = k;
    res.alpha = alpha;
    std::size_t n = res.y_hat.rows, nc = res.y_hat.cols;
    res.pseudo_labels.resize(n);
    res.confidence.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = res.y_hat.row(i);
        std::size_t arg = 0;
        double best = row[0];
        for (std::size_t c = 1; c < nc; ++c)
            if (row[c] > best) { best = row[c]; arg = c; }
        res.pseudo_labels[i] = arg;
        // temperature softmax via max subtraction
        double denom = 0.0;
        for (std::size_t c = 0; c < nc; ++c) denom += std::exp((row[c] - best) / tau);
        res.confidence[i] = 1.0 / denom;
    }
    return res;
}

FPResult feature_propagate(const NormalizedAdjacency& adj, const MaskedFeatures& feats,
                           std::size_t k) {
    if (k < 1) throw std::invalid_argument("feature_propagate: k must be >= 1");
    if (feats.values.rows != adj.n_nodes)
        throw std::invalid_argument("feature_propagate: dimension mismatch");

    Matrix x = feats.values;
    for (std::size_t it = 0; it < k; ++it) {
        Matrix prop = spmm(adj, x);
        clamp_observed(prop, feats);
        x = std::move(prop);
    }
    FPResult res;
    res.x_hat = std::move(x);
    res.iterations = k;
    return res;
}

double lp_residual(const NormalizedAdjacency& adj, const Matrix& state, const Matrix& y0,
                   const std::vector<std::size_t>& train_idx, double alpha) {
    Matrix next = spmm(adj, state);
    std::vector<uint8_t> is_train(state.rows, 0);
    for (std::size_t i : train_idx) is_train[i] = 1;
    double r = 0.0;
    for (std::size_t i = 0; i < state.rows; ++i) {
        if (is_train[i]) continue;
        for (std::size_t c = 0; c < state.cols; ++c) {
            double updated = alpha * next(i, c) + (1.0 - alpha) * y0(i, c);
            r = std::max(r, std::abs(updated - state(i, c)));
        }
    }
    return r;
}

double fp_residual(const NormalizedAdjacency& adj, const Matrix& state,
                   const MaskedFeatures& feats) {
    Matrix next = spmm(adj, state);
    double r = 0.0;
    for (std::size_t k = 0; k < state.size(); ++k) {
        if (feats.observed[k]) continue;
        r = std::max(r, std::abs(next.data[k] - state.data[k]));
    }
    return r;
}

}  // namespace goodie
