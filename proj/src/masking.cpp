#include "goodie/masking.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "goodie/rng.hpp"

namespace goodie {

std::size_t round_even(double v) {
    double fl = std::floor(v);
    double frac = v - fl;
    if (frac > 0.5) return static_cast<std::size_t>(fl) + 1;
    if (frac < 0.5) return static_cast<std::size_t>(fl);
    auto lo = static_cast<std::size_t>(fl);
    return (lo % 2 == 0) ? lo : lo + 1;
}

MaskedFeatures mask_uniform(const Matrix& x, double mr, std::uint64_t seed) {
    if (mr < 0.0 || mr > 1.0) throw std::invalid_argument("mask_uniform: mr outside [0,1]");
    MaskedFeatures mf;
    mf.values = x;
    mf.observed.assign(x.size(), 1);
    mf.scenario = MissingScenario::uniform;
    mf.missing_rate = mr;
    mf.seed = seed;
    std::size_t n_mask = round_even(mr * static_cast<double>(x.size()));
    Rng rng(seed);
    for (std::size_t k : rng.sample_without_replacement(x.size(), n_mask)) {
        mf.observed[k] = 0;
        mf.values.data[k] = 0.0;
    }
    return mf;
}

MaskedFeatures mask_structural(const Matrix& x, double mr, std::uint64_t seed) {
    if (mr < 0.0 || mr > 1.0) throw std::invalid_argument("mask_structural: mr outside [0,1]");
    MaskedFeatures mf;
    mf.values = x;
    mf.observed.assign(x.size(), 1);
    mf.scenario = MissingScenario::structural;
    mf.missing_rate = mr;
    mf.seed = seed;
    std::size_t n_mask = round_even(mr * static_cast<double>(x.rows));
    Rng rng(seed);
    for (std::size_t i : rng.sample_without_replacement(x.rows, n_mask)) {
        for (std::size_t d = 0; d < x.cols; ++d) {
            mf.observed[i * x.cols + d] = 0;
            mf.values(i, d) = 0.0;
        }
    }
    return mf;
}

MaskedFeatures wrap_observed(const Matrix& x) {
    MaskedFeatures mf;
    mf.values = x;
    mf.observed.assign(x.size(), 1);
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (std::isnan(x.data[k])) {
            mf.observed[k] = 0;
            mf.values.data[k] = 0.0;
        }
    }
    return mf;
}

LabelTable make_splits(const std::vector<std::size_t>& labels, std::size_t per_class_train,
                       std::size_t n_val, std::uint64_t seed) {
    LabelTable lt;
    lt.labels = labels;
    std::size_t n_classes = 0;
    for (std::size_t c : labels) n_classes = std::max(n_classes, c + 1);
    lt.n_classes = n_classes;

    std::vector<std::vector<std::size_t>> by_class(n_classes);
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);

    Rng rng(seed);
    std::vector<uint8_t> in_train(labels.size(), 0);
    for (std::size_t c = 0; c < n_classes; ++c) {
        if (by_class[c].size() < per_class_train)
            throw std::invalid_argument("make_splits: class has fewer members than per_class_train");
        for (std::size_t k : rng.sample_without_replacement(by_class[c].size(), per_class_train)) {
            lt.train_idx.push_back(by_class[c][k]);
            in_train[by_class[c][k]] = 1;
        }
    }
    std::sort(lt.train_idx.begin(), lt.train_idx.end());

    std::vector<std::size_t> rest;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (!in_train[i]) rest.push_back(i);
    if (rest.size() < n_val) throw std::invalid_argument("make_splits: n_val too large");
    std::vector<uint8_t> in_val(labels.size(), 0);
    for (std::size_t k : rng.sample_without_replacement(rest.size(), n_val)) {
        lt.val_idx.push_back(rest[k]);
        in_val[rest[k]] = 1;
    }
    std::sort(lt.val_idx.begin(), lt.val_idx.end());
    for (std::size_t i : rest)
        if (!in_val[i]) lt.test_idx.push_back(i);

    lt.y0 = Matrix(labels.size(), n_classes);
    for (std::size_t i : lt.train_idx) lt.y0(i, labels[i]) = 1.0;
    return lt;
}

}  // namespace goodie
