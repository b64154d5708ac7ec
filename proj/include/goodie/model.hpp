#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "goodie/autodiff.hpp"
#include "goodie/propagation.hpp"

namespace goodie {

enum class AttentionVariant { attention, random, sum, mean, concat };
enum class LossVariant { pseudocon, supcon_train, strong, weak, manual, none };

AttentionVariant parse_attention_variant(const std::string& s);
LossVariant parse_loss_variant(const std::string& s);

struct GoodieConfig {
    double alpha = 0.99;
    double tau = 0.01;
    double lambda = 1.0;
    std::size_t k_lp = 50;
    std::size_t k_fp = 40;
    double dropout = 0.5;
    double lr = 0.005;
    std::size_t hidden = 64;
    bool scaled_loss = false;
    AttentionVariant attention_variant = AttentionVariant::attention;
    LossVariant loss_variant = LossVariant::pseudocon;
    std::size_t patience = 200;
    std::size_t max_epochs = 10000;
};

// Per-node role/confidence pair; w(i,p) derived on demand.
struct PairWeights {
    std::vector<uint8_t> is_train;       // 1 = train node, 0 = pseudo
    std::vector<double> confidence;      // LP-derived prediction probability

    double weight(std::size_t i, std::size_t p) const {
        bool ti = is_train[i], tp = is_train[p];
        if (ti && tp) return 1.0;
        if (ti) return confidence[p];
        if (tp) return confidence[i];
        return confidence[i] * confidence[p];
    }
};

// The four-case pair weight, exposed standalone.
double pair_weight(bool i_train, bool p_train, double conf_i, double conf_p);

PairWeights make_pair_weights(const LabelTable& labels, const LPResult& lp);

// Train label for train nodes, LP pseudo-label otherwise.
std::vector<std::size_t> extended_labels(const LabelTable& labels, const LPResult& lp);

// Dense N x N positive-pair weight matrix for the requested loss variant;
// zero off positives. For supcon_train the matrix covers train nodes only
// (caller restricts the similarity matrix to the same subset).
Matrix positive_weights(const std::vector<std::size_t>& ext_labels, const PairWeights& pw,
                        LossVariant variant,
                        const std::vector<std::size_t>* subset = nullptr);

// Confidence-weighted class prototype matrix, |C| x D. Empty classes give
// zero rows; row c of `nonempty` reports whether class c had any member.
Matrix class_prototypes(const Matrix& z, const std::vector<std::size_t>& ext_labels,
                        const PairWeights& pw, std::size_t n_classes,
                        std::vector<uint8_t>* nonempty = nullptr);

// |C| x N coefficient matrix such that prototypes = M * z.
Matrix prototype_coefficients(const std::vector<std::size_t>& ext_labels, const PairWeights& pw,
                              std::size_t n_classes);

struct GoodieParams {
    Param w_lp;   // |C| x D
    Param w_fp;   // F x D
    Param attn;   // D x 1
    Param w_cls;  // D x |C| (2D x |C| for the concat variant)

    std::vector<Param*> all() { return {&w_lp, &w_fp, &attn, &w_cls}; }
};

GoodieParams init_goodie_params(std::size_t n_classes, std::size_t feat_dim,
                                const GoodieConfig& cfg, std::uint64_t seed,
                                std::size_t out_dim = 0);

struct GoodieForward {
    Tape::Ref h_lp, h_fp, z, logits, probs;
    std::vector<double> alpha_lp, alpha_fp;  // empty for non-attention variants
};

// Full forward pass (both branches, mixing, classifier) on the given tape.
GoodieForward goodie_forward(Tape& tape, const NormalizedAdjacency& adj, const Matrix& y_hat,
                             const Matrix& x_hat, GoodieParams& params, const GoodieConfig& cfg,
                             bool training, std::uint64_t dropout_seed);

// Pseudo-label contrastive loss term for the configured variant; tape ref of
// a 1x1 tensor (constant zero for LossVariant::none).
Tape::Ref goodie_pseudo_loss(Tape& tape, Tape::Ref z, const std::vector<std::size_t>& ext_labels,
                             const PairWeights& pw, const LabelTable& labels,
                             const GoodieConfig& cfg);

}  // namespace goodie
