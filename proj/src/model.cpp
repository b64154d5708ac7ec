#include "goodie/model.hpp"

#include <stdexcept>

#include "goodie/rng.hpp"

namespace goodie {

AttentionVariant parse_attention_variant(const std::string& s) {
    if (s == "attention") return AttentionVariant::attention;
    if (s == "random") return AttentionVariant::random;
    if (s == "sum") return AttentionVariant::sum;
    if (s == "mean") return AttentionVariant::mean;
    if (s == "concat") return AttentionVariant::concat;
    throw std::invalid_argument("unknown attention variant: " + s);
}

LossVariant parse_loss_variant(const std::string& s) {
    if (s == "pseudocon") return LossVariant::pseudocon;
    if (s == "supcon_train") return LossVariant::supcon_train;
    if (s == "strong") return LossVariant::strong;
    if (s == "weak") return LossVariant::weak;
    if (s == "manual") return LossVariant::manual;
    if (s == "none") return LossVariant::none;
    throw std::invalid_argument("unknown loss variant: " + s);
}

double pair_weight(bool i_train, bool p_train, double conf_i, double conf_p) {
    if (i_train && p_train) return 1.0;
    if (i_train) return conf_p;
    if (p_train) return conf_i;
    return conf_i * conf_p;
}

PairWeights make_pair_weights(const LabelTable& labels, const LPResult& lp) {
    PairWeights pw;
    pw.is_train.assign(labels.labels.size(), 0);
    for (std::size_t i : labels.train_idx) pw.is_train[i] = 1;
    pw.confidence = lp.confidence;
    return pw;
}

std::vector<std::size_t> extended_labels(const LabelTable& labels, const LPResult& lp) {
    std::vector<std::size_t> ext = lp.pseudo_labels;
    for (std::size_t i : labels.train_idx) ext[i] = labels.labels[i];
    return ext;
}

Matrix positive_weights(const std::vector<std::size_t>& ext_labels, const PairWeights& pw,
                        LossVariant variant, const std::vector<std::size_t>* subset) {
    std::vector<std::size_t> idx;
    if (subset) {
        idx = *subset;
    } else {
        idx.resize(ext_labels.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    }
    std::size_t n = idx.size();
    Matrix w(n, n);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            if (a == b) continue;
            std::size_t i = idx[a], p = idx[b];
            if (ext_labels[i] != ext_labels[p]) continue;
            bool ti = pw.is_train[i], tp = pw.is_train[p];
            double v = 0.0;
            switch (variant) {
                case LossVariant::pseudocon:
                    v = pair_weight(ti, tp, pw.confidence[i], pw.confidence[p]);
                    break;
                case LossVariant::supcon_train:
                case LossVariant::strong:
                    v = 1.0;
                    break;
                case LossVariant::weak:
                    v = (ti && tp) ? 1.0 : pw.confidence[i] * pw.confidence[p];
                    break;
                case LossVariant::manual:
                    v = (ti && tp) ? 1.0 : (ti || tp) ? 0.5 : 0.25;
                    break;
                case LossVariant::none:
                    break;
            }
            w(a, b) = v;
        }
    }
    return w;
}

Matrix prototype_coefficients(const std::vector<std::size_t>& ext_labels, const PairWeights& pw,
                              std::size_t n_classes) {
    std::size_t n = ext_labels.size();
    Matrix m(n_classes, n);
    std::vector<std::size_t> count(n_classes, 0);
    for (std::size_t i = 0; i < n; ++i) ++count[ext_labels[i]];
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t c = ext_labels[i];
        double coef = pw.is_train[i] ? 1.0 : pw.confidence[i];
        m(c, i) = coef / static_cast<double>(count[c]);
    }
    return m;
}

Matrix class_prototypes(const Matrix& z, const std::vector<std::size_t>& ext_labels,
                        const PairWeights& pw, std::size_t n_classes,
                        std::vector<uint8_t>* nonempty) {
    Matrix coeff = prototype_coefficients(ext_labels, pw, n_classes);
    if (nonempty) {
        nonempty->assign(n_classes, 0);
        for (std::size_t c : ext_labels) (*nonempty)[c] = 1;
    }
    return matmul_dense(coeff, z);
}

GoodieParams init_goodie_params(std::size_t n_classes, std::size_t feat_dim,
                                const GoodieConfig& cfg, std::uint64_t seed,
                                std::size_t out_dim) {
    if (out_dim == 0) out_dim = n_classes;
    Rng rng(seed);
    std::size_t d = cfg.hidden;
    std::size_t cls_in = cfg.attention_variant == AttentionVariant::concat ? 2 * d : d;
    GoodieParams p;
    p.w_lp = Param(glorot_uniform(n_classes, d, rng));
    p.w_fp = Param(glorot_uniform(feat_dim, d, rng));
    p.attn = Param(glorot_uniform(d, 1, rng));
    p.w_cls = Param(glorot_uniform(cls_in, out_dim, rng));
    return p;
}

GoodieForward goodie_forward(Tape& tape, const NormalizedAdjacency& adj, const Matrix& y_hat,
                             const Matrix& x_hat, GoodieParams& params, const GoodieConfig& cfg,
                             bool training, std::uint64_t dropout_seed) {
    GoodieForward f;
    Tape::Ref yc = tape.constant(y_hat);
    Tape::Ref xc = tape.constant(x_hat);
    Tape::Ref h_lp = tape.relu(tape.spmm(&adj, tape.matmul(yc, tape.param(&params.w_lp))));
    Tape::Ref h_fp = tape.relu(tape.spmm(&adj, tape.matmul(xc, tape.param(&params.w_fp))));
    h_lp = tape.dropout(h_lp, cfg.dropout, training, dropout_seed * 3 + 1);
    h_fp = tape.dropout(h_fp, cfg.dropout, training, dropout_seed * 3 + 2);
    f.h_lp = h_lp;
    f.h_fp = h_fp;

    Tape::Ref z;
    switch (cfg.attention_variant) {
        case AttentionVariant::attention: {
            Tape::Ref a = tape.param(&params.attn);
            Tape::Ref s_lp = tape.leaky_relu(tape.matmul(h_lp, a), 0.3);
            Tape::Ref s_fp = tape.leaky_relu(tape.matmul(h_fp, a), 0.3);
            // two-way softmax as a sigmoid of the score difference
            Tape::Ref a_lp = tape.sigmoid(tape.sub(s_lp, s_fp));
            Tape::Ref a_fp = tape.affine(a_lp, -1.0, 1.0);
            z = tape.add(tape.row_scale(h_lp, a_lp), tape.row_scale(h_fp, a_fp));
            const Matrix& av = tape.value(a_lp);
            f.alpha_lp.resize(av.rows);
            f.alpha_fp.resize(av.rows);
            for (std::size_t i = 0; i < av.rows; ++i) {
                f.alpha_lp[i] = av(i, 0);
                f.alpha_fp[i] = 1.0 - av(i, 0);
            }
            break;
        }
        case AttentionVariant::random: {
            std::size_t n = y_hat.rows;
            Rng rng(dropout_seed * 3 + 7);
            Matrix pick_lp(n, 1), pick_fp(n, 1);
            for (std::size_t i = 0; i < n; ++i) {
                bool lp_side = rng.uniform() < 0.5;
                pick_lp(i, 0) = lp_side ? 1.0 : 0.0;
                pick_fp(i, 0) = lp_side ? 0.0 : 1.0;
            }
            z = tape.add(tape.row_scale(h_lp, tape.constant(pick_lp)),
                         tape.row_scale(h_fp, tape.constant(pick_fp)));
            break;
        }
        case AttentionVariant::sum:
            z = tape.add(h_lp, h_fp);
            break;
        case AttentionVariant::mean:
            z = tape.affine(tape.add(h_lp, h_fp), 0.5, 0.0);
            break;
        case AttentionVariant::concat:
            z = tape.concat_cols(h_lp, h_fp);
            break;
    }
    f.z = z;

    Tape::Ref zd = tape.dropout(z, cfg.dropout, training, dropout_seed * 3 + 3);
    // plain linear head: a ReLU here lets whole class columns die under
    // sign-symmetric init (Z is nonnegative), which stalls training
    f.logits = tape.spmm(&adj, tape.matmul(zd, tape.param(&params.w_cls)));
    f.probs = tape.row_softmax(f.logits);
    return f;
}

Tape::Ref goodie_pseudo_loss(Tape& tape, Tape::Ref z, const std::vector<std::size_t>& ext_labels,
                             const PairWeights& pw, const LabelTable& labels,
                             const GoodieConfig& cfg) {
    if (cfg.loss_variant == LossVariant::none)
        return tape.constant(Matrix(1, 1));

    if (cfg.scaled_loss && cfg.loss_variant == LossVariant::pseudocon) {
        std::size_t n_classes = labels.n_classes;
        Matrix coeff = prototype_coefficients(ext_labels, pw, n_classes);
        // drop empty-class rows before the log-sum-exp
        std::vector<uint8_t> nonempty(n_classes, 0);
        for (std::size_t c : ext_labels) nonempty[c] = 1;
        std::size_t live = 0;
        for (uint8_t b : nonempty) live += b;
        Matrix coeff_live(live, coeff.cols);
        std::size_t r = 0;
        for (std::size_t c = 0; c < n_classes; ++c) {
            if (!nonempty[c]) continue;
            for (std::size_t j = 0; j < coeff.cols; ++j) coeff_live(r, j) = coeff(c, j);
            ++r;
        }
        if (live < 2) return tape.constant(Matrix(1, 1));
        Tape::Ref protos = tape.matmul(tape.constant(std::move(coeff_live)), z);
        Tape::Ref pn = tape.row_l2_normalize(protos);
        Tape::Ref sim = tape.matmul(pn, tape.transpose(pn));
        return tape.lse_offdiag(sim, cfg.tau);
    }

    Tape::Ref zsel = z;
    const std::vector<std::size_t>* subset = nullptr;
    if (cfg.loss_variant == LossVariant::supcon_train) {
        subset = &labels.train_idx;
        Matrix sel(labels.train_idx.size(), tape.value(z).rows);
        for (std::size_t a = 0; a < labels.train_idx.size(); ++a)
            sel(a, labels.train_idx[a]) = 1.0;
        zsel = tape.matmul(tape.constant(std::move(sel)), z);
    }
    Matrix w = positive_weights(ext_labels, pw, cfg.loss_variant, subset);
    Tape::Ref zn = tape.row_l2_normalize(zsel);
    Tape::Ref sim = tape.matmul(zn, tape.transpose(zn));
    return tape.contrastive_reduce(sim, w, cfg.tau);
}

}  // namespace goodie
