#include "goodie/baselines.hpp"

#include "goodie/rng.hpp"

namespace goodie {

std::vector<std::size_t> lp_only_predict(const NormalizedAdjacency& adj, const LabelTable& labels,
                                         double alpha, std::size_t k) {
    LPResult lp = label_propagate(adj, labels, alpha, k, 1.0);
    return lp.pseudo_labels;
}

Matrix neighbor_mean_impute(const Graph& graph, const MaskedFeatures& feats) {
    Matrix out = feats.values;
    std::size_t nf = feats.values.cols;
    for (std::size_t i = 0; i < graph.n_nodes; ++i) {
        for (std::size_t d = 0; d < nf; ++d) {
            if (feats.is_observed(i, d)) continue;
            double sum = 0.0;
            std::size_t cnt = 0;
            for (std::size_t k = graph.csr.row_ptr[i]; k < graph.csr.row_ptr[i + 1]; ++k) {
                std::size_t j = graph.csr.col_idx[k];
                if (feats.is_observed(j, d)) {
                    sum += feats.values(j, d);
                    ++cnt;
                }
            }
            out(i, d) = cnt ? sum / static_cast<double>(cnt) : 0.0;
        }
    }
    return out;
}

GcnParams init_gcn_params(std::size_t feat_dim, std::size_t hidden, std::size_t out,
                          std::uint64_t seed) {
    Rng rng(seed);
    GcnParams p;
    p.w1 = Param(glorot_uniform(feat_dim, hidden, rng));
    p.w2 = Param(glorot_uniform(hidden, out, rng));
    return p;
}

Tape::Ref gcn_forward(Tape& tape, const NormalizedAdjacency& adj, const Matrix& features,
                      GcnParams& params, double dropout, bool training, std::uint64_t seed) {
    Tape::Ref x = tape.constant(features);
    Tape::Ref h = tape.relu(tape.spmm(&adj, tape.matmul(x, tape.param(&params.w1))));
    h = tape.dropout(h, dropout, training, seed * 5 + 11);
    return tape.spmm(&adj, tape.matmul(h, tape.param(&params.w2)));
}

}  // namespace goodie
