#pragma once

#include "goodie/autodiff.hpp"
#include "goodie/propagation.hpp"

namespace goodie {

enum class BaselineKind { lp_only, gcn_zero, gcn_nm, fp_gcn };

// Argmax of converged LP logits; train nodes predict their own label.
std::vector<std::size_t> lp_only_predict(const NormalizedAdjacency& adj, const LabelTable& labels,
                                         double alpha, std::size_t k);

// Unknown (i,d) <- mean of observed d-values among raw-graph neighbors of i;
// zero when no neighbor observes d. Observed entries untouched.
Matrix neighbor_mean_impute(const Graph& graph, const MaskedFeatures& feats);

// 2-layer GCN parameters (ReLU between, dropout 0.5).
struct GcnParams {
    Param w1;  // F x D
    Param w2;  // D x out
    std::vector<Param*> all() { return {&w1, &w2}; }
};

GcnParams init_gcn_params(std::size_t feat_dim, std::size_t hidden, std::size_t out,
                          std::uint64_t seed);

Tape::Ref gcn_forward(Tape& tape, const NormalizedAdjacency& adj, const Matrix& features,
                      GcnParams& params, double dropout, bool training, std::uint64_t seed);

}  // namespace goodie
