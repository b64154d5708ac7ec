#pragma once

#include <cstddef>
#include <vector>

namespace goodie {

double accuracy(const std::vector<std::size_t>& pred, const std::vector<std::size_t>& truth,
                const std::vector<std::size_t>& subset);

// Rank-based ROC-AUC over positive and negative scores; ties count half.
double roc_auc(const std::vector<double>& pos_scores, const std::vector<double>& neg_scores);

// Average precision: precision at each positive hit, averaged over positives.
double average_precision(const std::vector<double>& pos_scores,
                         const std::vector<double>& neg_scores);

}  // namespace goodie
