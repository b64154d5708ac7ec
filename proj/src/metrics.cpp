#include "goodie/metrics.hpp"

#include <algorithm>
#include <stdexcept>

namespace goodie {

double accuracy(const std::vector<std::size_t>& pred, const std::vector<std::size_t>& truth,
                const std::vector<std::size_t>& subset) {
    if (subset.empty()) throw std::invalid_argument("accuracy: empty subset");
    std::size_t hit = 0;
    for (std::size_t i : subset)
        if (pred[i] == truth[i]) ++hit;
    return static_cast<double>(hit) / static_cast<double>(subset.size());
}

double roc_auc(const std::vector<double>& pos_scores, const std::vector<double>& neg_scores) {
    std::size_t p = pos_scores.size(), n = neg_scores.size();
    if (p == 0 || n == 0) throw std::invalid_argument("roc_auc: empty class");
    // average ranks over the combined sorted list; ties share the mean rank
    std::vector<std::pair<double, bool>> all;
    all.reserve(p + n);
    for (double s : pos_scores) all.emplace_back(s, true);
    for (double s : neg_scores) all.emplace_back(s, false);
    std::sort(all.begin(), all.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    double pos_rank_sum = 0.0;
    std::size_t i = 0;
    while (i < all.size()) {
        std::size_t j = i;
        while (j < all.size() && all[j].first == all[i].first) ++j;
        double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // 1-based mean of [i+1, j]
        for (std::size_t k = i; k < j; ++k)
            if (all[k].second) pos_rank_sum += avg_rank;
        i = j;
    }
    double pd = static_cast<double>(p), nd = static_cast<double>(n);
    return (pos_rank_sum - pd * (pd + 1.0) / 2.0) / (pd * nd);
}

double average_precision(const std::vector<double>& pos_scores,
                         const std::vector<double>& neg_scores) {
    std::size_t p = pos_scores.size();
    if (p == 0) throw std::invalid_argument("average_precision: no positives");
    // descending score; tied negatives rank ahead of tied positives
    std::vector<std::pair<double, bool>> all;
    for (double s : pos_scores) all.emplace_back(s, true);
    for (double s : neg_scores) all.emplace_back(s, false);
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    double ap = 0.0;
    std::size_t hits = 0;
    for (std::size_t k = 0; k < all.size(); ++k) {
        if (all[k].second) {
            ++hits;
            ap += static_cast<double>(hits) / static_cast<double>(k + 1);
        }
    }
    return ap / static_cast<double>(p);
}

}  // namespace goodie
