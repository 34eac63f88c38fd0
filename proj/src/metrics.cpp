#include "sinbad/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "sinbad/error.hpp"

namespace sinbad {

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) {
        std::ostringstream msg;
        msg << "roc_auc: " << scores.size() << " scores but " << labels.size() << " labels";
        throw DimensionError(msg.str());
    }
    double n_pos = 0.0;
    double n_neg = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != 0 && labels[i] != 1) throw DataError("roc_auc labels must be 0 or 1");
        if (std::isnan(scores[i])) throw DataError("roc_auc: NaN score");
        (labels[i] ? n_pos : n_neg) += 1.0;
    }
    if (n_pos == 0.0 || n_neg == 0.0) throw DataError("roc_auc needs both normal and anomalous samples");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Sum of midranks of the positives.
    double rank_sum = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
        const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t t = i; t < j; ++t)
            if (labels[order[t]]) rank_sum += midrank;
        i = j;
    }
    const double u = rank_sum - n_pos * (n_pos + 1.0) / 2.0;
    return u / (n_pos * n_neg);
}

double roc_auc(const LabeledScores& s) { return roc_auc(s.scores, s.labels); }

} // namespace sinbad
