#pragma once

#include <span>
#include <vector>

namespace sinbad {

/// Scores with binary labels (0 normal, 1 anomalous).
struct LabeledScores {
    std::vector<double> scores;
    std::vector<int> labels;
};

/// Area under the ROC curve as the Mann-Whitney U statistic over n1 * n0
/// pairs, ties counted one half. Throws DataError unless both labels occur.
double roc_auc(std::span<const double> scores, std::span<const int> labels);
double roc_auc(const LabeledScores& scores);

} // namespace sinbad
