#include "leiad/metrics.hpp"

#include <algorithm>
#include <numeric>

#include "leiad/error.hpp"

namespace leiad {

namespace {

void check_inputs(std::span<const double> scores, std::span<const int> labels) {
    require(scores.size() == labels.size(), ErrorCode::invalid_argument,
            "scores and labels differ in length");
    for (int l : labels)
        require(l == 0 || l == 1, ErrorCode::invalid_argument, "labels must be 0 or 1");
}

std::vector<std::size_t> descending(std::span<const double> scores) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    return order;
}

}  // namespace

double average_precision(std::span<const double> scores, std::span<const int> labels) {
    check_inputs(scores, labels);
    const auto positives = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
    require(positives > 0, ErrorCode::precondition, "average precision is undefined without positives");

    const auto order = descending(scores);
    double ap = 0.0, prev_recall = 0.0;
    std::size_t tp = 0, seen = 0;
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) {
            tp += static_cast<std::size_t>(labels[order[j]]);
            ++j;
        }
        seen = j;
        const double recall = static_cast<double>(tp) / static_cast<double>(positives);
        const double precision = static_cast<double>(tp) / static_cast<double>(seen);
        ap += (recall - prev_recall) * precision;
        prev_recall = recall;
        i = j;
    }
    return ap;
}

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
    check_inputs(scores, labels);
    const auto positives = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
    const std::size_t negatives = labels.size() - positives;
    require(positives > 0 && negatives > 0, ErrorCode::precondition,
            "ROC AUC needs both positive and negative labels");

    // Ascending average ranks; the positive rank sum gives Mann-Whitney U.
    auto order = descending(scores);
    std::reverse(order.begin(), order.end());
    double rank_sum = 0.0;
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        std::size_t pos_in_group = 0;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) {
            pos_in_group += static_cast<std::size_t>(labels[order[j]]);
            ++j;
        }
        const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        rank_sum += avg_rank * static_cast<double>(pos_in_group);
        i = j;
    }
    const double p = static_cast<double>(positives), q = static_cast<double>(negatives);
    return (rank_sum - p * (p + 1.0) / 2.0) / (p * q);
}

double ap_auc(std::span<const double> ap_by_iteration) {
    double area = 0.0;
    for (std::size_t t = 1; t < ap_by_iteration.size(); ++t)
        area += (ap_by_iteration[t - 1] + ap_by_iteration[t]) / 2.0;
    return area;
}

}  // namespace leiad
