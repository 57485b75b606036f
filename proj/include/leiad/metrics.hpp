#pragma once

#include <span>
#include <vector>

namespace leiad {

struct Metrics {
    double average_precision = 0.0;
    double roc_auc = 0.0;
    double ap_auc_running = 0.0;
};

/// Sum over distinct score thresholds (descending) of (R_k - R_{k-1}) * P_k.
/// Tied scores enter together. Throws when there is no positive label.
double average_precision(std::span<const double> scores, std::span<const int> labels);

/// Probability that a random positive outscores a random negative, ties
/// counting one half. Throws unless both classes are present.
double roc_auc(std::span<const double> scores, std::span<const int> labels);

/// Trapezoid area under AP plotted against iteration (unit spacing).
double ap_auc(std::span<const double> ap_by_iteration);

}  // namespace leiad
