#include <cmath>

#include "leiad/error.hpp"
#include "leiad/uad.hpp"

namespace leiad::detectors {

std::vector<double> rolling_zscore(std::span<const double> values, int window) {
    require(window >= 2, ErrorCode::invalid_argument, "zscore: window must be at least 2");
    const std::size_t n = values.size();
    const auto w = static_cast<std::size_t>(window);
    std::vector<double> scores(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t begin = i + 1 >= w ? i + 1 - w : 0;
        const double count = static_cast<double>(i + 1 - begin);
        double mean = 0.0;
        for (std::size_t j = begin; j <= i; ++j) mean += values[j];
        mean /= count;
        double var = 0.0;
        for (std::size_t j = begin; j <= i; ++j) var += (values[j] - mean) * (values[j] - mean);
        const double sd = std::sqrt(var / count);
        scores[i] = sd > 0.0 ? std::abs(values[i] - mean) / sd : 0.0;
    }
    return scores;
}

}  // namespace leiad::detectors
