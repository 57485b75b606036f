#pragma once

#include <cstdint>

#include "leiad/coredata.hpp"

namespace leiad {

struct SyntheticOptions {
    int series_count = 20;
    int length = 5000;
    double anomaly_fraction = 0.01;
    std::uint64_t seed = 7;
};

/// Seasonal sinusoids with Gaussian noise. Each series gets its own base
/// level, amplitude, period and noise scale, then anomalies are injected
/// until `anomaly_fraction` of its points are labeled: single-point spikes
/// and dips, and level shifts lasting 10 to 25 points.
Dataset generate_synthetic(const SyntheticOptions& options);

}  // namespace leiad
