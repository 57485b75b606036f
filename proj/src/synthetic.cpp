#include "leiad/synthetic.hpp"

#include <array>
#include <cmath>
#include <cstdio>

#include "leiad/error.hpp"
#include "leiad/random.hpp"

namespace leiad {

namespace {

constexpr std::array<int, 5> kPeriods = {60, 90, 120, 144, 200};
constexpr double kTwoPi = 6.283185307179586;

}  // namespace

Dataset generate_synthetic(const SyntheticOptions& options) {
    require(options.series_count >= 1 && options.length >= 50, ErrorCode::invalid_argument,
            "synthetic data needs at least one series of 50 points");
    require(options.anomaly_fraction >= 0.0 && options.anomaly_fraction < 0.5, ErrorCode::invalid_argument,
            "anomaly_fraction must lie in [0, 0.5)");

    Rng master(options.seed);
    Dataset ds;
    const auto n = static_cast<std::size_t>(options.length);
    for (int s = 0; s < options.series_count; ++s) {
        Rng rng = master.fork(static_cast<std::uint64_t>(s));
        Series series;
        char id[32];
        std::snprintf(id, sizeof id, "syn_%02d", s);
        series.id = id;

        const double base = rng.uniform(-20.0, 80.0);
        const double amplitude = rng.uniform(2.0, 10.0);
        const int period = kPeriods[rng.index(kPeriods.size())];
        const double phase = rng.uniform(0.0, kTwoPi);
        const double noise = amplitude * rng.uniform(0.08, 0.2);
        const double drift = rng.uniform(-1.0, 1.0) * amplitude / static_cast<double>(n);

        series.timestamps.resize(n);
        series.values.resize(n);
        series.truth.assign(n, 0);
        for (std::size_t i = 0; i < n; ++i) {
            series.timestamps[i] = static_cast<std::int64_t>(i);
            series.values[i] = base + drift * static_cast<double>(i) +
                               amplitude * std::sin(kTwoPi * static_cast<double>(i) / period + phase) +
                               rng.normal(0.0, noise);
        }

        const auto target = static_cast<std::size_t>(std::llround(options.anomaly_fraction * static_cast<double>(n)));
        std::size_t labeled = 0;
        int attempts = 0;
        while (labeled < target && attempts++ < 10000) {
            const std::size_t remaining = target - labeled;
            const auto kind = rng.index(3);
            std::size_t len = 1;
            if (kind == 2 && remaining >= 10) len = std::min<std::size_t>(remaining, 10 + rng.index(16));
            const std::size_t start = 1 + rng.index(n - len - 1);
            // Keep events apart so each stays a separate anomaly.
            bool clear = true;
            for (std::size_t i = (start >= 3 ? start - 3 : 0); i < std::min(n, start + len + 3); ++i)
                clear = clear && series.truth[i] == 0;
            if (!clear) continue;

            const double magnitude = noise * rng.uniform(5.0, 9.0) + amplitude * rng.uniform(0.2, 0.6);
            double offset = magnitude;
            if (kind == 1) offset = -magnitude;
            else if (kind == 2) offset = rng.bernoulli(0.5) ? magnitude : -magnitude;
            for (std::size_t i = start; i < start + len; ++i) {
                series.values[i] += offset;
                series.truth[i] = 1;
            }
            labeled += len;
        }
        ds.series.push_back(std::move(series));
    }
    return ds;
}

}  // namespace leiad
