#include "leiad/features.hpp"

#include <algorithm>
#include <cmath>

#include "leiad/error.hpp"

namespace leiad {

namespace {

constexpr std::array<const char*, 6> kStats = {"mean", "ewm", "min", "max", "std", "band_count"};
constexpr double kRatioEps = 1e-8;
constexpr double kRatioClip = 1e8;

double guarded_ratio(double x, double stat) {
    double r;
    if (stat == 0.0) r = x / kRatioEps;
    else r = x / (stat + (stat > 0 ? kRatioEps : -kRatioEps));
    return std::clamp(r, -kRatioClip, kRatioClip);
}

// Normalized ewm weights for each window, newest first.
const std::vector<std::vector<double>>& ewm_decay() {
    static const auto table = [] {
        std::vector<std::vector<double>> t;
        for (int s : kFeatureWindows) {
            const double alpha = 2.0 / (s + 1.0);
            std::vector<double> w(static_cast<std::size_t>(s));
            double f = 1.0;
            for (auto& x : w) {
                x = f;
                f *= 1.0 - alpha;
            }
            t.push_back(std::move(w));
        }
        return t;
    }();
    return table;
}

void fill_row(std::span<const double> v, std::size_t index, std::span<double> out) {
    const double x = v[index];
    out[0] = signed_log(x);
    const std::size_t nw = kFeatureWindows.size();
    const auto& decay = ewm_decay();
    for (std::size_t w = 0; w < nw; ++w) {
        const auto s = static_cast<std::size_t>(kFeatureWindows[w]);
        const std::size_t begin = index + 1 >= s ? index + 1 - s : 0;
        const std::size_t m = index + 1 - begin;

        double sum = 0.0, lo = v[begin], hi = v[begin];
        for (std::size_t j = begin; j <= index; ++j) {
            sum += v[j];
            lo = std::min(lo, v[j]);
            hi = std::max(hi, v[j]);
        }
        const double mean = sum / static_cast<double>(m);
        double ss = 0.0;
        for (std::size_t j = begin; j <= index; ++j) ss += (v[j] - mean) * (v[j] - mean);
        const double sd = std::sqrt(ss / static_cast<double>(m));

        double ew = 0.0, wsum = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            ew += decay[w][k] * v[index - k];
            wsum += decay[w][k];
        }
        ew /= wsum;

        double band = 0.0;
        for (std::size_t j = begin; j <= index; ++j)
            if (std::abs(v[j] - x) <= sd) band += 1.0;

        const std::array<double, 6> stats = {mean, ew, lo, hi, sd, band};
        for (std::size_t k = 0; k < stats.size(); ++k) {
            out[1 + w * 6 + k] = stats[k];
            out[1 + nw * 6 + w * 6 + k] = guarded_ratio(x, stats[k]);
            out[1 + nw * 12 + w * 6 + k] = x - stats[k];
        }
    }
}

}  // namespace

double signed_log(double v) {
    if (v == 0.0) return 0.0;
    return std::copysign(std::log1p(std::abs(v)), v);
}

const std::vector<std::string>& feature_names() {
    static const auto names = [] {
        std::vector<std::string> n{"signed_log_value"};
        for (const char* prefix : {"", "ratio_", "diff_"})
            for (int s : kFeatureWindows)
                for (const char* stat : kStats)
                    n.push_back(std::string(prefix) + stat + "_" + std::to_string(s));
        return n;
    }();
    return names;
}

std::uint64_t feature_schema_hash() {
    std::uint64_t h = 1469598103934665603ULL;
    for (const auto& name : feature_names()) {
        for (unsigned char c : name) {
            h ^= c;
            h *= 1099511628211ULL;
        }
        h ^= ',';
        h *= 1099511628211ULL;
    }
    return h;
}

std::vector<double> extract_features(const Series& series, std::size_t index) {
    require(index < series.size(), ErrorCode::out_of_range,
            "feature index " + std::to_string(index) + " outside series '" + series.id + "' of length " +
                std::to_string(series.size()));
    std::vector<double> out(kFeatureCount);
    fill_row(series.values, index, out);
    return out;
}

FeatureMatrix extract_feature_matrix(const Series& series) {
    FeatureMatrix m(series.size(), kFeatureCount);
    for (std::size_t i = 0; i < series.size(); ++i) fill_row(series.values, i, m.row(i));
    return m;
}

FeatureMatrix extract_feature_matrix(const Dataset& dataset) {
    FeatureMatrix m(dataset.total_points(), kFeatureCount);
    std::size_t r = 0;
    for (const auto& s : dataset.series)
        for (std::size_t i = 0; i < s.size(); ++i) fill_row(s.values, i, m.row(r++));
    return m;
}

}  // namespace leiad
