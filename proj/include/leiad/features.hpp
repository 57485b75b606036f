#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "leiad/coredata.hpp"

namespace leiad {

inline constexpr std::array<int, 6> kFeatureWindows = {10, 50, 100, 200, 500, 1440};

/// 1 transform + 6 windows x (6 statistics + 6 ratios + 6 differences).
inline constexpr std::size_t kFeatureCount = 1 + kFeatureWindows.size() * 18;

/// Column names in extraction order, e.g. "mean_10", "ratio_std_500".
const std::vector<std::string>& feature_names();

/// FNV-1a over the joined column names; stored in files that carry features.
std::uint64_t feature_schema_hash();

double signed_log(double v);

/// Dense row-major matrix, one row per point.
struct FeatureMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    FeatureMatrix() = default;
    FeatureMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
    std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
    double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

/// Features of point `index` computed from trailing windows ending there.
/// Windows that would start before the series use whatever points exist.
std::vector<double> extract_features(const Series& series, std::size_t index);

FeatureMatrix extract_feature_matrix(const Series& series);

/// Rows in flat dataset order.
FeatureMatrix extract_feature_matrix(const Dataset& dataset);

}  // namespace leiad
