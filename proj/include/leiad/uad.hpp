#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "leiad/coredata.hpp"

namespace leiad {

enum class DetectorKind { iforest, spectral_residual, stl, rcforest, zscore };

inline constexpr std::array<DetectorKind, 5> kAllDetectors = {
    DetectorKind::iforest, DetectorKind::spectral_residual, DetectorKind::stl,
    DetectorKind::rcforest, DetectorKind::zscore};

std::string_view to_string(DetectorKind kind);
DetectorKind detector_kind_from_string(std::string_view name);

/// A detector kind plus its named hyper-parameters. Every kind has a fixed
/// parameter set; names outside it are rejected by validate().
struct DetectorConfig {
    DetectorKind kind = DetectorKind::zscore;
    std::map<std::string, double> parameters;

    /// Config populated with every parameter at its default value.
    static DetectorConfig defaults(DetectorKind kind);

    /// Parameter value, falling back to the default for the kind.
    double get(const std::string& name) const;
    void set(const std::string& name, double value);
    void validate() const;
};

struct ScoreSeries {
    std::string series_id;
    std::vector<double> scores;  // higher = more anomalous
};

struct VoteSeries {
    std::string lf_id;
    std::vector<Vote> votes;
};

/// Smallest series length the detector accepts.
std::size_t minimum_length(const DetectorConfig& config);

/// Scores every point of `series`. Pure in (config, series, seed).
ScoreSeries fit_score(const DetectorConfig& config, const Series& series, std::uint64_t seed);

/// Thresholds scores into votes: the top `contamination` tail votes anomaly,
/// everything at or below the `abstain_quantile` quantile votes normal, and the
/// band between them abstains.
VoteSeries scores_to_lf_votes(const ScoreSeries& scores, double contamination,
                              double abstain_quantile);

/// Average-rank normalization onto [0, 1].
ScoreSeries normalize_scores(const ScoreSeries& scores);

/// Linear-interpolation quantile of an ascending range.
double quantile_sorted(std::span<const double> sorted, double q);

namespace detectors {

std::vector<double> isolation_forest(std::span<const double> values, int number_of_estimators,
                                     int max_samples, std::uint64_t seed);

/// Saliency-map scores; the series is extended by a short linear
/// extrapolation before the transform to soften the right edge.
std::vector<double> spectral_residual(std::span<const double> values, int mag_window,
                                      int score_window);

struct StlDecomposition {
    std::vector<double> trend;
    std::vector<double> seasonal;
    std::vector<double> remainder;
};

/// Loess trend (fraction `lo_frac`, interpolation step lo_delta * n), then
/// per-phase means of the detrended series as the seasonal component.
StlDecomposition stl_decompose(std::span<const double> values, int period, double lo_frac,
                               double lo_delta, int robust_iterations);

/// Robust z-score of the STL remainder.
std::vector<double> stl(std::span<const double> values, int period, double lo_frac,
                        double lo_delta, int robust_iterations);

/// Locally weighted linear regression on x = 0..n-1.
std::vector<double> lowess(std::span<const double> y, double frac, double delta, int iterations);

/// Mean collusive displacement over `number_of_trees` random cut trees built
/// on shingles of the series.
std::vector<double> random_cut_forest(std::span<const double> values, int shingle_size,
                                      int number_of_trees, int tree_size, std::uint64_t seed);

/// |x - rolling mean| / rolling std over a trailing window that includes x.
std::vector<double> rolling_zscore(std::span<const double> values, int window);

}  // namespace detectors

}  // namespace leiad
