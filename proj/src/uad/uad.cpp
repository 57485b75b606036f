#include "leiad/uad.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "leiad/error.hpp"

namespace leiad {

std::string_view to_string(DetectorKind kind) {
    switch (kind) {
        case DetectorKind::iforest: return "iforest";
        case DetectorKind::spectral_residual: return "spectral_residual";
        case DetectorKind::stl: return "stl";
        case DetectorKind::rcforest: return "rcforest";
        case DetectorKind::zscore: return "zscore";
    }
    return "unknown";
}

DetectorKind detector_kind_from_string(std::string_view name) {
    for (auto kind : kAllDetectors)
        if (to_string(kind) == name) return kind;
    if (name == "sr") return DetectorKind::spectral_residual;
    if (name == "rcf") return DetectorKind::rcforest;
    fail(ErrorCode::invalid_argument, "unknown detector kind: " + std::string(name));
}

namespace {

const std::map<std::string, double>& default_parameters(DetectorKind kind) {
    static const std::map<std::string, double> iforest = {
        {"number_of_estimators", 1000}, {"contamination", 0.01}, {"max_samples", 256}};
    static const std::map<std::string, double> sr = {{"mag_window", 200}, {"score_window", 10}};
    static const std::map<std::string, double> stl = {
        {"period", 90}, {"lo_frac", 0.60}, {"lo_delta", 0.01}, {"robust_iterations", 3}};
    static const std::map<std::string, double> rcf = {
        {"shingle_size", 1}, {"number_of_trees", 100}, {"tree_size", 256}};
    static const std::map<std::string, double> zscore = {{"window", 100}};
    switch (kind) {
        case DetectorKind::iforest: return iforest;
        case DetectorKind::spectral_residual: return sr;
        case DetectorKind::stl: return stl;
        case DetectorKind::rcforest: return rcf;
        case DetectorKind::zscore: return zscore;
    }
    return zscore;
}

int as_int(const DetectorConfig& c, const std::string& name) {
    const double v = c.get(name);
    require(v == std::floor(v) && std::abs(v) < 1e9, ErrorCode::invalid_argument,
            std::string(to_string(c.kind)) + "." + name + " must be an integer");
    return static_cast<int>(v);
}

}  // namespace

DetectorConfig DetectorConfig::defaults(DetectorKind kind) {
    return DetectorConfig{kind, default_parameters(kind)};
}

double DetectorConfig::get(const std::string& name) const {
    if (auto it = parameters.find(name); it != parameters.end()) return it->second;
    const auto& d = default_parameters(kind);
    if (auto it = d.find(name); it != d.end()) return it->second;
    fail(ErrorCode::invalid_argument,
         "detector " + std::string(to_string(kind)) + " has no parameter '" + name + "'");
}

void DetectorConfig::set(const std::string& name, double value) {
    const auto& d = default_parameters(kind);
    require(d.count(name) > 0, ErrorCode::invalid_argument,
            "detector " + std::string(to_string(kind)) + " has no parameter '" + name + "'");
    parameters[name] = value;
}

void DetectorConfig::validate() const {
    const auto& d = default_parameters(kind);
    for (const auto& [name, value] : parameters) {
        require(d.count(name) > 0, ErrorCode::invalid_argument,
                "detector " + std::string(to_string(kind)) + " has no parameter '" + name + "'");
        require(std::isfinite(value), ErrorCode::invalid_argument,
                std::string(to_string(kind)) + "." + name + " must be finite");
    }
    switch (kind) {
        case DetectorKind::iforest:
            require(as_int(*this, "number_of_estimators") >= 1, ErrorCode::invalid_argument,
                    "iforest.number_of_estimators must be >= 1");
            require(as_int(*this, "max_samples") >= 2, ErrorCode::invalid_argument,
                    "iforest.max_samples must be >= 2");
            require(get("contamination") > 0.0 && get("contamination") < 0.5,
                    ErrorCode::invalid_argument, "iforest.contamination must lie in (0, 0.5)");
            break;
        case DetectorKind::spectral_residual:
            require(as_int(*this, "mag_window") >= 1 && as_int(*this, "score_window") >= 1,
                    ErrorCode::invalid_argument, "spectral_residual windows must be >= 1");
            break;
        case DetectorKind::stl:
            require(as_int(*this, "period") >= 2, ErrorCode::invalid_argument,
                    "stl.period must be >= 2");
            require(get("lo_frac") > 0.0 && get("lo_frac") <= 1.0, ErrorCode::invalid_argument,
                    "stl.lo_frac must lie in (0, 1]");
            require(get("lo_delta") >= 0.0 && get("lo_delta") < 1.0, ErrorCode::invalid_argument,
                    "stl.lo_delta must lie in [0, 1)");
            require(as_int(*this, "robust_iterations") >= 0, ErrorCode::invalid_argument,
                    "stl.robust_iterations must be >= 0");
            break;
        case DetectorKind::rcforest:
            require(as_int(*this, "shingle_size") >= 1 && as_int(*this, "number_of_trees") >= 1 &&
                        as_int(*this, "tree_size") >= 2,
                    ErrorCode::invalid_argument, "rcforest parameters out of range");
            break;
        case DetectorKind::zscore:
            require(as_int(*this, "window") >= 2, ErrorCode::invalid_argument,
                    "zscore.window must be >= 2");
            break;
    }
}

std::size_t minimum_length(const DetectorConfig& config) {
    switch (config.kind) {
        case DetectorKind::iforest: return 2;
        case DetectorKind::spectral_residual: return 8;
        case DetectorKind::stl: return 2 * static_cast<std::size_t>(as_int(config, "period"));
        case DetectorKind::rcforest: return 2;
        case DetectorKind::zscore: return 2;
    }
    return 2;
}

ScoreSeries fit_score(const DetectorConfig& config, const Series& series, std::uint64_t seed) {
    config.validate();
    const std::size_t min_len = minimum_length(config);
    require(series.size() >= min_len, ErrorCode::precondition,
            std::string(to_string(config.kind)) + " needs at least " + std::to_string(min_len) +
                " points; series '" + series.id + "' has " + std::to_string(series.size()));

    const std::span<const double> v(series.values);
    ScoreSeries out{series.id, {}};
    switch (config.kind) {
        case DetectorKind::iforest:
            out.scores = detectors::isolation_forest(v, as_int(config, "number_of_estimators"),
                                                     as_int(config, "max_samples"), seed);
            break;
        case DetectorKind::spectral_residual:
            out.scores = detectors::spectral_residual(v, as_int(config, "mag_window"),
                                                      as_int(config, "score_window"));
            break;
        case DetectorKind::stl:
            out.scores = detectors::stl(v, as_int(config, "period"), config.get("lo_frac"),
                                        config.get("lo_delta"), as_int(config, "robust_iterations"));
            break;
        case DetectorKind::rcforest:
            out.scores = detectors::random_cut_forest(v, as_int(config, "shingle_size"),
                                                      as_int(config, "number_of_trees"),
                                                      as_int(config, "tree_size"), seed);
            break;
        case DetectorKind::zscore:
            out.scores = detectors::rolling_zscore(v, as_int(config, "window"));
            break;
    }
    for (double& s : out.scores)
        if (!std::isfinite(s)) s = 0.0;
    return out;
}

double quantile_sorted(std::span<const double> sorted, double q) {
    require(!sorted.empty(), ErrorCode::invalid_argument, "quantile of empty range");
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

VoteSeries scores_to_lf_votes(const ScoreSeries& scores, double contamination,
                              double abstain_quantile) {
    require(!scores.scores.empty(), ErrorCode::invalid_argument, "cannot threshold empty scores");
    require(contamination > 0.0 && contamination < abstain_quantile && abstain_quantile < 1.0,
            ErrorCode::invalid_argument, "need 0 < contamination < abstain_quantile < 1");

    std::vector<double> sorted(scores.scores);
    std::sort(sorted.begin(), sorted.end());
    const double high = quantile_sorted(sorted, 1.0 - contamination);
    const double low = quantile_sorted(sorted, abstain_quantile);
    const std::size_t n = sorted.size();

    // Ties at the upper cut may push the anomaly count past the contamination
    // budget; in that case only strictly larger scores vote anomaly.
    const auto at_least = static_cast<std::size_t>(sorted.end() - std::lower_bound(sorted.begin(), sorted.end(), high));
    const bool strict = static_cast<double>(at_least) > contamination * static_cast<double>(n) + 1.0;

    VoteSeries out{scores.series_id, std::vector<Vote>(n, Vote::abstain)};
    for (std::size_t i = 0; i < n; ++i) {
        const double s = scores.scores[i];
        if (s <= low) {
            out.votes[i] = Vote::normal;
        } else if (strict ? s > high : s >= high) {
            out.votes[i] = Vote::anomaly;
        }
    }
    return out;
}

ScoreSeries normalize_scores(const ScoreSeries& scores) {
    const std::size_t n = scores.scores.size();
    require(n > 0, ErrorCode::invalid_argument, "cannot normalize empty scores");
    ScoreSeries out{scores.series_id, std::vector<double>(n, 0.5)};
    if (n == 1) return out;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores.scores[a] < scores.scores[b]; });
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && scores.scores[order[j + 1]] == scores.scores[order[i]]) ++j;
        const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) out.scores[order[k]] = rank / static_cast<double>(n - 1);
        i = j + 1;
    }
    return out;
}

}  // namespace leiad
