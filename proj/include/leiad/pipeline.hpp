#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "leiad/active.hpp"
#include "leiad/config.hpp"
#include "leiad/endmodel.hpp"
#include "leiad/labelmodel.hpp"
#include "leiad/lfgen.hpp"
#include "leiad/metrics.hpp"

namespace leiad {

enum class Strategy { hybrid, random, no_warmup, no_lfgen };
const char* to_string(Strategy s);
Strategy strategy_from_string(const std::string& name);

/// Detector seed for one series. Keyed by the series id, so reordering
/// series leaves each one's scores unchanged.
std::uint64_t detector_seed(std::uint64_t seed, const std::string& series_id, DetectorKind kind);

/// fit_score with the per-series seed; series shorter than the detector's
/// minimum get flat zero scores and a warning.
ScoreSeries score_series(const DetectorConfig& config, const Series& series, std::uint64_t seed);

/// One flat vote column per detector, in kAllDetectors order.
std::vector<VoteSeries> detector_votes(const Dataset& dataset, const LeiadConfig& config, std::uint64_t seed);

/// Everything derived from the data alone: the split, detector outputs,
/// features and the similarity representation. Shared by every strategy run
/// on the same (dataset, seed).
struct PreparedData {
    Dataset train;
    Dataset test;
    PointIndex train_index;
    FeatureMatrix train_features;
    FeatureMatrix test_features;
    RepresentationMatrix representation;
    std::optional<AnnIndex> ann;
    std::vector<VoteSeries> uad_votes;                  // flat over train, one per detector
    std::vector<std::vector<double>> uad_normalized;    // flat over train, per-series rank normalized
    std::vector<std::vector<double>> test_uad_scores;   // flat over test, raw
    std::vector<int> test_labels;

    /// AP of each detector's raw test scores, in kAllDetectors order.
    std::vector<double> uad_test_ap() const;
};

/// Splits, scores and featurizes. Requires ground truth on the test side.
std::shared_ptr<const PreparedData> prepare_data(const Dataset& dataset, const LeiadConfig& config,
                                                 std::uint64_t seed);

struct IterationState {
    int iteration = 0;
    VoteMatrix votes;                      // detector columns then generated LFs
    std::vector<GeneratedLF> generated_lfs;
    LabeledSet labeled;
    LabelModelParams label_model;
    std::vector<double> posteriors;
    WeakLabelSet weak_labels;
    std::shared_ptr<const Classifier> end_model;
    std::vector<double> train_probs;       // end-model probability per train point
    std::vector<Metrics> metrics_history;
    std::vector<std::size_t> queried;      // center point of every query, in order
};

/// Answers a query segment with one label per segment point, or nothing to
/// abort the iteration.
class Oracle {
public:
    virtual ~Oracle() = default;
    virtual std::optional<std::vector<int>> annotate(const Series& series, const Segment& segment,
                                                     std::span<const int> predicted) = 0;
};

/// Returns the stored truth.
class SimulatedOracle final : public Oracle {
public:
    std::optional<std::vector<int>> annotate(const Series& series, const Segment& segment,
                                             std::span<const int> predicted) override;
};

struct Query {
    std::size_t point = 0;  // flat train index of the selected point
    Segment segment;
    std::vector<int> predicted;  // end-model hard labels over the segment
};

class Pipeline {
public:
    Pipeline(std::shared_ptr<const PreparedData> data, LeiadConfig config, std::uint64_t seed,
             Strategy strategy = Strategy::hybrid);

    /// Iteration 0: detector LFs, label model, weak labels, end model.
    /// Under no_warmup the model starts from an empty weak set instead.
    void warm_up();

    /// Picks the next point (Q argmax, or uniform for `random`) and its segment.
    Query next_query() const;

    /// Steps (4)-(9) of an iteration for an answered query: label the segment,
    /// add a generated LF, refit, reselect weak labels, retrain, evaluate.
    void apply_annotation(const Query& query, const std::vector<int>& labels,
                          const std::vector<LabelSource>& sources);

    /// One full iteration. Returns false (state untouched) if the oracle aborts.
    bool run_iteration(Oracle& oracle);

    const IterationState& state() const { return state_; }
    const PreparedData& data() const { return *data_; }
    const LeiadConfig& config() const { return config_; }
    Strategy strategy() const { return strategy_; }

    QueryComponents components() const;
    Metrics evaluate(const Classifier& model) const;

    /// Rows `series_id,timestamp,label,source` for every labeled point.
    std::string export_labeled_set() const;

private:
    void refit(int iteration);
    std::uint64_t iteration_seed(int iteration, std::uint64_t stream) const;

    std::shared_ptr<const PreparedData> data_;
    LeiadConfig config_;
    std::uint64_t seed_;
    Strategy strategy_;
    IterationState state_;
};

struct SimulationResult {
    std::vector<Metrics> curve;     // iteration 0..iterations
    std::vector<double> uad_test_ap;
    std::string labeled_set_csv;
    std::vector<GeneratedLF> generated_lfs;
};

SimulationResult simulate(std::shared_ptr<const PreparedData> data, const LeiadConfig& config, int iterations,
                          std::uint64_t seed, Strategy strategy);
SimulationResult simulate(const Dataset& dataset, const LeiadConfig& config, int iterations, std::uint64_t seed,
                          Strategy strategy);

/// `iteration,ap,roc_auc,ap_auc` with round-trip precision.
std::string format_curve(const std::vector<Metrics>& curve);

}  // namespace leiad
