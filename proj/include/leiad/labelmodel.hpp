#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "leiad/coredata.hpp"
#include "leiad/uad.hpp"

namespace leiad {

/// Votes of every labeling function on every training point. Stored column
/// by column; row order is the dataset's flat point order.
class VoteMatrix {
public:
    VoteMatrix() = default;
    explicit VoteMatrix(std::size_t rows) : rows_(rows) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return columns_.size(); }

    Vote at(std::size_t row, std::size_t col) const { return columns_[col][row]; }
    std::span<const Vote> column(std::size_t col) const { return columns_.at(col); }
    std::vector<Vote> row(std::size_t r) const;
    const std::vector<std::string>& lf_ids() const { return lf_ids_; }

    void add_column(std::string lf_id, std::vector<Vote> votes);

    /// Matrix with the columns reordered: result column k is column order[k].
    VoteMatrix permuted(std::span<const std::size_t> order) const;

private:
    std::size_t rows_ = 0;
    std::vector<std::string> lf_ids_;
    std::vector<std::vector<Vote>> columns_;
};

/// One column per vote series, in the given order. Each series must cover
/// every point of `dataset`.
VoteMatrix assemble_vote_matrix(const std::vector<VoteSeries>& vote_series, const Dataset& dataset);

struct LabelModelConfig {
    double learning_rate = 0.001;
    int training_epoch = 200;
    int gibbs_samples_per_step = 5;
    int batch_size = 64;
    double class_prior = 0.01;
    /// Starting accuracy weight, log(0.7 / 0.3).
    double initial_weight = 0.8472978603872037;

    void validate() const;
};

struct LabelModelParams {
    std::vector<double> weights;
    double class_prior = 0.01;
    int trained_epochs = 0;
};

/// Fits per-LF accuracy weights by maximizing the marginal likelihood of the
/// votes. Each minibatch step Gibbs-samples the latent labels from their
/// conditional under the current weights and takes a gradient step on the
/// weights. Abstentions are treated as missing votes. A column without any
/// vote gets weight 0 and a warning.
LabelModelParams fit_generative(const VoteMatrix& matrix, const LabelModelConfig& config,
                                std::uint64_t seed);

/// P(y = 1 | votes) per row, in closed form.
std::vector<double> posterior(const LabelModelParams& params, const VoteMatrix& matrix);

/// Vote matrix keyed by point, as exchanged through CSV:
/// `series_id,timestamp,<lf_id>...` with cells in {-1, 0, 1}.
struct VoteTable {
    std::vector<std::string> series_ids;
    std::vector<std::int64_t> timestamps;
    VoteMatrix matrix;
};

VoteTable make_vote_table(const Dataset& dataset, VoteMatrix matrix);
std::string format_vote_table(const VoteTable& table);
VoteTable parse_vote_table(const std::string& text, const std::string& source = "<memory>");

/// Text weights file, magic `LEIAD-LM-v1`, one `lf_id weight` line per LF.
std::string format_label_model(const LabelModelParams& params, const std::vector<std::string>& lf_ids);
/// Returns the parameters; `lf_ids` receives the column names in file order.
LabelModelParams parse_label_model(const std::string& text, std::vector<std::string>& lf_ids);

/// Fraction of non-abstaining LFs voting anomaly; `prior` where all abstain.
std::vector<double> majority_vote(const VoteMatrix& matrix, double prior);

enum class LabelSource { weak, ground_truth, inferred };
const char* to_string(LabelSource source);

struct WeakLabel {
    std::size_t point = 0;  // flat index into the training set
    int label = 0;
    LabelSource source = LabelSource::weak;
};

struct WeakLabelSet {
    std::vector<WeakLabel> entries;

    std::size_t count(LabelSource source) const;
};

/// Points whose label is known: annotated by the user (ground truth) or
/// accepted from the model's prediction during an interactive session
/// (inferred). Keeps insertion order.
class LabeledSet {
public:
    LabeledSet() = default;
    explicit LabeledSet(std::size_t universe) : labels_(universe, -1), sources_(universe) {}

    std::size_t universe() const { return labels_.size(); }
    std::size_t size() const { return order_.size(); }
    bool contains(std::size_t point) const { return labels_.at(point) >= 0; }
    std::optional<int> label(std::size_t point) const;
    LabelSource source(std::size_t point) const { return sources_.at(point); }
    const std::vector<std::size_t>& points() const { return order_; }

    /// Adds or overwrites a label.
    void set(std::size_t point, int label, LabelSource source = LabelSource::ground_truth);

private:
    std::vector<std::int8_t> labels_;
    std::vector<LabelSource> sources_;
    std::vector<std::size_t> order_;
};

/// weak_supervision_ratio * N before any query, 2 * |S^L| afterwards.
std::size_t weak_label_budget(std::size_t total_points, double weak_supervision_ratio,
                              std::size_t labeled_count);

/// The round(budget * pct / 100) highest-posterior unlabeled points become
/// anomalies, the next-lowest budget - k become normals (ties broken by lower
/// index), and every labeled point is appended with its known label. When
/// `covered` is non-empty only points flagged there (some LF voted) are
/// candidates.
WeakLabelSet select_weak_labels(std::span<const double> posteriors, std::size_t budget,
                                double anomaly_percentage, const LabeledSet& labeled,
                                std::span<const std::uint8_t> covered = {});

/// 1 where at least one column does not abstain.
std::vector<std::uint8_t> vote_coverage(const VoteMatrix& matrix);

}  // namespace leiad
