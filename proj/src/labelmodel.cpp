#include "leiad/labelmodel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "leiad/error.hpp"
#include "leiad/log.hpp"
#include "leiad/random.hpp"

namespace leiad {

std::vector<Vote> VoteMatrix::row(std::size_t r) const {
    require(r < rows_, ErrorCode::out_of_range, "vote matrix row out of range");
    std::vector<Vote> out(columns_.size());
    for (std::size_t j = 0; j < columns_.size(); ++j) out[j] = columns_[j][r];
    return out;
}

void VoteMatrix::add_column(std::string lf_id, std::vector<Vote> votes) {
    require(votes.size() == rows_, ErrorCode::invalid_argument,
            "LF '" + lf_id + "' covers " + std::to_string(votes.size()) + " points, expected " +
                std::to_string(rows_));
    lf_ids_.push_back(std::move(lf_id));
    columns_.push_back(std::move(votes));
}

VoteMatrix VoteMatrix::permuted(std::span<const std::size_t> order) const {
    require(order.size() == cols(), ErrorCode::invalid_argument, "permutation size mismatch");
    VoteMatrix out(rows_);
    for (auto j : order) out.add_column(lf_ids_.at(j), columns_.at(j));
    return out;
}

VoteMatrix assemble_vote_matrix(const std::vector<VoteSeries>& vote_series, const Dataset& dataset) {
    const std::size_t n = dataset.total_points();
    VoteMatrix m(n);
    for (const auto& vs : vote_series) m.add_column(vs.lf_id, vs.votes);
    return m;
}

void LabelModelConfig::validate() const {
    require(learning_rate > 0.0 && std::isfinite(learning_rate), ErrorCode::invalid_argument,
            "label model learning_rate must be positive");
    require(training_epoch >= 0, ErrorCode::invalid_argument, "training_epoch must be >= 0");
    require(gibbs_samples_per_step >= 1, ErrorCode::invalid_argument,
            "gibbs_samples_per_step must be >= 1");
    require(batch_size >= 1, ErrorCode::invalid_argument, "batch_size must be >= 1");
    require(class_prior > 0.0 && class_prior < 1.0, ErrorCode::invalid_argument,
            "class_prior must lie in (0, 1)");
}

namespace {

double sigmoid(double x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double logit(double p) { return std::log(p / (1.0 - p)); }

// Non-abstain votes in row-major compressed form.
struct SparseVotes {
    std::vector<std::size_t> row_start;
    std::vector<std::uint32_t> col;
    std::vector<std::int8_t> vote;

    explicit SparseVotes(const VoteMatrix& m) {
        row_start.assign(m.rows() + 1, 0);
        for (std::size_t j = 0; j < m.cols(); ++j)
            for (std::size_t i = 0; i < m.rows(); ++i)
                if (m.at(i, j) != Vote::abstain) ++row_start[i + 1];
        std::partial_sum(row_start.begin(), row_start.end(), row_start.begin());
        col.resize(row_start.back());
        vote.resize(row_start.back());
        std::vector<std::size_t> fill(row_start.begin(), row_start.end() - 1);
        for (std::size_t j = 0; j < m.cols(); ++j)
            for (std::size_t i = 0; i < m.rows(); ++i)
                if (m.at(i, j) != Vote::abstain) {
                    col[fill[i]] = static_cast<std::uint32_t>(j);
                    vote[fill[i]] = static_cast<std::int8_t>(m.at(i, j));
                    ++fill[i];
                }
    }
};

// Counter-based uniform draw: depends only on (seed, epoch, row) so that one
// row's samples do not shift when other rows change.
double counter_uniform(std::uint64_t seed, std::uint64_t epoch, std::uint64_t row) {
    std::uint64_t x = seed ^ (epoch * 0xd1342543de82ef95ULL) ^ (row * 0x9e3779b97f4a7c15ULL);
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return static_cast<double>(x >> 11) * 0x1.0p-53;
}

// Number of positives among `trials` Bernoulli(p) draws, by CDF inversion of
// a single uniform.
int binomial_inverse(double u, int trials, double p) {
    if (p <= 0.0) return 0;
    if (p >= 1.0) return trials;
    const double q = 1.0 - p;
    double prob = std::pow(q, trials);
    double cdf = prob;
    int k = 0;
    while (u >= cdf && k < trials) {
        prob *= (static_cast<double>(trials - k) / static_cast<double>(k + 1)) * (p / q);
        ++k;
        cdf += prob;
    }
    return k;
}

}  // namespace

LabelModelParams fit_generative(const VoteMatrix& matrix, const LabelModelConfig& config,
                                std::uint64_t seed) {
    config.validate();
    require(matrix.rows() > 0 && matrix.cols() > 0, ErrorCode::invalid_argument,
            "label model needs a non-empty vote matrix");

    const std::size_t m = matrix.cols();
    const SparseVotes sparse(matrix);

    LabelModelParams params;
    params.class_prior = config.class_prior;
    params.weights.assign(m, config.initial_weight);

    std::vector<bool> informative(m, false);
    for (std::size_t e = 0; e < sparse.col.size(); ++e) informative[sparse.col[e]] = true;
    for (std::size_t j = 0; j < m; ++j) {
        if (!informative[j]) {
            params.weights[j] = 0.0;
            warn("labeling function '" + matrix.lf_ids()[j] +
                 "' abstains on every point; its weight is fixed at 0");
        }
    }

    std::vector<std::size_t> active_rows;
    for (std::size_t i = 0; i < matrix.rows(); ++i)
        if (sparse.row_start[i + 1] > sparse.row_start[i]) active_rows.push_back(i);

    const double prior_logit = logit(config.class_prior);
    const int samples = config.gibbs_samples_per_step;
    const auto batch = static_cast<std::size_t>(config.batch_size);
    Rng rng(seed);
    std::vector<double> grad(m, 0.0), accuracy(m);

    for (int epoch = 0; epoch < config.training_epoch; ++epoch) {
        rng.shuffle(std::span<std::size_t>(active_rows));
        for (std::size_t b = 0; b < active_rows.size(); b += batch) {
            for (std::size_t j = 0; j < m; ++j) accuracy[j] = sigmoid(params.weights[j]);
            std::fill(grad.begin(), grad.end(), 0.0);
            const std::size_t end = std::min(active_rows.size(), b + batch);
            for (std::size_t r = b; r < end; ++r) {
                const std::size_t i = active_rows[r];
                double z = prior_logit;
                for (std::size_t e = sparse.row_start[i]; e < sparse.row_start[i + 1]; ++e)
                    z += sparse.vote[e] == 1 ? params.weights[sparse.col[e]]
                                             : -params.weights[sparse.col[e]];
                // Gibbs step: latent label drawn from its conditional given the votes.
                const int positives = binomial_inverse(
                    counter_uniform(seed, static_cast<std::uint64_t>(epoch), i), samples, sigmoid(z));
                const double frac_pos = static_cast<double>(positives) / samples;
                for (std::size_t e = sparse.row_start[i]; e < sparse.row_start[i + 1]; ++e) {
                    const auto j = sparse.col[e];
                    const double agree = sparse.vote[e] == 1 ? frac_pos : 1.0 - frac_pos;
                    grad[j] += agree - accuracy[j];
                }
            }
            for (std::size_t j = 0; j < m; ++j)
                if (informative[j]) params.weights[j] += config.learning_rate * grad[j];
        }
        params.trained_epochs = epoch + 1;
    }
    return params;
}

std::vector<double> posterior(const LabelModelParams& params, const VoteMatrix& matrix) {
    require(params.weights.size() == matrix.cols(), ErrorCode::invalid_argument,
            "label model has " + std::to_string(params.weights.size()) + " weights but matrix has " +
                std::to_string(matrix.cols()) + " columns");
    require(params.class_prior > 0.0 && params.class_prior < 1.0, ErrorCode::invalid_argument,
            "class_prior must lie in (0, 1)");
    std::vector<double> z(matrix.rows(), logit(params.class_prior));
    for (std::size_t j = 0; j < matrix.cols(); ++j) {
        const auto col = matrix.column(j);
        const double w = params.weights[j];
        for (std::size_t i = 0; i < matrix.rows(); ++i) {
            if (col[i] == Vote::anomaly) z[i] += w;
            else if (col[i] == Vote::normal) z[i] -= w;
        }
    }
    std::vector<double> out(matrix.rows());
    std::vector<bool> any(matrix.rows(), false);
    for (std::size_t j = 0; j < matrix.cols(); ++j) {
        const auto col = matrix.column(j);
        for (std::size_t i = 0; i < matrix.rows(); ++i) any[i] = any[i] || col[i] != Vote::abstain;
    }
    for (std::size_t i = 0; i < matrix.rows(); ++i)
        out[i] = any[i] ? sigmoid(z[i]) : params.class_prior;
    return out;
}

std::vector<double> majority_vote(const VoteMatrix& matrix, double prior) {
    std::vector<int> positive(matrix.rows(), 0), voting(matrix.rows(), 0);
    for (std::size_t j = 0; j < matrix.cols(); ++j) {
        const auto col = matrix.column(j);
        for (std::size_t i = 0; i < matrix.rows(); ++i) {
            if (col[i] == Vote::abstain) continue;
            ++voting[i];
            positive[i] += col[i] == Vote::anomaly ? 1 : 0;
        }
    }
    std::vector<double> out(matrix.rows());
    for (std::size_t i = 0; i < matrix.rows(); ++i)
        out[i] = voting[i] > 0 ? static_cast<double>(positive[i]) / voting[i] : prior;
    return out;
}

const char* to_string(LabelSource source) {
    switch (source) {
        case LabelSource::weak: return "weak";
        case LabelSource::ground_truth: return "ground_truth";
        case LabelSource::inferred: return "inferred";
    }
    return "unknown";
}

std::size_t WeakLabelSet::count(LabelSource source) const {
    return static_cast<std::size_t>(std::count_if(
        entries.begin(), entries.end(), [&](const WeakLabel& e) { return e.source == source; }));
}

std::optional<int> LabeledSet::label(std::size_t point) const {
    const int l = labels_.at(point);
    if (l < 0) return std::nullopt;
    return l;
}

void LabeledSet::set(std::size_t point, int label, LabelSource source) {
    require(point < labels_.size(), ErrorCode::out_of_range, "labeled point out of range");
    require(label == 0 || label == 1, ErrorCode::invalid_argument, "label must be 0 or 1");
    if (labels_[point] < 0) order_.push_back(point);
    labels_[point] = static_cast<std::int8_t>(label);
    sources_[point] = source;
}

std::size_t weak_label_budget(std::size_t total_points, double weak_supervision_ratio,
                              std::size_t labeled_count) {
    if (labeled_count == 0)
        return static_cast<std::size_t>(std::llround(weak_supervision_ratio * static_cast<double>(total_points)));
    return 2 * labeled_count;
}

std::vector<std::uint8_t> vote_coverage(const VoteMatrix& matrix) {
    std::vector<std::uint8_t> out(matrix.rows(), 0);
    for (std::size_t j = 0; j < matrix.cols(); ++j) {
        const auto col = matrix.column(j);
        for (std::size_t i = 0; i < matrix.rows(); ++i)
            if (col[i] != Vote::abstain) out[i] = 1;
    }
    return out;
}

WeakLabelSet select_weak_labels(std::span<const double> posteriors, std::size_t budget,
                                double anomaly_percentage, const LabeledSet& labeled,
                                std::span<const std::uint8_t> covered) {
    require(budget >= 1, ErrorCode::invalid_argument, "weak label budget must be >= 1");
    require(anomaly_percentage > 0.0 && anomaly_percentage < 100.0, ErrorCode::invalid_argument,
            "anomaly_percentage must lie in (0, 100)");
    require(labeled.universe() == posteriors.size(), ErrorCode::invalid_argument,
            "labeled set and posteriors cover different point sets");
    require(covered.empty() || covered.size() == posteriors.size(), ErrorCode::invalid_argument,
            "coverage mask has the wrong length");
    require(budget <= posteriors.size(), ErrorCode::invalid_argument,
            "weak label budget exceeds the number of points");

    std::vector<std::size_t> candidates;
    candidates.reserve(posteriors.size());
    for (std::size_t i = 0; i < posteriors.size(); ++i)
        if (!labeled.contains(i) && (covered.empty() || covered[i])) candidates.push_back(i);
    budget = std::min(budget, candidates.size());

    WeakLabelSet out;
    if (budget > 0) {
        const auto k = std::min<std::size_t>(
            budget, static_cast<std::size_t>(std::llround(static_cast<double>(budget) * anomaly_percentage / 100.0)));
        std::sort(candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b) {
            if (posteriors[a] != posteriors[b]) return posteriors[a] > posteriors[b];
            return a < b;
        });
        std::vector<std::size_t> positives(candidates.begin(), candidates.begin() + static_cast<long>(k));
        std::vector<std::size_t> rest(candidates.begin() + static_cast<long>(k), candidates.end());
        std::sort(rest.begin(), rest.end(), [&](std::size_t a, std::size_t b) {
            if (posteriors[a] != posteriors[b]) return posteriors[a] < posteriors[b];
            return a < b;
        });
        for (auto p : positives) out.entries.push_back({p, 1, LabelSource::weak});
        for (std::size_t r = 0; r < budget - k; ++r) out.entries.push_back({rest[r], 0, LabelSource::weak});
    }
    for (auto p : labeled.points()) out.entries.push_back({p, *labeled.label(p), LabelSource::ground_truth});
    return out;
}

}  // namespace leiad
