#include "leiad/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <tuple>
#include <sstream>

#include "leiad/error.hpp"
#include "leiad/log.hpp"
#include "leiad/random.hpp"

namespace leiad {

namespace {

std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Detector seed depends on the series id, not its position, so reordering
// series leaves each one's scores unchanged.
std::uint64_t series_seed(std::uint64_t seed, const std::string& id, DetectorKind kind) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : id) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return mix(seed ^ mix(h) ^ (static_cast<std::uint64_t>(kind) << 56));
}

ScoreSeries score_or_flat(const DetectorConfig& config, const Series& s, std::uint64_t seed) {
    if (s.size() < minimum_length(config)) {
        warn(std::string(to_string(config.kind)) + " skipped on series '" + s.id + "' (" +
             std::to_string(s.size()) + " points); its scores are flat");
        return ScoreSeries{s.id, std::vector<double>(s.size(), 0.0)};
    }
    return fit_score(config, s, seed);
}

}  // namespace

std::uint64_t detector_seed(std::uint64_t seed, const std::string& series_id, DetectorKind kind) {
    return series_seed(seed, series_id, kind);
}

ScoreSeries score_series(const DetectorConfig& config, const Series& series, std::uint64_t seed) {
    return score_or_flat(config, series, detector_seed(seed, series.id, config.kind));
}

std::vector<VoteSeries> detector_votes(const Dataset& dataset, const LeiadConfig& config, std::uint64_t seed) {
    std::vector<VoteSeries> out;
    for (auto kind : kAllDetectors) {
        VoteSeries votes{std::string(to_string(kind)), {}};
        for (const auto& s : dataset.series) {
            const auto v = scores_to_lf_votes(score_series(config.detector(kind), s, seed),
                                              config.votes.contamination, config.votes.abstain_quantile);
            votes.votes.insert(votes.votes.end(), v.votes.begin(), v.votes.end());
        }
        out.push_back(std::move(votes));
    }
    return out;
}

const char* to_string(Strategy s) {
    switch (s) {
        case Strategy::hybrid: return "hybrid";
        case Strategy::random: return "random";
        case Strategy::no_warmup: return "no_warmup";
        case Strategy::no_lfgen: return "no_lfgen";
    }
    return "unknown";
}

Strategy strategy_from_string(const std::string& name) {
    for (auto s : {Strategy::hybrid, Strategy::random, Strategy::no_warmup, Strategy::no_lfgen})
        if (name == to_string(s)) return s;
    fail(ErrorCode::invalid_argument, "unknown strategy '" + name + "' (hybrid, random, no_warmup, no_lfgen)");
}

std::vector<double> PreparedData::uad_test_ap() const {
    std::vector<double> out;
    for (const auto& scores : test_uad_scores) out.push_back(average_precision(scores, test_labels));
    return out;
}

std::shared_ptr<const PreparedData> prepare_data(const Dataset& dataset, const LeiadConfig& config,
                                                 std::uint64_t seed) {
    config.validate();
    auto data = std::make_shared<PreparedData>();
    std::tie(data->train, data->test) = split_train_test(dataset, config.test_fraction, seed);
    data->train.params = data->test.params = config.dataset;
    require(data->test.has_truth(), ErrorCode::precondition, "every test series needs ground-truth labels");
    for (const auto& s : data->test.series)
        data->test_labels.insert(data->test_labels.end(), s.truth.begin(), s.truth.end());
    require(std::find(data->test_labels.begin(), data->test_labels.end(), 1) != data->test_labels.end(),
            ErrorCode::precondition, "the test split holds no anomalies, so AP is undefined");
    data->train_index = PointIndex(data->train);

    for (auto kind : kAllDetectors) {
        const auto& det = config.detector(kind);
        VoteSeries votes{std::string(to_string(kind)), {}};
        std::vector<double> normalized;
        for (const auto& s : data->train.series) {
            const auto scores = score_or_flat(det, s, series_seed(seed, s.id, kind));
            const auto v = scores_to_lf_votes(scores, config.votes.contamination, config.votes.abstain_quantile);
            votes.votes.insert(votes.votes.end(), v.votes.begin(), v.votes.end());
            const auto norm = normalize_scores(scores);
            normalized.insert(normalized.end(), norm.scores.begin(), norm.scores.end());
        }
        std::vector<double> test_scores;
        for (const auto& s : data->test.series) {
            const auto scores = score_or_flat(det, s, series_seed(seed, s.id, kind));
            test_scores.insert(test_scores.end(), scores.scores.begin(), scores.scores.end());
        }
        data->uad_votes.push_back(std::move(votes));
        data->uad_normalized.push_back(std::move(normalized));
        data->test_uad_scores.push_back(std::move(test_scores));
    }

    data->train_features = extract_feature_matrix(data->train);
    data->test_features = extract_feature_matrix(data->test);
    data->representation = build_representation(data->train_features);
    if (data->representation.rows >= static_cast<std::size_t>(config.ann.ann_min_points))
        data->ann = AnnIndex::build(data->representation, config.ann, mix(seed ^ 0xa11));
    return data;
}

std::optional<std::vector<int>> SimulatedOracle::annotate(const Series& series, const Segment& segment,
                                                          std::span<const int> /*predicted*/) {
    require(series.has_truth(), ErrorCode::precondition,
            "simulated oracle needs ground truth for series '" + series.id + "'");
    std::vector<int> out;
    for (std::size_t i = segment.start_index; i <= segment.end_index; ++i) out.push_back(series.truth[i]);
    return out;
}

Pipeline::Pipeline(std::shared_ptr<const PreparedData> data, LeiadConfig config, std::uint64_t seed,
                   Strategy strategy)
    : data_(std::move(data)), config_(std::move(config)), seed_(seed), strategy_(strategy) {
    require(data_ != nullptr, ErrorCode::invalid_argument, "pipeline needs prepared data");
    config_.validate();
}

std::uint64_t Pipeline::iteration_seed(int iteration, std::uint64_t stream) const {
    return mix(seed_ ^ mix(static_cast<std::uint64_t>(iteration) * 0x100000001b3ULL + stream));
}

void Pipeline::warm_up() {
    const std::size_t n = data_->train_index.size();
    state_ = IterationState{};
    state_.labeled = LabeledSet(n);
    state_.votes = VoteMatrix(n);
    if (strategy_ != Strategy::no_warmup)
        for (const auto& v : data_->uad_votes) state_.votes.add_column(v.lf_id, v.votes);
    refit(0);
}

void Pipeline::refit(int iteration) {
    const std::size_t n = data_->train_index.size();
    const double prior = config_.class_prior();
    if (state_.votes.cols() > 0) {
        auto lm = config_.label_model;
        lm.class_prior = prior;
        state_.label_model = fit_generative(state_.votes, lm, iteration_seed(iteration, 1));
        state_.posteriors = posterior(state_.label_model, state_.votes);
    } else {
        state_.label_model = LabelModelParams{{}, prior, 0};
        state_.posteriors.assign(n, prior);
    }

    std::size_t budget = weak_label_budget(n, config_.dataset.weak_supervision_ratio, state_.labeled.size());
    budget = std::clamp<std::size_t>(budget, 1, n);
    const auto coverage = vote_coverage(state_.votes);
    state_.weak_labels = select_weak_labels(state_.posteriors, budget, config_.dataset.anomaly_percentage,
                                            state_.labeled, coverage);

    auto em = config_.end_model;
    em.class_prior = prior;
    state_.end_model = train_end_model(data_->train_features, state_.weak_labels, em, iteration_seed(iteration, 3));
    state_.train_probs = state_.end_model->predict(data_->train_features);

    Metrics m = evaluate(*state_.end_model);
    std::vector<double> aps;
    for (const auto& h : state_.metrics_history) aps.push_back(h.average_precision);
    aps.push_back(m.average_precision);
    m.ap_auc_running = ap_auc(aps);
    state_.metrics_history.push_back(m);
    state_.iteration = iteration;
}

Metrics Pipeline::evaluate(const Classifier& model) const {
    const auto probs = model.predict(data_->test_features);
    Metrics m;
    m.average_precision = average_precision(probs, data_->test_labels);
    m.roc_auc = roc_auc(probs, data_->test_labels);
    return m;
}

QueryComponents Pipeline::components() const {
    static const std::vector<std::vector<double>> none;
    return compute_components(state_.votes, state_.train_probs, data_->representation, state_.labeled,
                              strategy_ == Strategy::no_warmup ? none : data_->uad_normalized);
}

Query Pipeline::next_query() const {
    require(!state_.metrics_history.empty(), ErrorCode::precondition, "call warm_up before querying");
    const std::size_t n = data_->train_index.size();
    require(state_.labeled.size() < n, ErrorCode::precondition, "every training point is already labeled");

    Query q;
    if (strategy_ == Strategy::random) {
        Rng rng(iteration_seed(state_.iteration + 1, 2));
        auto pick = rng.index(n - state_.labeled.size());
        for (std::size_t i = 0; i < n; ++i) {
            if (state_.labeled.contains(i)) continue;
            if (pick-- == 0) {
                q.point = i;
                break;
            }
        }
    } else {
        q.point = select_next(components(), config_.active_learning, state_.labeled);
    }
    const auto [s, local] = data_->train_index.locate(q.point);
    q.segment = extract_segment(data_->train.series[s], local,
                                static_cast<std::size_t>(config_.dataset.length_of_segment));
    const std::size_t offset = data_->train_index.offset(s);
    for (std::size_t i = q.segment.start_index; i <= q.segment.end_index; ++i)
        q.predicted.push_back(state_.train_probs[offset + i] >= 0.5 ? 1 : 0);
    return q;
}

void Pipeline::apply_annotation(const Query& query, const std::vector<int>& labels,
                                const std::vector<LabelSource>& sources) {
    const auto& seg = query.segment;
    require(labels.size() == seg.length() && sources.size() == seg.length(), ErrorCode::invalid_argument,
            "annotation must cover every point of the segment");
    for (int l : labels) require(l == 0 || l == 1, ErrorCode::invalid_argument, "labels must be 0 or 1");
    const auto series = data_->train.index_of(seg.series_id);
    require(series.has_value(), ErrorCode::not_found, "segment refers to unknown series '" + seg.series_id + "'");
    const std::size_t offset = data_->train_index.offset(*series);
    require(query.point == offset + seg.center_index, ErrorCode::invalid_argument,
            "query point is not the segment center");

    const std::size_t n = data_->train_index.size();
    for (std::size_t k = 0; k < labels.size(); ++k)
        state_.labeled.set(offset + seg.start_index + k, labels[k], sources[k]);
    state_.queried.push_back(query.point);

    const int next = state_.iteration + 1;
    if (strategy_ != Strategy::no_lfgen) {
        const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(config_.dataset.number_of_neighbors), n - 1);
        const auto neighbors = data_->ann ? data_->ann->search(data_->representation, query.point, k)
                                          : exact_l1_search(data_->representation, query.point, k);
        const int label = labels[seg.center_index - seg.start_index];
        auto lf = generate_lf(query.point, label, neighbors, config_.lf_threshold, "gen_" + std::to_string(next), next);
        state_.votes.add_column(lf.lf_id, lf.votes(n).votes);
        state_.generated_lfs.push_back(std::move(lf));
    }
    refit(next);
}

bool Pipeline::run_iteration(Oracle& oracle) {
    const Query q = next_query();
    const auto series = data_->train.index_of(q.segment.series_id);
    const auto labels = oracle.annotate(data_->train.series[*series], q.segment, q.predicted);
    if (!labels) return false;
    apply_annotation(q, *labels, std::vector<LabelSource>(labels->size(), LabelSource::ground_truth));
    return true;
}

std::string Pipeline::export_labeled_set() const {
    std::ostringstream out;
    out << "series_id,timestamp,label,source\n";
    for (auto p : state_.labeled.points()) {
        const auto [s, local] = data_->train_index.locate(p);
        const auto& series = data_->train.series[s];
        out << series.id << ',' << series.timestamps[local] << ',' << *state_.labeled.label(p) << ','
            << to_string(state_.labeled.source(p)) << '\n';
    }
    return out.str();
}

SimulationResult simulate(std::shared_ptr<const PreparedData> data, const LeiadConfig& config, int iterations,
                          std::uint64_t seed, Strategy strategy) {
    require(iterations >= 1, ErrorCode::invalid_argument, "iterations must be >= 1");
    Pipeline p(std::move(data), config, seed, strategy);
    p.warm_up();
    SimulatedOracle oracle;
    for (int i = 0; i < iterations; ++i) {
        if (p.state().labeled.size() >= p.data().train_index.size()) break;
        p.run_iteration(oracle);
    }
    SimulationResult r;
    r.curve = p.state().metrics_history;
    r.uad_test_ap = p.data().uad_test_ap();
    r.labeled_set_csv = p.export_labeled_set();
    r.generated_lfs = p.state().generated_lfs;
    return r;
}

SimulationResult simulate(const Dataset& dataset, const LeiadConfig& config, int iterations, std::uint64_t seed,
                          Strategy strategy) {
    return simulate(prepare_data(dataset, config, seed), config, iterations, seed, strategy);
}

std::string format_curve(const std::vector<Metrics>& curve) {
    std::string out = "iteration,ap,roc_auc,ap_auc\n";
    char line[128];
    for (std::size_t i = 0; i < curve.size(); ++i) {
        std::snprintf(line, sizeof line, "%zu,%.17g,%.17g,%.17g\n", i, curve[i].average_precision, curve[i].roc_auc,
                      curve[i].ap_auc_running);
        out += line;
    }
    return out;
}

}  // namespace leiad
