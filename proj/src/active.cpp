#include "leiad/active.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "leiad/error.hpp"

namespace leiad {

void QueryWeights::validate() const {
    for (double w : {alpha, beta, gamma, delta})
        require(std::isfinite(w) && w >= 0.0, ErrorCode::invalid_argument,
                "query weights must be finite and non-negative");
}

double binary_entropy(double p) {
    require(p >= 0.0 && p <= 1.0, ErrorCode::invalid_argument, "probability outside [0, 1]");
    double h = 0.0;
    if (p > 0.0) h -= p * std::log(p);
    if (p < 1.0) h -= (1.0 - p) * std::log(1.0 - p);
    return h;
}

double agreement_score(std::span<const Vote> votes) {
    int voting = 0, positive = 0;
    for (Vote v : votes) {
        if (v == Vote::abstain) continue;
        ++voting;
        positive += v == Vote::anomaly ? 1 : 0;
    }
    if (voting == 0) return 0.0;
    return binary_entropy(static_cast<double>(positive) / voting);
}

double abstention_score(std::span<const Vote> votes, std::size_t total_lfs) {
    const auto voting = static_cast<std::size_t>(
        std::count_if(votes.begin(), votes.end(), [](Vote v) { return v != Vote::abstain; }));
    require(total_lfs >= voting, ErrorCode::invalid_argument, "more votes than labeling functions");
    return std::log(static_cast<double>(total_lfs - voting) + 1.0);
}

double uncertainty_score(double p) { return binary_entropy(p); }

double diversity_score(std::span<const double> rep, const std::vector<std::span<const double>>& labeled) {
    if (labeled.empty()) return 1.0;
    double total = 0.0;
    for (const auto& other : labeled) {
        require(other.size() == rep.size(), ErrorCode::invalid_argument, "representation dimension mismatch");
        for (std::size_t d = 0; d < rep.size(); ++d) total += rep[d] * other[d];
    }
    return 1.0 - total / static_cast<double>(labeled.size());
}

double anomaly_probability(std::span<const double> normalized_scores) {
    require(!normalized_scores.empty(), ErrorCode::invalid_argument, "no detector scores to average");
    double s = 0.0;
    for (double x : normalized_scores) s += x;
    return s / static_cast<double>(normalized_scores.size());
}

double hybrid_score(double a, double h, double u, double d, double p, const QueryWeights& w) {
    return a + w.alpha * h + w.beta * u + w.gamma * d + w.delta * p;
}

double QueryComponents::q(std::size_t i, const QueryWeights& w) const {
    return hybrid_score(agreement[i], abstention[i], uncertainty[i], diversity[i], anomaly_prob[i], w);
}

QueryComponents compute_components(const VoteMatrix& votes, std::span<const double> end_model_probs,
                                   const RepresentationMatrix& rep, const LabeledSet& labeled,
                                   const std::vector<std::vector<double>>& detector_scores) {
    const std::size_t n = votes.rows();
    require(end_model_probs.size() == n && rep.rows == n && labeled.universe() == n, ErrorCode::invalid_argument,
            "query inputs cover different point sets");
    for (const auto& s : detector_scores)
        require(s.size() == n, ErrorCode::invalid_argument, "detector score vector has the wrong length");

    QueryComponents c;
    c.agreement.resize(n);
    c.abstention.resize(n);
    c.uncertainty.resize(n);
    c.diversity.assign(n, 1.0);
    c.anomaly_prob.assign(n, 0.0);

    std::vector<Vote> row(votes.cols());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < votes.cols(); ++j) row[j] = votes.at(i, j);
        c.agreement[i] = agreement_score(row);
        c.abstention[i] = abstention_score(row, votes.cols());
        c.uncertainty[i] = uncertainty_score(end_model_probs[i]);
    }

    // Mean of inner products equals the inner product with the mean vector.
    if (labeled.size() > 0) {
        std::vector<double> centre(rep.dims, 0.0);
        for (auto p : labeled.points()) {
            const auto r = rep.unit_row(p);
            for (std::size_t d = 0; d < rep.dims; ++d) centre[d] += r[d];
        }
        for (double& x : centre) x /= static_cast<double>(labeled.size());
        for (std::size_t i = 0; i < n; ++i) {
            const auto r = rep.unit_row(i);
            double dot = 0.0;
            for (std::size_t d = 0; d < rep.dims; ++d) dot += r[d] * centre[d];
            c.diversity[i] = 1.0 - dot;
        }
    }

    if (!detector_scores.empty()) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (const auto& det : detector_scores) s += det[i];
            c.anomaly_prob[i] = s / static_cast<double>(detector_scores.size());
        }
    }
    return c;
}

std::size_t select_next(const QueryComponents& components, const QueryWeights& weights,
                        const LabeledSet& labeled) {
    weights.validate();
    require(labeled.universe() == components.size(), ErrorCode::invalid_argument,
            "labeled set and components cover different point sets");
    std::size_t best = components.size();
    double best_q = -INFINITY;
    for (std::size_t i = 0; i < components.size(); ++i) {
        if (labeled.contains(i)) continue;
        const double q = components.q(i, weights);
        if (best == components.size() || q > best_q) {
            best = i;
            best_q = q;
        }
    }
    require(best < components.size(), ErrorCode::precondition, "every point is already labeled");
    return best;
}

std::vector<std::size_t> top_queries(const QueryComponents& components, const QueryWeights& weights,
                                     const LabeledSet& labeled, std::size_t k) {
    weights.validate();
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < components.size(); ++i)
        if (!labeled.contains(i)) idx.push_back(i);
    std::vector<double> q(components.size());
    for (auto i : idx) q[i] = components.q(i, weights);
    k = std::min(k, idx.size());
    std::partial_sort(idx.begin(), idx.begin() + static_cast<long>(k), idx.end(), [&](std::size_t a, std::size_t b) {
        if (q[a] != q[b]) return q[a] > q[b];
        return a < b;
    });
    idx.resize(k);
    return idx;
}

}  // namespace leiad
