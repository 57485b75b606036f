#pragma once

#include <span>
#include <vector>

#include "leiad/labelmodel.hpp"
#include "leiad/lfgen.hpp"

namespace leiad {

struct QueryWeights {
    double alpha = 0.5;  // abstention
    double beta = 0.5;   // end-model uncertainty
    double gamma = 1.0;  // diversity
    double delta = 0.2;  // detector anomaly probability

    void validate() const;
};

/// -p ln p - (1 - p) ln(1 - p), with 0 ln 0 = 0.
double binary_entropy(double p);

/// Entropy of the anomaly fraction among non-abstaining votes; 0 if all abstain.
double agreement_score(std::span<const Vote> votes);

/// ln(total_lfs - voting + 1).
double abstention_score(std::span<const Vote> votes, std::size_t total_lfs);

double uncertainty_score(double p);

/// 1 - mean inner product with the labeled representations; 1 when none.
double diversity_score(std::span<const double> rep, const std::vector<std::span<const double>>& labeled);

/// Mean of per-detector normalized scores.
double anomaly_probability(std::span<const double> normalized_scores);

double hybrid_score(double a, double h, double u, double d, double p, const QueryWeights& w);

struct QueryComponents {
    std::vector<double> agreement;
    std::vector<double> abstention;
    std::vector<double> uncertainty;
    std::vector<double> diversity;
    std::vector<double> anomaly_prob;

    std::size_t size() const { return agreement.size(); }
    double q(std::size_t i, const QueryWeights& w) const;
};

/// Components for every point. `detector_scores` holds one rank-normalized
/// score vector per detector (may be empty, giving P = 0). Diversity uses the
/// unit rows of `rep` against every point of `labeled`.
QueryComponents compute_components(const VoteMatrix& votes, std::span<const double> end_model_probs,
                                   const RepresentationMatrix& rep, const LabeledSet& labeled,
                                   const std::vector<std::vector<double>>& detector_scores);

/// Unlabeled point with the largest Q; ties go to the lower index.
std::size_t select_next(const QueryComponents& components, const QueryWeights& weights,
                        const LabeledSet& labeled);

/// The `k` best unlabeled points in descending Q order.
std::vector<std::size_t> top_queries(const QueryComponents& components, const QueryWeights& weights,
                                     const LabeledSet& labeled, std::size_t k);

}  // namespace leiad
