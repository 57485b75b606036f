#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "leiad/features.hpp"
#include "leiad/labelmodel.hpp"

namespace leiad {

struct EndModelConfig {
    std::string kind = "gbt";  // "gbt" or "logistic"
    int num_rounds = 100;
    double learning_rate = 0.1;
    int num_leaves = 200;
    int min_data_in_leaf = 20;
    double min_sum_hessian = 1e-3;
    double lambda_l2 = 1.0;
    double weak_label_weight = 1.0;
    double class_prior = 0.01;
    int logistic_epochs = 300;

    void validate() const;
};

/// Rows of the feature matrix selected by a weak label set.
struct TrainingData {
    FeatureMatrix features;
    std::vector<int> labels;
    std::vector<double> weights;

    std::size_t size() const { return labels.size(); }
};

/// Ground-truth entries get weight 1, weak entries `weak_label_weight`.
TrainingData gather_training_data(const FeatureMatrix& all, const WeakLabelSet& labels,
                                  double weak_label_weight);

class Classifier {
public:
    virtual ~Classifier() = default;
    virtual std::string_view kind() const = 0;
    virtual std::size_t num_features() const = 0;
    virtual double predict(std::span<const double> features) const = 0;
    std::vector<double> predict(const FeatureMatrix& features) const;
    virtual void write(std::ostream& out) const = 0;

protected:
    void check_width(std::size_t width) const;
};

struct RegressionTree {
    struct Node {
        int feature = -1;  // -1 marks a leaf
        double threshold = 0.0;
        int left = -1;
        int right = -1;
        double value = 0.0;
    };
    std::vector<Node> nodes;
    double shrinkage = 0.0;

    std::size_t leaf_count() const;
    /// Raw leaf value (before shrinkage) for a row; goes left when x <= threshold.
    double output(std::span<const double> row) const;
};

/// Gradient-boosted trees on binary cross-entropy.
class GbtModel final : public Classifier {
public:
    GbtModel() = default;
    GbtModel(std::size_t num_features, double base_score, double learning_rate, int num_leaves_limit)
        : num_features_(num_features), base_score_(base_score), learning_rate_(learning_rate),
          num_leaves_limit_(num_leaves_limit) {}

    /// Predicts `prior` everywhere.
    static GbtModel constant(std::size_t num_features, double prior);

    std::string_view kind() const override { return "gbt"; }
    std::size_t num_features() const override { return num_features_; }
    double predict(std::span<const double> features) const override;
    using Classifier::predict;
    void write(std::ostream& out) const override;
    static GbtModel read(std::istream& in);

    /// Logit before the sigmoid.
    double raw_score(std::span<const double> features) const;

    const std::vector<RegressionTree>& trees() const { return trees_; }
    double base_score() const { return base_score_; }
    double learning_rate() const { return learning_rate_; }
    int num_leaves_limit() const { return num_leaves_limit_; }
    /// Weighted mean training loss before the first round and after each round.
    const std::vector<double>& loss_trace() const { return loss_trace_; }

    void add_tree(RegressionTree tree) { trees_.push_back(std::move(tree)); }
    void record_loss(double loss) { loss_trace_.push_back(loss); }

private:
    std::size_t num_features_ = 0;
    double base_score_ = 0.0;
    double learning_rate_ = 0.1;
    int num_leaves_limit_ = 200;
    std::vector<RegressionTree> trees_;
    std::vector<double> loss_trace_;
};

/// Boosting with histogram splits (at most 255 bins per feature) grown
/// leaf-wise. Each round fits a tree to the loss gradients with Newton leaf
/// values; if a round would raise the training
/// loss its step is halved until it does not. Rows are put in a canonical
/// order first, so the result does not depend on input order.
GbtModel train_gbt(const TrainingData& data, const EndModelConfig& config, std::uint64_t seed);

/// L2-regularized logistic regression on standardized features.
class LogisticModel final : public Classifier {
public:
    std::string_view kind() const override { return "logistic"; }
    std::size_t num_features() const override { return weights.size(); }
    double predict(std::span<const double> features) const override;
    using Classifier::predict;
    void write(std::ostream& out) const override;
    static LogisticModel read(std::istream& in);

    std::vector<double> mean, scale, weights;
    double bias = 0.0;
};

LogisticModel train_logistic(const TrainingData& data, const EndModelConfig& config);

/// Dispatches on config.kind. A label set with a single class yields a
/// constant model at class_prior and a warning.
std::unique_ptr<Classifier> train_end_model(const FeatureMatrix& features, const WeakLabelSet& labels,
                                            const EndModelConfig& config, std::uint64_t seed);

std::unique_ptr<Classifier> read_classifier(std::istream& in);
void save_classifier(const Classifier& model, const std::string& path);
std::unique_ptr<Classifier> load_classifier(const std::string& path);

}  // namespace leiad
