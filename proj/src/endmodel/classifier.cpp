#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "leiad/endmodel.hpp"
#include "leiad/error.hpp"
#include "leiad/log.hpp"

namespace leiad {

void EndModelConfig::validate() const {
    require(kind == "gbt" || kind == "logistic", ErrorCode::invalid_argument,
            "end_model.kind must be 'gbt' or 'logistic', got '" + kind + "'");
    require(num_rounds >= 0, ErrorCode::invalid_argument, "end_model.num_rounds must be >= 0");
    require(learning_rate > 0.0 && std::isfinite(learning_rate), ErrorCode::invalid_argument,
            "end_model.learning_rate must be positive");
    require(num_leaves >= 2, ErrorCode::invalid_argument, "end_model.num_leaves must be >= 2");
    require(min_data_in_leaf >= 1, ErrorCode::invalid_argument,
            "end_model.min_data_in_leaf must be >= 1");
    require(min_sum_hessian >= 0.0 && lambda_l2 >= 0.0, ErrorCode::invalid_argument,
            "end_model.min_sum_hessian and lambda_l2 must be >= 0");
    require(weak_label_weight > 0.0, ErrorCode::invalid_argument,
            "end_model.weak_label_weight must be positive");
    require(class_prior > 0.0 && class_prior < 1.0, ErrorCode::invalid_argument,
            "end_model.class_prior must lie in (0, 1)");
    require(logistic_epochs >= 0, ErrorCode::invalid_argument, "end_model.logistic_epochs must be >= 0");
}

TrainingData gather_training_data(const FeatureMatrix& all, const WeakLabelSet& labels,
                                  double weak_label_weight) {
    TrainingData d;
    d.features = FeatureMatrix(labels.entries.size(), all.cols);
    d.labels.reserve(labels.entries.size());
    d.weights.reserve(labels.entries.size());
    std::size_t r = 0;
    for (const auto& e : labels.entries) {
        require(e.point < all.rows, ErrorCode::out_of_range,
                "weak label refers to point " + std::to_string(e.point) + " beyond the feature matrix");
        const auto src = all.row(e.point);
        std::copy(src.begin(), src.end(), d.features.row(r++).begin());
        d.labels.push_back(e.label);
        d.weights.push_back(e.source == LabelSource::weak ? weak_label_weight : 1.0);
    }
    return d;
}

void Classifier::check_width(std::size_t width) const {
    require(width == num_features(), ErrorCode::invalid_argument,
            "feature layout mismatch: model expects " + std::to_string(num_features()) +
                " features, got " + std::to_string(width));
}

std::vector<double> Classifier::predict(const FeatureMatrix& features) const {
    check_width(features.cols);
    std::vector<double> out(features.rows);
    for (std::size_t i = 0; i < features.rows; ++i) out[i] = predict(features.row(i));
    return out;
}

std::unique_ptr<Classifier> train_end_model(const FeatureMatrix& features, const WeakLabelSet& labels,
                                            const EndModelConfig& config, std::uint64_t seed) {
    config.validate();
    const auto data = gather_training_data(features, labels, config.weak_label_weight);
    const bool has_pos = std::find(data.labels.begin(), data.labels.end(), 1) != data.labels.end();
    const bool has_neg = std::find(data.labels.begin(), data.labels.end(), 0) != data.labels.end();
    if (!has_pos || !has_neg) {
        warn("end model trained on " + std::to_string(data.size()) +
             " labels without both classes; using a constant model at the class prior");
        return std::make_unique<GbtModel>(GbtModel::constant(features.cols, config.class_prior));
    }
    if (config.kind == "logistic") return std::make_unique<LogisticModel>(train_logistic(data, config));
    return std::make_unique<GbtModel>(train_gbt(data, config, seed));
}

std::unique_ptr<Classifier> read_classifier(std::istream& in) {
    const auto start = in.tellg();
    std::string magic;
    in >> magic;
    in.seekg(start);
    if (magic == "LEIAD-GBT-v1") return std::make_unique<GbtModel>(GbtModel::read(in));
    if (magic == "LEIAD-LOGREG-v1") return std::make_unique<LogisticModel>(LogisticModel::read(in));
    fail(ErrorCode::parse, "unrecognized model format '" + magic + "'");
}

void save_classifier(const Classifier& model, const std::string& path) {
    std::ofstream out(path);
    require(static_cast<bool>(out), ErrorCode::io, "cannot write model file " + path);
    model.write(out);
    require(static_cast<bool>(out), ErrorCode::io, "failed writing model file " + path);
}

std::unique_ptr<Classifier> load_classifier(const std::string& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), ErrorCode::io, "cannot open model file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return read_classifier(buf);
}

}  // namespace leiad
