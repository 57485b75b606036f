#include "leiad/config.hpp"

#include <cmath>
#include <functional>
#include <map>

#include "json.hpp"

#include "leiad/error.hpp"
#include "text.hpp"

namespace leiad {

using json = nlohmann::json;

void VoteConfig::validate() const {
    require(contamination > 0.0 && contamination < abstain_quantile && abstain_quantile < 1.0,
            ErrorCode::invalid_argument, "votes: need 0 < contamination < abstain_quantile < 1");
}

LeiadConfig::LeiadConfig() {
    for (auto kind : kAllDetectors) detectors.push_back(DetectorConfig::defaults(kind));
    label_model.class_prior = class_prior();
    end_model.class_prior = class_prior();
}

const DetectorConfig& LeiadConfig::detector(DetectorKind kind) const {
    for (const auto& d : detectors)
        if (d.kind == kind) return d;
    fail(ErrorCode::not_found, "no config for detector " + std::string(to_string(kind)));
}

DetectorConfig& LeiadConfig::detector(DetectorKind kind) {
    return const_cast<DetectorConfig&>(static_cast<const LeiadConfig*>(this)->detector(kind));
}

void LeiadConfig::validate() const {
    dataset.validate();
    for (const auto& d : detectors) d.validate();
    votes.validate();
    label_model.validate();
    end_model.validate();
    require(std::isfinite(lf_threshold) && lf_threshold >= 0.0, ErrorCode::invalid_argument,
            "lf_generation.threshold must be finite and >= 0");
    ann.validate();
    active_learning.validate();
    require(test_fraction > 0.0 && test_fraction < 1.0, ErrorCode::invalid_argument,
            "test_fraction must lie in (0, 1)");
}

LeiadConfig config_preset(const std::string& name) {
    LeiadConfig c;
    if (name == "yahoo") {
        c.dataset = {1.0, 0.1, 400, 200};
    } else if (name == "microsoft") {
        c.dataset = {5.0, 0.1, 100, 50};
    } else if (name == "kpi") {
        c.dataset = {2.0, 0.05, 800, 1000};
        c.test_fraction = 0.5;
    } else {
        fail(ErrorCode::invalid_argument, "unknown preset '" + name + "' (yahoo, microsoft, kpi)");
    }
    c.label_model.class_prior = c.class_prior();
    c.end_model.class_prior = c.class_prior();
    return c;
}

namespace {

using Setter = std::function<void(const json&)>;

template <typename T>
Setter field(T& target) {
    return [&target](const json& v) { target = v.get<T>(); };
}

void apply_section(const json& obj, const std::string& path, const std::map<std::string, Setter>& setters) {
    require(obj.is_object(), ErrorCode::parse, "config: '" + path + "' must be an object");
    for (const auto& [key, value] : obj.items()) {
        const auto it = setters.find(key);
        require(it != setters.end(), ErrorCode::parse, "config: unknown key '" + path + "." + key + "'");
        try {
            it->second(value);
        } catch (const json::exception& e) {
            fail(ErrorCode::parse, "config: bad value for '" + path + "." + key + "': " + e.what());
        }
    }
}

}  // namespace

LeiadConfig parse_config(const std::string& json_text, const LeiadConfig& base) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        fail(ErrorCode::parse, std::string("config is not valid JSON: ") + e.what());
    }
    require(root.is_object(), ErrorCode::parse, "config root must be an object");

    LeiadConfig c = base;
    if (root.contains("preset")) c = config_preset(root["preset"].get<std::string>());

    std::map<std::string, Setter> top;
    top["preset"] = [](const json&) {};
    top["dataset"] = [&](const json& s) {
        apply_section(s, "dataset", {{"anomaly_percentage", field(c.dataset.anomaly_percentage)},
                                     {"weak_supervision_ratio", field(c.dataset.weak_supervision_ratio)},
                                     {"length_of_segment", field(c.dataset.length_of_segment)},
                                     {"number_of_neighbors", field(c.dataset.number_of_neighbors)}});
    };
    for (auto kind : kAllDetectors) {
        const std::string name(to_string(kind));
        top[name] = [&c, kind, name](const json& s) {
            require(s.is_object(), ErrorCode::parse, "config: '" + name + "' must be an object");
            auto& det = c.detector(kind);
            for (const auto& [key, value] : s.items()) {
                require(value.is_number(), ErrorCode::parse, "config: '" + name + "." + key + "' must be a number");
                try {
                    det.set(key, value.get<double>());
                } catch (const Error&) {
                    fail(ErrorCode::parse, "config: unknown key '" + name + "." + key + "'");
                }
            }
        };
    }
    top["votes"] = [&](const json& s) {
        apply_section(s, "votes", {{"contamination", field(c.votes.contamination)},
                                   {"abstain_quantile", field(c.votes.abstain_quantile)}});
    };
    top["label_model"] = [&](const json& s) {
        apply_section(s, "label_model", {{"learning_rate", field(c.label_model.learning_rate)},
                                         {"training_epoch", field(c.label_model.training_epoch)},
                                         {"gibbs_samples_per_step", field(c.label_model.gibbs_samples_per_step)},
                                         {"batch_size", field(c.label_model.batch_size)}});
    };
    top["end_model"] = [&](const json& s) {
        apply_section(s, "end_model", {{"kind", field(c.end_model.kind)},
                                       {"num_rounds", field(c.end_model.num_rounds)},
                                       {"learning_rate", field(c.end_model.learning_rate)},
                                       {"num_leaves", field(c.end_model.num_leaves)},
                                       {"min_data_in_leaf", field(c.end_model.min_data_in_leaf)},
                                       {"min_sum_hessian", field(c.end_model.min_sum_hessian)},
                                       {"lambda_l2", field(c.end_model.lambda_l2)},
                                       {"weak_label_weight", field(c.end_model.weak_label_weight)},
                                       {"logistic_epochs", field(c.end_model.logistic_epochs)}});
    };
    top["lf_generation"] = [&](const json& s) {
        apply_section(s, "lf_generation", {{"threshold", field(c.lf_threshold)}});
    };
    top["ann"] = [&](const json& s) {
        apply_section(s, "ann", {{"number_of_leaves", field(c.ann.number_of_leaves)},
                                 {"number_of_leaves_to_search", field(c.ann.number_of_leaves_to_search)},
                                 {"training_sample_size", field(c.ann.training_sample_size)},
                                 {"reorder", field(c.ann.reorder)},
                                 {"kmeans_iterations", field(c.ann.kmeans_iterations)},
                                 {"spill", field(c.ann.spill)},
                                 {"ann_min_points", field(c.ann.ann_min_points)}});
    };
    top["active_learning"] = [&](const json& s) {
        apply_section(s, "active_learning", {{"alpha", field(c.active_learning.alpha)},
                                             {"beta", field(c.active_learning.beta)},
                                             {"gamma", field(c.active_learning.gamma)},
                                             {"delta", field(c.active_learning.delta)}});
    };
    top["test_fraction"] = field(c.test_fraction);

    apply_section(root, "config", top);
    c.label_model.class_prior = c.class_prior();
    c.end_model.class_prior = c.class_prior();
    c.validate();
    return c;
}

LeiadConfig load_config(const std::string& path) { return parse_config(text::read_file(path)); }

std::string config_to_json(const LeiadConfig& c) {
    json root;
    root["dataset"] = {{"anomaly_percentage", c.dataset.anomaly_percentage},
                       {"weak_supervision_ratio", c.dataset.weak_supervision_ratio},
                       {"length_of_segment", c.dataset.length_of_segment},
                       {"number_of_neighbors", c.dataset.number_of_neighbors}};
    for (const auto& d : c.detectors) {
        json section = json::object();
        for (const auto& [name, value] : DetectorConfig::defaults(d.kind).parameters) section[name] = d.get(name);
        root[std::string(to_string(d.kind))] = section;
    }
    root["votes"] = {{"contamination", c.votes.contamination}, {"abstain_quantile", c.votes.abstain_quantile}};
    root["label_model"] = {{"learning_rate", c.label_model.learning_rate},
                           {"training_epoch", c.label_model.training_epoch},
                           {"gibbs_samples_per_step", c.label_model.gibbs_samples_per_step},
                           {"batch_size", c.label_model.batch_size}};
    root["end_model"] = {{"kind", c.end_model.kind},
                         {"num_rounds", c.end_model.num_rounds},
                         {"learning_rate", c.end_model.learning_rate},
                         {"num_leaves", c.end_model.num_leaves},
                         {"min_data_in_leaf", c.end_model.min_data_in_leaf},
                         {"min_sum_hessian", c.end_model.min_sum_hessian},
                         {"lambda_l2", c.end_model.lambda_l2},
                         {"weak_label_weight", c.end_model.weak_label_weight},
                         {"logistic_epochs", c.end_model.logistic_epochs}};
    root["lf_generation"] = {{"threshold", c.lf_threshold}};
    root["ann"] = {{"number_of_leaves", c.ann.number_of_leaves},
                   {"number_of_leaves_to_search", c.ann.number_of_leaves_to_search},
                   {"training_sample_size", c.ann.training_sample_size},
                   {"reorder", c.ann.reorder},
                   {"kmeans_iterations", c.ann.kmeans_iterations},
                   {"spill", c.ann.spill},
                   {"ann_min_points", c.ann.ann_min_points}};
    root["active_learning"] = {{"alpha", c.active_learning.alpha},
                               {"beta", c.active_learning.beta},
                               {"gamma", c.active_learning.gamma},
                               {"delta", c.active_learning.delta}};
    root["test_fraction"] = c.test_fraction;
    return root.dump(2) + "\n";
}

}  // namespace leiad
