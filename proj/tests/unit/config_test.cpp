#include "leiad/config.hpp"
#include "leiad/error.hpp"
#include "support.hpp"

using namespace leiad;

TEST_CASE("defaults") {
    const LeiadConfig c;
    CHECK(c.class_prior() == doctest::Approx(0.01));
    CHECK(c.detectors.size() == 5);
    CHECK(c.end_model.num_leaves == 200);
    CHECK(c.ann.number_of_leaves == 2000);
    CHECK(c.ann.number_of_leaves_to_search == 100);
    CHECK(c.ann.training_sample_size == 250000);
    CHECK(c.lf_threshold == 8.0);
    CHECK(c.active_learning.alpha == 0.5);
    CHECK(c.active_learning.delta == 0.2);
    CHECK(c.label_model.learning_rate == 0.001);
    CHECK(c.label_model.training_epoch == 200);
    CHECK(c.detector(DetectorKind::iforest).get("number_of_estimators") == 1000);
    CHECK(c.detector(DetectorKind::stl).get("lo_frac") == doctest::Approx(0.6));
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("dataset presets") {
    const auto y = config_preset("yahoo");
    CHECK(y.dataset.anomaly_percentage == 1.0);
    CHECK(y.dataset.length_of_segment == 400);
    CHECK(y.dataset.number_of_neighbors == 200);
    const auto m = config_preset("microsoft");
    CHECK(m.dataset.anomaly_percentage == 5.0);
    CHECK(m.class_prior() == doctest::Approx(0.05));
    CHECK(m.dataset.length_of_segment == 100);
    const auto k = config_preset("kpi");
    CHECK(k.dataset.weak_supervision_ratio == 0.05);
    CHECK(k.dataset.number_of_neighbors == 1000);
    CHECK(k.test_fraction == 0.5);
    CHECK_THROWS_AS(config_preset("nab"), Error);
}

TEST_CASE("parse_config overrides, presets and rejects unknown keys") {
    const auto c = parse_config(R"({"preset": "microsoft", "dataset": {"length_of_segment": 64},
                                    "stl": {"period": 24}, "lf_generation": {"threshold": 2}})");
    CHECK(c.dataset.anomaly_percentage == 5.0);
    CHECK(c.dataset.length_of_segment == 64);
    CHECK(c.detector(DetectorKind::stl).get("period") == 24);
    CHECK(c.lf_threshold == 2.0);
    CHECK_THROWS_AS(parse_config(R"({"dataset": {"segment": 3}})"), Error);
    CHECK_THROWS_AS(parse_config(R"({"stl": {"window": 3}})"), Error);
    CHECK_THROWS_AS(parse_config(R"({"bogus": 1})"), Error);
    CHECK_THROWS_AS(parse_config("{not json"), Error);
    CHECK_THROWS_AS(parse_config(R"({"test_fraction": 1.5})"), Error);
}

TEST_CASE("config JSON round-trip") {
    auto c = config_preset("kpi");
    c.detector(DetectorKind::zscore).set("window", 50);
    c.active_learning.gamma = 0.25;
    const auto back = parse_config(config_to_json(c));
    CHECK(config_to_json(back) == config_to_json(c));
    CHECK(back.detector(DetectorKind::zscore).get("window") == 50);
    CHECK(back.active_learning.gamma == 0.25);
}
