#pragma once

#include <string>
#include <vector>

#include "leiad/active.hpp"
#include "leiad/coredata.hpp"
#include "leiad/endmodel.hpp"
#include "leiad/labelmodel.hpp"
#include "leiad/lfgen.hpp"
#include "leiad/uad.hpp"

namespace leiad {

struct VoteConfig {
    double contamination = 0.01;
    double abstain_quantile = 0.5;

    void validate() const;
};

/// Everything a pipeline run needs. Defaults are the Yahoo column of the
/// per-dataset table plus the shared hyper-parameters.
struct LeiadConfig {
    DatasetParams dataset;
    std::vector<DetectorConfig> detectors;  // one per kind, in kAllDetectors order
    VoteConfig votes;
    LabelModelConfig label_model;
    EndModelConfig end_model;
    double lf_threshold = 8.0;
    AnnConfig ann;
    QueryWeights active_learning;
    double test_fraction = 0.25;

    LeiadConfig();

    const DetectorConfig& detector(DetectorKind kind) const;
    DetectorConfig& detector(DetectorKind kind);

    /// Class prior used by the label and end models: anomaly_percentage / 100.
    double class_prior() const { return dataset.anomaly_percentage / 100.0; }

    void validate() const;
};

/// "yahoo", "microsoft" or "kpi".
LeiadConfig config_preset(const std::string& name);

/// JSON object whose sections mirror the struct. Missing keys keep their
/// defaults; unknown keys are errors.
LeiadConfig parse_config(const std::string& json_text, const LeiadConfig& base = LeiadConfig());
LeiadConfig load_config(const std::string& path);
std::string config_to_json(const LeiadConfig& config);

}  // namespace leiad
