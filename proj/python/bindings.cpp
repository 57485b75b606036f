#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "leiad/active.hpp"
#include "leiad/config.hpp"
#include "leiad/error.hpp"
#include "leiad/features.hpp"
#include "leiad/labelmodel.hpp"
#include "leiad/metrics.hpp"
#include "leiad/pipeline.hpp"
#include "leiad/service.hpp"
#include "leiad/synthetic.hpp"

namespace py = pybind11;
using namespace leiad;

namespace {

LeiadConfig config_from(const std::string& json_text) {
    return json_text.empty() ? LeiadConfig() : parse_config(json_text);
}

VoteMatrix matrix_from_rows(const std::vector<std::vector<int>>& rows) {
    VoteMatrix m(rows.size());
    const std::size_t cols = rows.empty() ? 0 : rows.front().size();
    for (std::size_t c = 0; c < cols; ++c) {
        std::vector<Vote> column;
        column.reserve(rows.size());
        for (const auto& r : rows) {
            require(r.size() == cols, ErrorCode::invalid_argument, "ragged vote rows");
            column.push_back(vote_from_int(r[c]));
        }
        m.add_column("lf" + std::to_string(c), std::move(column));
    }
    return m;
}

py::dict metrics_dict(const Metrics& m) {
    py::dict d;
    d["ap"] = m.average_precision;
    d["roc_auc"] = m.roc_auc;
    d["ap_auc"] = m.ap_auc_running;
    return d;
}

}  // namespace

PYBIND11_MODULE(_leiad, m) {
    m.doc() = "Interactive label-efficient time-series anomaly detection";

    py::register_exception<Error>(m, "LeiadError", PyExc_RuntimeError);

    py::class_<Series>(m, "Series")
        .def(py::init<>())
        .def(py::init([](std::string id, std::vector<std::int64_t> ts, std::vector<double> values,
                         std::vector<std::int8_t> truth) {
                 Series s{std::move(id), std::move(ts), std::move(values), std::move(truth)};
                 s.validate();
                 return s;
             }),
             py::arg("id"), py::arg("timestamps"), py::arg("values"), py::arg("truth") = std::vector<std::int8_t>{})
        .def_readwrite("id", &Series::id)
        .def_readwrite("timestamps", &Series::timestamps)
        .def_readwrite("values", &Series::values)
        .def_readwrite("truth", &Series::truth)
        .def("__len__", &Series::size);

    py::class_<Dataset>(m, "Dataset")
        .def(py::init<>())
        .def_readwrite("series", &Dataset::series)
        .def("total_points", &Dataset::total_points)
        .def("find", &Dataset::find, py::return_value_policy::copy);

    m.def("load_dataset", [](const std::string& path) { return load_dataset(path); });
    m.def("parse_dataset", [](const std::string& text) { return parse_dataset(text); });
    m.def("format_dataset", &format_dataset);
    m.def(
        "generate_synthetic",
        [](int series, int length, double fraction, std::uint64_t seed) {
            return generate_synthetic(SyntheticOptions{series, length, fraction, seed});
        },
        py::arg("series") = 20, py::arg("length") = 5000, py::arg("anomaly_fraction") = 0.01, py::arg("seed") = 7);

    m.def("default_config", [] { return config_to_json(LeiadConfig()); });
    m.def("config_preset", [](const std::string& name) { return config_to_json(config_preset(name)); });

    m.def(
        "detect",
        [](const Series& s, const std::string& detector, std::uint64_t seed, const std::string& config) {
            return score_series(config_from(config).detector(detector_kind_from_string(detector)), s, seed).scores;
        },
        py::arg("series"), py::arg("detector"), py::arg("seed") = 7, py::arg("config") = "");

    m.def(
        "scores_to_votes",
        [](std::vector<double> scores, double contamination, double abstain_quantile) {
            const auto v = scores_to_lf_votes(ScoreSeries{"", std::move(scores)}, contamination, abstain_quantile);
            std::vector<int> out;
            for (auto x : v.votes) out.push_back(to_int(x));
            return out;
        },
        py::arg("scores"), py::arg("contamination") = 0.01, py::arg("abstain_quantile") = 0.5);

    m.def(
        "fit_label_model",
        [](const std::vector<std::vector<int>>& votes, double class_prior, std::uint64_t seed, int epochs) {
            LabelModelConfig cfg;
            cfg.class_prior = class_prior;
            cfg.training_epoch = epochs;
            return fit_generative(matrix_from_rows(votes), cfg, seed).weights;
        },
        py::arg("votes"), py::arg("class_prior") = 0.01, py::arg("seed") = 7, py::arg("epochs") = 200,
        "Per-LF weights for a row-major vote matrix with cells in {-1, 0, 1}.");

    m.def(
        "label_posterior",
        [](const std::vector<std::vector<int>>& votes, std::vector<double> weights, double class_prior) {
            LabelModelParams p{std::move(weights), class_prior, 0};
            return posterior(p, matrix_from_rows(votes));
        },
        py::arg("votes"), py::arg("weights"), py::arg("class_prior") = 0.01);

    m.def("feature_names", &feature_names);
    m.def("extract_features", [](const Series& s, std::size_t i) { return extract_features(s, i); });

    m.def("average_precision", [](std::vector<double> s, std::vector<int> y) { return average_precision(s, y); });
    m.def("roc_auc", [](std::vector<double> s, std::vector<int> y) { return roc_auc(s, y); });

    m.def("binary_entropy", &binary_entropy);
    m.def(
        "hybrid_score",
        [](double a, double h, double u, double d, double p, double alpha, double beta, double gamma, double delta) {
            return hybrid_score(a, h, u, d, p, QueryWeights{alpha, beta, gamma, delta});
        },
        py::arg("a"), py::arg("h"), py::arg("u"), py::arg("d"), py::arg("p"), py::arg("alpha") = 0.5,
        py::arg("beta") = 0.5, py::arg("gamma") = 1.0, py::arg("delta") = 0.2);

    m.def(
        "simulate",
        [](const Dataset& dataset, int iterations, std::uint64_t seed, const std::string& strategy,
           const std::string& config) {
            SimulationResult r;
            {
                py::gil_scoped_release release;
                r = simulate(dataset, config_from(config), iterations, seed, strategy_from_string(strategy));
            }
            py::dict out;
            py::list curve;
            for (const auto& mt : r.curve) curve.append(metrics_dict(mt));
            out["curve"] = curve;
            out["curve_csv"] = format_curve(r.curve);
            out["uad_test_ap"] = r.uad_test_ap;
            out["labeled_set_csv"] = r.labeled_set_csv;
            out["generated_lfs"] = r.generated_lfs.size();
            return out;
        },
        py::arg("dataset"), py::arg("iterations") = 20, py::arg("seed") = 7, py::arg("strategy") = "hybrid",
        py::arg("config") = "");

    py::class_<service::SessionManager>(m, "SessionManager")
        .def(py::init<>())
        .def(
            "create",
            [](service::SessionManager& self, const Dataset& d, std::uint64_t seed, const std::string& config) {
                py::gil_scoped_release release;
                return self.create(d, config_from(config), seed);
            },
            py::arg("dataset"), py::arg("seed") = 7, py::arg("config") = "")
        .def(
            "request",
            [](service::SessionManager& self, const std::string& method, const std::string& path,
               const std::string& body, std::map<std::string, std::string> query) {
                service::ApiResponse r;
                {
                    py::gil_scoped_release release;
                    r = self.dispatch({method, path, std::move(query), body});
                }
                return py::make_tuple(r.status, r.body);
            },
            py::arg("method"), py::arg("path"), py::arg("body") = "",
            py::arg("query") = std::map<std::string, std::string>{},
            "Routes one API call; returns (status, JSON body).")
        .def("__len__", &service::SessionManager::size);
}
