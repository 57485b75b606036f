#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "leiad/config.hpp"
#include "leiad/error.hpp"
#include "leiad/features.hpp"
#include "leiad/labelmodel.hpp"
#include "leiad/pipeline.hpp"
#include "leiad/service.hpp"
#include "leiad/synthetic.hpp"

using namespace leiad;

namespace {

struct DataOptions {
    std::string dataset;
    std::string config;
    std::string preset;
    std::uint64_t seed = 7;

    void add(CLI::App* app, bool dataset_required) {
        auto* opt = app->add_option("--dataset", dataset, "CSV with series_id,timestamp,value[,label]");
        if (dataset_required) opt->required();
        app->add_option("--config", config, "JSON config file");
        app->add_option("--preset", preset, "yahoo, microsoft or kpi");
        app->add_option("--seed", seed, "seed for the split and all randomness");
    }

    LeiadConfig load_cfg() const {
        require(config.empty() || preset.empty(), ErrorCode::invalid_argument, "--config and --preset exclude each other");
        if (!config.empty()) return load_config(config);
        if (!preset.empty()) return config_preset(preset);
        return LeiadConfig();
    }

    /// The dataset file, or the shipped synthetic benchmark when none is given.
    Dataset load_data() const {
        if (!dataset.empty()) return load_dataset(dataset);
        return generate_synthetic(SyntheticOptions{});
    }
};

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    require(static_cast<bool>(out), ErrorCode::io, "cannot write " + path);
    out << text;
}

std::string text_of_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), ErrorCode::io, "cannot read " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Label-efficient interactive time-series anomaly detection"};
    app.require_subcommand(1);

    // simulate
    DataOptions sim_data;
    int iterations = 20;
    std::string strategy = "hybrid", curve_out, labeled_out, registry_out;
    auto* sim = app.add_subcommand("simulate", "Run the loop against a simulated annotator");
    sim_data.add(sim, false);
    sim->add_option("--iterations", iterations)->check(CLI::NonNegativeNumber);
    sim->add_option("--strategy", strategy, "hybrid, random, no_warmup or no_lfgen");
    sim->add_option("--out", curve_out, "metrics curve CSV (default stdout)");
    sim->add_option("--labeled-out", labeled_out, "labeled-set export CSV");
    sim->add_option("--lf-registry", registry_out, "generated LF registry file");

    // serve
    DataOptions serve_data;
    std::string host = "127.0.0.1";
    int port = 8080;
    auto* serve = app.add_subcommand("serve", "Serve the annotation API with one session preloaded");
    serve_data.add(serve, false);
    serve->add_option("--host", host);
    serve->add_option("--port", port)->check(CLI::Range(0, 65535));

    // detect
    DataOptions det_data;
    std::string detector, series_id, det_out;
    auto* detect = app.add_subcommand("detect", "Score one series with one detector");
    det_data.add(detect, true);
    detect->add_option("--detector", detector, "iforest, spectral_residual, stl, rcforest, zscore")->required();
    detect->add_option("--series", series_id)->required();
    detect->add_option("--out", det_out);

    // votes
    DataOptions vote_data;
    std::string votes_out;
    auto* votes = app.add_subcommand("votes", "Detector votes for every point of a dataset");
    vote_data.add(votes, true);
    votes->add_option("--out", votes_out);

    // labelmodel
    auto* lm = app.add_subcommand("labelmodel", "Fit the label model or compute posteriors");
    lm->require_subcommand(1);
    std::string lm_votes, lm_config, lm_out, lm_weights;
    std::uint64_t lm_seed = 7;
    auto* lm_fit = lm->add_subcommand("fit", "Fit LF weights to a vote CSV");
    lm_fit->add_option("--votes", lm_votes)->required();
    lm_fit->add_option("--config", lm_config);
    lm_fit->add_option("--seed", lm_seed);
    lm_fit->add_option("--out", lm_out, "weights file (default stdout)");
    auto* lm_post = lm->add_subcommand("posterior", "Anomaly posterior per point");
    lm_post->add_option("--votes", lm_votes)->required();
    lm_post->add_option("--weights", lm_weights)->required();
    lm_post->add_option("--out", lm_out);

    // query
    DataOptions query_data;
    std::size_t top = 10;
    auto* query = app.add_subcommand("query", "Highest-Q unlabeled points after warm-up, with components");
    query_data.add(query, false);
    query->add_option("--top", top)->check(CLI::PositiveNumber);

    // features
    bool schema = false;
    DataOptions feat_data;
    std::string feat_series, feat_out;
    auto* features = app.add_subcommand("features", "Feature schema or per-point features of one series");
    features->add_flag("--schema", schema, "print the column header only");
    features->add_option("--dataset", feat_data.dataset);
    features->add_option("--series", feat_series);
    features->add_option("--out", feat_out);

    // generate
    SyntheticOptions syn;
    std::string gen_out;
    auto* generate = app.add_subcommand("generate", "Write the synthetic benchmark as CSV");
    generate->add_option("--series", syn.series_count)->check(CLI::PositiveNumber);
    generate->add_option("--length", syn.length)->check(CLI::PositiveNumber);
    generate->add_option("--anomaly-fraction", syn.anomaly_fraction);
    generate->add_option("--seed", syn.seed);
    generate->add_option("--out", gen_out);

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) {
            const auto cfg = sim_data.load_cfg();
            const auto result =
                simulate(sim_data.load_data(), cfg, iterations, sim_data.seed, strategy_from_string(strategy));
            emit(curve_out, format_curve(result.curve));
            if (!labeled_out.empty()) emit(labeled_out, result.labeled_set_csv);
            if (!registry_out.empty()) {
                std::remove(registry_out.c_str());
                for (const auto& lf : result.generated_lfs) append_lf_registry(registry_out, lf);
            }
            std::cerr << "single-detector test AP:";
            for (std::size_t k = 0; k < result.uad_test_ap.size(); ++k)
                std::cerr << ' ' << to_string(kAllDetectors[k]) << '=' << result.uad_test_ap[k];
            std::cerr << '\n';
        } else if (serve->parsed()) {
            service::SessionManager manager;
            const auto id = manager.create(serve_data.load_data(), serve_data.load_cfg(), serve_data.seed);
            service::Server server(manager);
            std::cerr << "session " << id << " ready; listening on " << host << ':' << port << '\n';
            if (!server.listen(host, port)) fail(ErrorCode::io, "cannot listen on " + host + ":" + std::to_string(port));
        } else if (detect->parsed()) {
            const auto cfg = det_data.load_cfg();
            const auto data = det_data.load_data();
            const auto& series = data.find(series_id);
            const auto scores = score_series(cfg.detector(detector_kind_from_string(detector)), series, det_data.seed);
            std::string out = "timestamp,score\n";
            for (std::size_t i = 0; i < series.size(); ++i)
                out += std::to_string(series.timestamps[i]) + "," + fmt(scores.scores[i]) + "\n";
            emit(det_out, out);
        } else if (votes->parsed()) {
            const auto cfg = vote_data.load_cfg();
            const auto data = vote_data.load_data();
            auto matrix = assemble_vote_matrix(detector_votes(data, cfg, vote_data.seed), data);
            emit(votes_out, format_vote_table(make_vote_table(data, std::move(matrix))));
        } else if (lm_fit->parsed()) {
            const auto cfg = lm_config.empty() ? LeiadConfig() : load_config(lm_config);
            auto lmc = cfg.label_model;
            lmc.class_prior = cfg.class_prior();
            const auto table = parse_vote_table(text_of_file(lm_votes), lm_votes);
            const auto params = fit_generative(table.matrix, lmc, lm_seed);
            emit(lm_out, format_label_model(params, table.matrix.lf_ids()));
        } else if (lm_post->parsed()) {
            const auto table = parse_vote_table(text_of_file(lm_votes), lm_votes);
            std::vector<std::string> ids;
            const auto params = parse_label_model(text_of_file(lm_weights), ids);
            require(ids == table.matrix.lf_ids(), ErrorCode::invalid_argument,
                    "weights file LFs do not match the vote columns");
            const auto p = posterior(params, table.matrix);
            std::string out = "series_id,timestamp,probability\n";
            for (std::size_t r = 0; r < p.size(); ++r)
                out += table.series_ids[r] + "," + std::to_string(table.timestamps[r]) + "," + fmt(p[r]) + "\n";
            emit(lm_out, out);
        } else if (query->parsed()) {
            const auto cfg = query_data.load_cfg();
            Pipeline pipeline(prepare_data(query_data.load_data(), cfg, query_data.seed), cfg, query_data.seed);
            pipeline.warm_up();
            const auto c = pipeline.components();
            const auto& w = cfg.active_learning;
            std::printf("%4s %8s %-12s %10s %9s %9s %9s %9s %9s %9s\n", "rank", "point", "series", "timestamp", "Q",
                        "A", "H", "U", "D", "P");
            const auto best = top_queries(c, w, pipeline.state().labeled, top);
            const auto& data = pipeline.data();
            for (std::size_t r = 0; r < best.size(); ++r) {
                const auto i = best[r];
                const auto [s, local] = data.train_index.locate(i);
                const auto& series = data.train.series[s];
                std::printf("%4zu %8zu %-12s %10lld %9.5f %9.5f %9.5f %9.5f %9.5f %9.5f\n", r + 1, i, series.id.c_str(),
                            static_cast<long long>(series.timestamps[local]), c.q(i, w), c.agreement[i],
                            c.abstention[i], c.uncertainty[i], c.diversity[i], c.anomaly_prob[i]);
            }
        } else if (features->parsed()) {
            const auto& names = feature_names();
            std::string header = schema ? "" : "timestamp,";
            for (std::size_t k = 0; k < names.size(); ++k) header += (k ? "," : "") + names[k];
            header += '\n';
            if (schema) {
                emit(feat_out, header);
            } else {
                require(!feat_data.dataset.empty() && !feat_series.empty(), ErrorCode::invalid_argument,
                        "features needs --schema, or --dataset with --series");
                const auto data = load_dataset(feat_data.dataset);
                const auto& series = data.find(feat_series);
                const auto m = extract_feature_matrix(series);
                std::string out = header;
                for (std::size_t i = 0; i < m.rows; ++i) {
                    out += std::to_string(series.timestamps[i]);
                    for (double v : m.row(i)) out += "," + fmt(v);
                    out += '\n';
                }
                emit(feat_out, out);
            }
        } else if (generate->parsed()) {
            emit(gen_out, format_dataset(generate_synthetic(syn)));
        }
    } catch (const Error& e) {
        std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
