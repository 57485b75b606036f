#include <algorithm>
#include <charconv>
#include <set>

#include "json.hpp"
#include "leiad/error.hpp"
#include "leiad/service.hpp"

namespace leiad::service {

using json = nlohmann::json;

const char* to_string(Phase p) {
    switch (p) {
        case Phase::idle: return "idle";
        case Phase::awaiting_annotation: return "awaiting_annotation";
        case Phase::training: return "training";
    }
    return "unknown";
}

struct SessionManager::Session {
    std::string id;
    std::mutex writer;  // one mutating request at a time
    std::unique_ptr<Pipeline> pipeline;
    std::optional<Query> pending;
    std::atomic<Phase> phase{Phase::idle};

    // Readable while a submit is training.
    mutable std::mutex snapshot_mutex;
    json history = json::array();
    int iteration = 0;
    std::size_t labeled = 0;
    json summary;

    void refresh_snapshot() {
        const auto& st = pipeline->state();
        json h = json::array();
        for (std::size_t i = 0; i < st.metrics_history.size(); ++i) {
            const auto& m = st.metrics_history[i];
            h.push_back({{"iteration", i},
                         {"ap", m.average_precision},
                         {"roc_auc", m.roc_auc},
                         {"ap_auc", m.ap_auc_running}});
        }
        std::lock_guard lock(snapshot_mutex);
        history = std::move(h);
        iteration = st.iteration;
        labeled = st.labeled.size();
    }
};

namespace {

json parse_body(const std::string& body) {
    try {
        return json::parse(body.empty() ? std::string("{}") : body);
    } catch (const json::exception& e) {
        fail(ErrorCode::parse, std::string("request body is not valid JSON: ") + e.what());
    }
}

json segment_payload(const std::string& session_id, const Pipeline& p, const Query& q) {
    const auto& series = p.data().train.find(q.segment.series_id);
    json points = json::array();
    for (std::size_t i = q.segment.start_index; i <= q.segment.end_index; ++i)
        points.push_back({{"timestamp", series.timestamps[i]},
                          {"value", series.values[i]},
                          {"predicted", q.predicted[i - q.segment.start_index]}});
    return {{"session_id", session_id},
            {"iteration", p.state().iteration + 1},
            {"series_id", q.segment.series_id},
            {"start_index", q.segment.start_index},
            {"end_index", q.segment.end_index},
            {"center_index", q.segment.center_index},
            {"center_timestamp", series.timestamps[q.segment.center_index]},
            {"points", points}};
}

int status_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::not_found: return 404;
        case ErrorCode::conflict:
        case ErrorCode::precondition: return 409;
        default: return 400;
    }
}

std::string error_body(const std::string& code, const std::string& message) {
    return json{{"code", code}, {"message", message}}.dump();
}

std::vector<std::string> split_path(const std::string& path) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (start <= path.size()) {
        const auto slash = path.find('/', start);
        const auto end = slash == std::string::npos ? path.size() : slash;
        if (end > start) parts.push_back(path.substr(start, end - start));
        if (slash == std::string::npos) break;
        start = slash + 1;
    }
    return parts;
}

std::optional<std::int64_t> query_int(const std::map<std::string, std::string>& q, const std::string& key) {
    const auto it = q.find(key);
    if (it == q.end() || it->second.empty()) return std::nullopt;
    std::int64_t v = 0;
    const auto& s = it->second;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    require(ec == std::errc() && ptr == s.data() + s.size(), ErrorCode::invalid_argument,
            "query parameter '" + key + "' must be an integer");
    return v;
}

}  // namespace

std::string SessionManager::create(const Dataset& dataset, const LeiadConfig& config, std::uint64_t seed) {
    auto session = std::make_shared<Session>();
    auto data = prepare_data(dataset, config, seed);
    session->pipeline = std::make_unique<Pipeline>(data, config, seed, Strategy::hybrid);
    session->pipeline->warm_up();
    session->summary = {{"train_series", data->train.series.size()},
                        {"test_series", data->test.series.size()},
                        {"train_points", data->train_index.size()},
                        {"test_points", data->test_labels.size()}};
    session->refresh_snapshot();

    std::lock_guard lock(mutex_);
    session->id = "s" + std::to_string(next_id_++);
    sessions_[session->id] = session;
    return session->id;
}

std::string SessionManager::create_from_request(const std::string& json_body) {
    const json body = parse_body(json_body);
    require(body.is_object(), ErrorCode::invalid_argument, "request body must be an object");
    for (const auto& [key, value] : body.items())
        require(key == "dataset_path" || key == "config_path" || key == "config" || key == "seed",
                ErrorCode::invalid_argument, "unknown field '" + key + "'");
    require(body.contains("dataset_path") && body["dataset_path"].is_string(), ErrorCode::invalid_argument,
            "dataset_path (string) is required");
    require(!(body.contains("config_path") && body.contains("config")), ErrorCode::invalid_argument,
            "give either config_path or config, not both");
    LeiadConfig config;
    if (body.contains("config_path")) config = load_config(body["config_path"].get<std::string>());
    if (body.contains("config")) config = parse_config(body["config"].dump());
    std::uint64_t seed = 7;
    if (body.contains("seed")) {
        require(body["seed"].is_number_unsigned(), ErrorCode::invalid_argument, "seed must be a non-negative integer");
        seed = body["seed"].get<std::uint64_t>();
    }
    const Dataset dataset = load_dataset(body["dataset_path"].get<std::string>());
    return create(dataset, config, seed);
}

std::shared_ptr<SessionManager::Session> SessionManager::find(const std::string& id) const {
    std::lock_guard lock(mutex_);
    const auto it = sessions_.find(id);
    require(it != sessions_.end(), ErrorCode::not_found, "unknown session '" + id + "'");
    return it->second;
}

std::size_t SessionManager::size() const {
    std::lock_guard lock(mutex_);
    return sessions_.size();
}

Phase SessionManager::phase(const std::string& id) const { return find(id)->phase.load(); }

std::string SessionManager::describe(const std::string& id) const {
    const auto s = find(id);
    std::lock_guard lock(s->snapshot_mutex);
    return json{{"session_id", s->id},
                {"phase", to_string(s->phase.load())},
                {"iteration", s->iteration},
                {"labeled_points", s->labeled},
                {"dataset", s->summary}}
        .dump();
}

std::string SessionManager::segment(const std::string& id) {
    const auto s = find(id);
    std::lock_guard lock(s->writer);
    if (s->phase.load() == Phase::idle) {
        const auto& p = *s->pipeline;
        require(p.state().labeled.size() < p.data().train_index.size(), ErrorCode::precondition,
                "every training point is labeled; the session is finished");
        s->pending = p.next_query();
        s->phase = Phase::awaiting_annotation;
    }
    return segment_payload(s->id, *s->pipeline, *s->pending).dump();
}

std::string SessionManager::submit(const std::string& id, const std::string& json_body) {
    const auto s = find(id);
    const json body = parse_body(json_body);
    std::lock_guard lock(s->writer);
    require(s->phase.load() == Phase::awaiting_annotation && s->pending.has_value(), ErrorCode::conflict,
            "no segment is awaiting annotation (already submitted?)");
    require(body.is_object(), ErrorCode::invalid_argument, "request body must be an object");
    for (const auto& [key, value] : body.items())
        require(key == "corrections", ErrorCode::invalid_argument, "unknown field '" + key + "'");
    const json corrections = body.value("corrections", json::array());
    require(corrections.is_array(), ErrorCode::invalid_argument, "corrections must be an array");

    const Query& q = *s->pending;
    const auto& series = s->pipeline->data().train.find(q.segment.series_id);
    std::vector<int> labels = q.predicted;
    std::vector<LabelSource> sources(labels.size(), LabelSource::inferred);
    std::set<std::int64_t> seen;
    for (const auto& c : corrections) {
        require(c.is_object() && c.contains("timestamp") && c.contains("label") && c["timestamp"].is_number_integer() &&
                    c["label"].is_number_integer(),
                ErrorCode::invalid_argument, "each correction needs integer 'timestamp' and 'label'");
        const auto ts = c["timestamp"].get<std::int64_t>();
        const auto label = c["label"].get<int>();
        require(label == 0 || label == 1, ErrorCode::invalid_argument, "correction labels must be 0 or 1");
        require(seen.insert(ts).second, ErrorCode::invalid_argument,
                "timestamp " + std::to_string(ts) + " is corrected twice");
        const auto first = series.timestamps.begin() + static_cast<long>(q.segment.start_index);
        const auto last = series.timestamps.begin() + static_cast<long>(q.segment.end_index) + 1;
        const auto it = std::lower_bound(first, last, ts);
        require(it != last && *it == ts, ErrorCode::out_of_range,
                "timestamp " + std::to_string(ts) + " is outside the pending segment");
        const auto k = static_cast<std::size_t>(it - first);
        labels[k] = label;
        sources[k] = LabelSource::ground_truth;
    }

    s->phase = Phase::training;
    try {
        s->pipeline->apply_annotation(q, labels, sources);
    } catch (...) {
        s->phase = Phase::awaiting_annotation;
        throw;
    }
    s->pending.reset();
    s->refresh_snapshot();
    s->phase = Phase::idle;

    const auto& st = s->pipeline->state();
    const auto& m = st.metrics_history.back();
    return json{{"session_id", s->id},
                {"iteration", st.iteration},
                {"labeled_points", st.labeled.size()},
                {"lf_count", st.votes.cols()},
                {"metrics", {{"ap", m.average_precision}, {"roc_auc", m.roc_auc}, {"ap_auc", m.ap_auc_running}}}}
        .dump();
}

std::string SessionManager::metrics(const std::string& id) const {
    const auto s = find(id);
    std::lock_guard lock(s->snapshot_mutex);
    return json{{"session_id", s->id}, {"phase", to_string(s->phase.load())}, {"history", s->history}}.dump();
}

std::string SessionManager::series_slice(const std::string& id, const std::string& series_id,
                                         std::optional<std::int64_t> from, std::optional<std::int64_t> to) const {
    const auto s = find(id);
    // Train data never changes after creation, so no lock is needed here.
    const auto& train = s->pipeline->data().train;
    const auto idx = train.index_of(series_id);
    require(idx.has_value(), ErrorCode::not_found, "unknown series '" + series_id + "'");
    require(!(from && to && *from > *to), ErrorCode::invalid_argument, "'from' is after 'to'");
    const auto& series = train.series[*idx];
    json ts = json::array(), values = json::array();
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (from && series.timestamps[i] < *from) continue;
        if (to && series.timestamps[i] > *to) break;
        ts.push_back(series.timestamps[i]);
        values.push_back(series.values[i]);
    }
    return json{{"series_id", series_id}, {"timestamps", ts}, {"values", values}}.dump();
}

ApiResponse SessionManager::dispatch(const ApiRequest& request) {
    try {
        const auto parts = split_path(request.path);
        const bool get = request.method == "GET", post = request.method == "POST";
        if (parts.size() == 1 && parts[0] == "sessions" && post)
            return {201, json{{"session_id", create_from_request(request.body)}}.dump()};
        if (parts.size() >= 2 && parts[0] == "sessions") {
            const auto& id = parts[1];
            if (parts.size() == 2 && get) return {200, describe(id)};
            if (parts.size() == 3 && parts[2] == "segment" && get) return {200, segment(id)};
            if (parts.size() == 3 && parts[2] == "annotations" && post) return {200, submit(id, request.body)};
            if (parts.size() == 3 && parts[2] == "metrics" && get) return {200, metrics(id)};
            if (parts.size() == 4 && parts[2] == "series" && get)
                return {200, series_slice(id, parts[3], query_int(request.query, "from"),
                                          query_int(request.query, "to"))};
        }
        return {404, error_body("not_found", "no route for " + request.method + " " + request.path)};
    } catch (const Error& e) {
        return {status_for(e.code()), error_body(leiad::to_string(e.code()), e.what())};
    } catch (const std::exception& e) {
        return {500, error_body("internal", e.what())};
    }
}

}  // namespace leiad::service
