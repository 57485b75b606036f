#include "httplib.h"
#include "json.hpp"
#include "leiad/service.hpp"
#include "leiad/synthetic.hpp"
#include "support.hpp"

using namespace leiad;
using service::ApiRequest;
using service::SessionManager;
using json = nlohmann::json;

namespace {

LeiadConfig small_config() {
    LeiadConfig c;
    c.dataset.length_of_segment = 60;
    c.dataset.number_of_neighbors = 40;
    c.end_model.num_rounds = 20;
    c.label_model.training_epoch = 30;
    return c;
}

const Dataset& dataset() {
    static const Dataset d = generate_synthetic(SyntheticOptions{6, 1000, 0.01, 21});
    return d;
}

json call(SessionManager& m, std::string method, std::string path, std::string body = "", int expect = 200) {
    const auto r = m.dispatch(ApiRequest{std::move(method), std::move(path), {}, std::move(body)});
    CHECK(r.status == expect);
    return json::parse(r.body);
}

}  // namespace

TEST_CASE("session lifecycle through the API") {
    SessionManager m;
    const auto id = m.create(dataset(), small_config(), 3);
    CHECK(m.size() == 1);
    CHECK(m.phase(id) == service::Phase::idle);

    auto info = call(m, "GET", "/sessions/" + id);
    CHECK(info["phase"] == "idle");
    CHECK(info["iteration"] == 0);
    CHECK(info["dataset"]["train_points"] == 4000);
    CHECK(call(m, "GET", "/sessions/" + id + "/metrics")["history"].size() == 1);

    // Submitting before a segment is served is a conflict.
    call(m, "POST", "/sessions/" + id + "/annotations", R"({"corrections": []})", 409);

    const auto seg = call(m, "GET", "/sessions/" + id + "/segment");
    CHECK(m.phase(id) == service::Phase::awaiting_annotation);
    CHECK(call(m, "GET", "/sessions/" + id + "/segment") == seg);
    CHECK(seg["iteration"] == 1);
    const auto& points = seg["points"];
    REQUIRE(points.size() == seg["end_index"].get<std::size_t>() - seg["start_index"].get<std::size_t>() + 1);
    CHECK(points.size() <= 60);

    // Validation failures leave the session waiting.
    call(m, "POST", "/sessions/" + id + "/annotations", R"({"corrections": [{"timestamp": -5, "label": 1}]})", 400);
    const auto t0 = points[0]["timestamp"].get<std::int64_t>();
    const auto dup = json{{"corrections", {{{"timestamp", t0}, {"label", 1}}, {{"timestamp", t0}, {"label", 0}}}}};
    call(m, "POST", "/sessions/" + id + "/annotations", dup.dump(), 400);
    call(m, "POST", "/sessions/" + id + "/annotations",
         json{{"corrections", {{{"timestamp", t0}, {"label", 2}}}}}.dump(), 400);
    call(m, "POST", "/sessions/" + id + "/annotations", R"({"labels": []})", 400);
    call(m, "POST", "/sessions/" + id + "/annotations", "not json", 400);
    CHECK(m.phase(id) == service::Phase::awaiting_annotation);

    const int flipped = 1 - points[0]["predicted"].get<int>();
    const auto body = json{{"corrections", {{{"timestamp", t0}, {"label", flipped}}}}};
    const auto result = call(m, "POST", "/sessions/" + id + "/annotations", body.dump());
    CHECK(result["iteration"] == 1);
    CHECK(result["labeled_points"] == points.size());
    CHECK(result["lf_count"] == 6);
    CHECK(result["metrics"]["ap"].get<double>() >= 0.0);
    CHECK(m.phase(id) == service::Phase::idle);

    // The same submission again has nothing to attach to.
    call(m, "POST", "/sessions/" + id + "/annotations", body.dump(), 409);

    const auto history = call(m, "GET", "/sessions/" + id + "/metrics")["history"];
    CHECK(history.size() == 2);
    CHECK(history[1]["iteration"] == 1);

    // A second round with every prediction accepted.
    const auto seg2 = call(m, "GET", "/sessions/" + id + "/segment");
    CHECK(seg2["iteration"] == 2);
    const auto r2 = call(m, "POST", "/sessions/" + id + "/annotations", R"({"corrections": []})");
    CHECK(r2["lf_count"] == 7);
    CHECK(r2["labeled_points"].get<std::size_t>() > points.size());
}

TEST_CASE("series slices and lookups") {
    SessionManager m;
    const auto id = m.create(dataset(), small_config(), 3);
    const auto info = call(m, "GET", "/sessions/" + id);
    const auto seg = call(m, "GET", "/sessions/" + id + "/segment");
    const auto sid = seg["series_id"].get<std::string>();

    auto r = m.dispatch(ApiRequest{"GET", "/sessions/" + id + "/series/" + sid, {{"from", "10"}, {"to", "19"}}, ""});
    CHECK(r.status == 200);
    const auto slice = json::parse(r.body);
    CHECK(slice["series_id"] == sid);
    const auto& s = dataset().find(sid);
    std::size_t expected = 0;
    for (auto t : s.timestamps) expected += (t >= 10 && t <= 19);
    CHECK(slice["timestamps"].size() == expected);
    CHECK(slice["values"].size() == expected);

    r = m.dispatch(ApiRequest{"GET", "/sessions/" + id + "/series/" + sid, {{"from", "abc"}}, ""});
    CHECK(r.status == 400);
    CHECK(json::parse(r.body)["code"] == "invalid_argument");

    call(m, "GET", "/sessions/" + id + "/series/nope", "", 404);
    call(m, "GET", "/sessions/s99", "", 404);
    call(m, "GET", "/sessions/s99/segment", "", 404);
    call(m, "GET", "/nowhere", "", 404);
    call(m, "POST", "/sessions/" + id + "/metrics", "", 404);
}

TEST_CASE("session creation from a request body") {
    SessionManager m;
    const auto missing = call(m, "POST", "/sessions", R"({"seed": 1})", 400);
    CHECK(missing.contains("message"));
    call(m, "POST", "/sessions", R"({"dataset_path": "/nonexistent/data.csv"})", 400);
    call(m, "POST", "/sessions", R"({"dataset_path": "x.csv", "extra": 1})", 400);
    call(m, "POST", "/sessions", R"({"dataset_path": "x.csv", "config": {}, "config_path": "c.json"})", 400);
    CHECK(m.size() == 0);
}

TEST_CASE("HTTP round trip") {
    SessionManager m;
    const auto id = m.create(dataset(), small_config(), 3);
    service::Server server(m);
    const int port = server.start("127.0.0.1", 0);
    REQUIRE(port > 0);

    httplib::Client client("127.0.0.1", port);
    auto res = client.Get("/sessions/" + id + "/segment");
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(res->get_header_value("Content-Type") == "application/json");
    const auto seg = json::parse(res->body);

    res = client.Post("/sessions/" + id + "/annotations", R"({"corrections": []})", "application/json");
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(json::parse(res->body)["labeled_points"] == seg["points"].size());

    res = client.Get("/sessions/" + id + "/series/" + seg["series_id"].get<std::string>() + "?from=0&to=4");
    REQUIRE(res);
    CHECK(json::parse(res->body)["timestamps"].size() == 5);

    res = client.Get("/sessions/zzz");
    REQUIRE(res);
    CHECK(res->status == 404);
    server.stop();
}
