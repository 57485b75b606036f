#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include "leiad/config.hpp"
#include "leiad/pipeline.hpp"

namespace leiad::service {

enum class Phase { idle, awaiting_annotation, training };
const char* to_string(Phase p);

struct ApiRequest {
    std::string method;  // "GET" or "POST"
    std::string path;
    std::map<std::string, std::string> query;
    std::string body;
};

struct ApiResponse {
    int status = 200;
    std::string body;  // JSON
};

/// Interactive sessions, one pipeline each. All endpoint logic lives here;
/// the HTTP server only translates requests. Errors surface as leiad::Error
/// from the typed methods and as {code, message} JSON from dispatch().
class SessionManager {
public:
    SessionManager() = default;
    SessionManager(const SessionManager&) = delete;
    SessionManager& operator=(const SessionManager&) = delete;

    /// Splits, scores, warms up. Returns the new session id.
    std::string create(const Dataset& dataset, const LeiadConfig& config, std::uint64_t seed);

    /// Body of POST /sessions: {"dataset_path", "config_path"?, "config"?, "seed"?}.
    std::string create_from_request(const std::string& json_body);

    std::string describe(const std::string& id) const;
    /// Pending segment; selects one first if the session is idle.
    std::string segment(const std::string& id);
    /// Body: {"corrections": [{"timestamp": t, "label": 0|1}, ...]}.
    std::string submit(const std::string& id, const std::string& json_body);
    std::string metrics(const std::string& id) const;
    std::string series_slice(const std::string& id, const std::string& series_id,
                             std::optional<std::int64_t> from, std::optional<std::int64_t> to) const;

    ApiResponse dispatch(const ApiRequest& request);

    Phase phase(const std::string& id) const;
    std::size_t size() const;

private:
    struct Session;
    std::shared_ptr<Session> find(const std::string& id) const;

    mutable std::mutex mutex_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    std::uint64_t next_id_ = 1;
};

/// HTTP front end over a SessionManager.
class Server {
public:
    explicit Server(SessionManager& manager);
    ~Server();

    /// Binds and serves on a background thread. Port 0 picks a free port;
    /// returns the bound port.
    int start(const std::string& host, int port);
    /// Serves on the calling thread until stop().
    bool listen(const std::string& host, int port);
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace leiad::service
