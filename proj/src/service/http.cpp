#include "httplib.h"
#include "leiad/error.hpp"
#include "leiad/service.hpp"

namespace leiad::service {

struct Server::Impl {
    SessionManager& manager;
    httplib::Server http;
    std::thread worker;

    explicit Impl(SessionManager& m) : manager(m) {
        auto handler = [this](const httplib::Request& req, httplib::Response& res) {
            ApiRequest api{req.method, req.path, {}, req.body};
            for (const auto& [key, value] : req.params) api.query[key] = value;
            const ApiResponse out = manager.dispatch(api);
            res.status = out.status;
            res.set_content(out.body, "application/json");
        };
        http.Get(".*", handler);
        http.Post(".*", handler);
    }
};

Server::Server(SessionManager& manager) : impl_(std::make_unique<Impl>(manager)) {}

Server::~Server() { stop(); }

int Server::start(const std::string& host, int port) {
    int bound = port;
    if (port == 0) {
        bound = impl_->http.bind_to_any_port(host);
    } else if (!impl_->http.bind_to_port(host, port)) {
        bound = -1;
    }
    require(bound > 0, ErrorCode::io, "cannot bind " + host + ":" + std::to_string(port));
    impl_->worker = std::thread([this] { impl_->http.listen_after_bind(); });
    impl_->http.wait_until_ready();
    return bound;
}

bool Server::listen(const std::string& host, int port) { return impl_->http.listen(host, port); }

void Server::stop() {
    if (impl_->http.is_running()) impl_->http.stop();
    if (impl_->worker.joinable()) impl_->worker.join();
}

}  // namespace leiad::service
