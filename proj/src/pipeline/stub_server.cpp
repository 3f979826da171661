#include "ppe/pipeline/stub_server.hpp"

#include <httplib.h>

#include "ppe/core/errors.hpp"

namespace ppe {

StubDetectorServer::StubDetectorServer(ReplayLog log, StubOptions options)
    : log_(std::move(log)), options_(std::move(options)), server_(std::make_unique<httplib::Server>()),
      rng_(options_.seed) {
    if (options_.fail_rate < 0.0 || options_.fail_rate > 1.0) throw ConfigError("fail rate must be within [0, 1]");
    if (options_.latency.count() < 0) throw ConfigError("latency must be non-negative");

    server_->Post("/detect", [this](const httplib::Request& req, httplib::Response& res) {
        ++requests_;
        if (options_.latency.count() > 0) std::this_thread::sleep_for(options_.latency);
        if (draw_failure()) {
            ++injected_;
            res.status = 503;
            res.set_content(R"({"error":"injected failure"})", "application/json");
            return;
        }
        std::int64_t frame = 0;
        try {
            frame = nlohmann::json::parse(req.body).at("frame").get<std::int64_t>();
        } catch (const nlohmann::json::exception& e) {
            res.status = 400;
            res.set_content(nlohmann::json{{"error", e.what()}}.dump(), "application/json");
            return;
        }
        std::vector<Detection> dets;
        if (const auto it = log_.frames.find(frame); it != log_.frames.end()) dets = it->second.detections;
        nlohmann::ordered_json body;
        body["frame"] = frame;
        body["detections"] = detections_to_json(dets);
        res.set_content(body.dump(), "application/json");
    });
    // httplib defaults to SO_REUSEPORT, which would let a second server share a busy port.
    server_->set_socket_options([](socket_t sock) {
        int yes = 1;
        ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const char*>(&yes), sizeof yes);
    });
    server_->Get("/health", [](const httplib::Request&, httplib::Response& res) {
        res.set_content(R"({"status":"ok"})", "application/json");
    });
}

StubDetectorServer::~StubDetectorServer() { stop(); }

bool StubDetectorServer::draw_failure() {
    if (options_.fail_rate <= 0.0) return false;
    if (options_.fail_rate >= 1.0) return true;
    std::lock_guard lock(rng_mu_);
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < options_.fail_rate;
}

void StubDetectorServer::bind() {
    if (options_.port == 0) {
        port_ = server_->bind_to_any_port(options_.host);
        if (port_ <= 0) throw BindError("cannot bind stub detector on " + options_.host);
    } else {
        if (!server_->bind_to_port(options_.host, options_.port))
            throw BindError("cannot bind stub detector on " + options_.host + ":" + std::to_string(options_.port));
        port_ = options_.port;
    }
}

void StubDetectorServer::start() {
    bind();
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
}

void StubDetectorServer::serve_forever() {
    bind();
    server_->listen_after_bind();
}

void StubDetectorServer::stop() {
    if (server_) server_->stop();
    if (thread_.joinable()) thread_.join();
}

std::string StubDetectorServer::endpoint() const { return "http://" + options_.host + ":" + std::to_string(port_); }

}  // namespace ppe
