#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <thread>

#include "ppe/detector/detection_json.hpp"

namespace httplib {
class Server;
}

namespace ppe {

struct StubOptions {
    std::string host = "127.0.0.1";
    int port = 0;  ///< 0 picks a free port
    std::chrono::milliseconds latency{0};
    double fail_rate = 0.0;  ///< probability of answering 503
    std::uint64_t seed = 0;
};

/// Local stand-in for the remote detection service. POST /detect answers
/// with the replay log's detections for the requested frame index.
class StubDetectorServer {
public:
    StubDetectorServer(ReplayLog log, StubOptions options);
    ~StubDetectorServer();

    StubDetectorServer(const StubDetectorServer&) = delete;
    StubDetectorServer& operator=(const StubDetectorServer&) = delete;

    /// Binds and serves on a background thread. Throws BindError.
    void start();
    /// Binds and serves on the calling thread until stop().
    void serve_forever();
    void stop();

    int port() const noexcept { return port_; }
    std::string endpoint() const;
    std::uint64_t requests() const noexcept { return requests_.load(); }
    std::uint64_t failures_injected() const noexcept { return injected_.load(); }

private:
    void bind();
    bool draw_failure();

    ReplayLog log_;
    StubOptions options_;
    std::unique_ptr<httplib::Server> server_;
    std::thread thread_;
    int port_ = 0;
    std::mutex rng_mu_;
    std::mt19937_64 rng_;
    std::atomic<std::uint64_t> requests_{0}, injected_{0};
};

}  // namespace ppe
