#include "ppe/detector/remote_backend.hpp"

#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "ppe/core/geometry.hpp"
#include "ppe/detector/detection_json.hpp"
#include "ppe/util/base64.hpp"

namespace ppe {

std::string to_string(RemoteFailure f) {
    switch (f) {
        case RemoteFailure::Timeout: return "timeout";
        case RemoteFailure::Connection: return "connection";
        case RemoteFailure::HttpStatus: return "http_status";
        case RemoteFailure::Schema: return "schema";
    }
    return "unknown";
}

std::vector<Detection> parse_remote_response(const std::string& body) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
        throw RemoteDetectError(RemoteFailure::Schema, std::string("response is not JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("detections") || !j["detections"].is_array())
        throw RemoteDetectError(RemoteFailure::Schema, "response lacks a 'detections' array");
    std::vector<Detection> out;
    try {
        for (const auto& d : j["detections"]) out.push_back(detection_from_json(d));
    } catch (const ParseError& e) {
        throw RemoteDetectError(RemoteFailure::Schema, e.what());
    }
    return out;
}

std::string remote_request_body(const Frame& frame) {
    nlohmann::ordered_json j;
    j["frame"] = frame.index();
    j["width"] = frame.width();
    j["height"] = frame.height();
    j["pixels_b64"] = base64_encode(frame.pixels());
    return j.dump();
}

RemoteBackend::RemoteBackend(RemoteBackendConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.endpoint.empty()) throw ConfigError("remote backend needs an endpoint");
    if (cfg_.timeout_ms <= 0) throw ConfigError("remote timeout_ms must be positive");
    if (cfg_.max_inflight < 1) throw ConfigError("remote max_inflight must be >= 1");
    if (cfg_.retries < 0) throw ConfigError("remote retries must be >= 0");
}

std::vector<Detection> RemoteBackend::remote_detect(const Frame& frame) const {
    httplib::Client client(cfg_.endpoint);
    const auto timeout = std::chrono::milliseconds(cfg_.timeout_ms);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);

    const auto started = std::chrono::steady_clock::now();
    ++requests_;
    auto res = client.Post("/detect", remote_request_body(frame), "application/json");
    const auto us = std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() - started);
    latency_us_ += static_cast<std::uint64_t>(us.count());
    last_latency_us_ = static_cast<std::uint64_t>(us.count());

    if (!res) {
        ++failures_;
        const auto err = res.error();
        const auto cause = err == httplib::Error::Read || err == httplib::Error::Write ||
                                   err == httplib::Error::ConnectionTimeout
                               ? RemoteFailure::Timeout
                               : RemoteFailure::Connection;
        throw RemoteDetectError(cause, "remote detect frame " + std::to_string(frame.index()) + ": " +
                                           httplib::to_string(err));
    }
    if (res->status != 200) {
        ++failures_;
        throw RemoteDetectError(RemoteFailure::HttpStatus,
                                "remote detect frame " + std::to_string(frame.index()) + ": HTTP " +
                                    std::to_string(res->status),
                                res->status);
    }
    std::vector<Detection> out;
    try {
        out = parse_remote_response(res->body);
    } catch (const RemoteDetectError&) {
        ++failures_;
        throw;
    }
    for (auto& d : out) d.bbox = clip(d.bbox, frame.width(), frame.height());
    std::erase_if(out, [](const Detection& d) { return d.bbox.area() <= 0.0; });
    return out;
}

std::vector<Detection> RemoteBackend::detect(const Frame& frame) {
    for (int attempt = 0;; ++attempt) {
        try {
            return remote_detect(frame);
        } catch (const RemoteDetectError&) {
            if (attempt >= cfg_.retries) throw;
            ++retries_;
            std::this_thread::sleep_for(std::chrono::milliseconds(cfg_.backoff_base_ms << attempt));
        }
    }
}

RemoteStats RemoteBackend::stats() const {
    return {requests_.load(), failures_.load(), retries_.load(), latency_us_.load()};
}

}  // namespace ppe
