#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include "ppe/core/errors.hpp"
#include "ppe/detector/backend.hpp"

namespace ppe {

enum class RemoteFailure { Timeout, Connection, HttpStatus, Schema };

std::string to_string(RemoteFailure f);

/// Raised when the remote service could not produce detections for a frame.
class RemoteDetectError : public BackendUnavailable {
public:
    RemoteDetectError(RemoteFailure cause, const std::string& what, int status = 0)
        : BackendUnavailable(what), cause_(cause), status_(status) {}

    RemoteFailure cause() const noexcept { return cause_; }
    int status() const noexcept { return status_; }

private:
    RemoteFailure cause_;
    int status_;
};

struct RemoteBackendConfig {
    std::string endpoint;  ///< base URL, e.g. http://127.0.0.1:8080
    int timeout_ms = 2000;
    int max_inflight = 4;
    int retries = 2;         ///< extra attempts after the first failure
    int backoff_base_ms = 100;  ///< delay before retry k is base * 2^k
};

/// Parses {"detections":[...]} into detections. Throws RemoteDetectError(Schema).
std::vector<Detection> parse_remote_response(const std::string& body);

/// JSON request body: {"frame","width","height","pixels_b64"}.
std::string remote_request_body(const Frame& frame);

struct RemoteStats {
    std::uint64_t requests = 0;
    std::uint64_t failures = 0;
    std::uint64_t retries = 0;
    std::uint64_t total_latency_us = 0;
};

/// Client of the remote detection service (edge-cloud deployment).
///
/// detect() is thread-safe; each call opens its own connection. Failures are
/// retried with exponential backoff; exhausted retries raise RemoteDetectError.
class RemoteBackend final : public DetectorBackend {
public:
    explicit RemoteBackend(RemoteBackendConfig cfg);

    BackendCapabilities capabilities() const override { return {"remote", true}; }
    std::vector<Detection> detect(const Frame& frame) override;

    /// Single attempt without retries.
    std::vector<Detection> remote_detect(const Frame& frame) const;

    const RemoteBackendConfig& config() const noexcept { return cfg_; }
    RemoteStats stats() const;
    std::chrono::microseconds last_latency() const { return std::chrono::microseconds(last_latency_us_.load()); }

private:
    RemoteBackendConfig cfg_;
    mutable std::atomic<std::uint64_t> requests_{0}, failures_{0}, retries_{0}, latency_us_{0},
        last_latency_us_{0};
};

}  // namespace ppe
