#pragma once

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <mutex>
#include <string>
#include <vector>

#include "ppe/alerting/alert.hpp"

namespace ppe {

struct SinkStats {
    std::uint64_t published = 0;  ///< accepted by publish()
    std::uint64_t delivered = 0;  ///< acknowledged by the destination
    std::uint64_t dropped = 0;    ///< evicted by buffer overflow
    std::uint64_t buffered = 0;   ///< waiting for delivery
};

/// Destination for alert events.
class AlertSink {
public:
    virtual ~AlertSink() = default;

    virtual void publish(const AlertEvent& event) = 0;
    /// Blocks until buffered events are delivered or the timeout passes.
    /// Returns true when nothing is left buffered.
    virtual bool flush(std::chrono::milliseconds timeout) { (void)timeout; return true; }
    virtual SinkStats stats() const = 0;
};

struct CapturedAlert {
    std::string topic;
    std::string payload;
    AlertEvent event;
};

/// Keeps every published event in order; used by tests and the "memory" sink.
class InMemorySink final : public AlertSink {
public:
    void publish(const AlertEvent& event) override;
    SinkStats stats() const override;

    std::vector<CapturedAlert> captured() const;

private:
    mutable std::mutex mu_;
    std::vector<CapturedAlert> captured_;
};

/// Writes "topic payload" lines.
class StdoutSink final : public AlertSink {
public:
    explicit StdoutSink(std::ostream& out);

    void publish(const AlertEvent& event) override;
    SinkStats stats() const override;

private:
    mutable std::mutex mu_;
    std::ostream& out_;
    std::uint64_t count_ = 0;
};

}  // namespace ppe
