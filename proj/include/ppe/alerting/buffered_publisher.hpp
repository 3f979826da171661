#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <stop_token>
#include <string>
#include <thread>

#include "ppe/alerting/sinks.hpp"
#include "ppe/core/errors.hpp"

namespace ppe {

class TransportError : public Error {
public:
    using Error::Error;
};

/// Message broker connection. publish() returns once the broker acknowledged
/// the message (QoS 1) and throws TransportError otherwise.
class MessageTransport {
public:
    virtual ~MessageTransport() = default;

    virtual void connect() = 0;
    virtual bool connected() const = 0;
    virtual void publish(const std::string& topic, const std::string& payload) = 0;
    virtual void disconnect() = 0;
    /// Called periodically while idle.
    virtual void keepalive() {}
};

struct PublisherOptions {
    std::size_t capacity = 10'000;
    std::chrono::milliseconds reconnect_backoff{200};
};

/// Alert sink that queues events in a bounded FIFO and delivers them from a
/// background thread, reconnecting after broker outages.
///
/// Delivery is at-least-once and in publish order. When the buffer is full
/// the oldest event is evicted and counted as dropped.
class BufferedPublisher final : public AlertSink {
public:
    BufferedPublisher(std::unique_ptr<MessageTransport> transport, PublisherOptions options = {});
    ~BufferedPublisher() override;

    BufferedPublisher(const BufferedPublisher&) = delete;
    BufferedPublisher& operator=(const BufferedPublisher&) = delete;

    void publish(const AlertEvent& event) override;
    bool flush(std::chrono::milliseconds timeout) override;
    SinkStats stats() const override;

private:
    struct Item {
        std::uint64_t seq;
        std::string topic;
        std::string payload;
    };

    void deliver_loop(std::stop_token stop);

    std::unique_ptr<MessageTransport> transport_;
    PublisherOptions options_;

    mutable std::mutex mu_;
    std::condition_variable_any work_cv_;
    std::condition_variable_any drained_cv_;
    std::deque<Item> queue_;
    std::uint64_t next_seq_ = 0;
    std::uint64_t published_ = 0;
    std::uint64_t delivered_ = 0;
    std::uint64_t dropped_ = 0;

    std::jthread worker_;
};

}  // namespace ppe
