#include "ppe/alerting/buffered_publisher.hpp"

namespace ppe {

BufferedPublisher::BufferedPublisher(std::unique_ptr<MessageTransport> transport, PublisherOptions options)
    : transport_(std::move(transport)), options_(options) {
    if (!transport_) throw ConfigError("publisher needs a transport");
    if (options_.capacity == 0) throw ConfigError("alert buffer capacity must be positive");
    worker_ = std::jthread([this](std::stop_token st) { deliver_loop(st); });
}

BufferedPublisher::~BufferedPublisher() {
    worker_.request_stop();
    work_cv_.notify_all();
    if (worker_.joinable()) worker_.join();
    try {
        if (transport_->connected()) transport_->disconnect();
    } catch (...) {
    }
}

void BufferedPublisher::publish(const AlertEvent& event) {
    {
        std::lock_guard lock(mu_);
        if (queue_.size() >= options_.capacity) {
            queue_.pop_front();
            ++dropped_;
        }
        queue_.push_back({next_seq_++, alert_topic(event), alert_payload(event)});
        ++published_;
    }
    work_cv_.notify_one();
}

bool BufferedPublisher::flush(std::chrono::milliseconds timeout) {
    std::unique_lock lock(mu_);
    return drained_cv_.wait_for(lock, timeout, [&] { return queue_.empty(); });
}

SinkStats BufferedPublisher::stats() const {
    std::lock_guard lock(mu_);
    return {published_, delivered_, dropped_, static_cast<std::uint64_t>(queue_.size())};
}

void BufferedPublisher::deliver_loop(std::stop_token stop) {
    auto backoff = [&] {
        std::unique_lock lock(mu_);
        work_cv_.wait_for(lock, stop, options_.reconnect_backoff, [] { return false; });
    };

    while (!stop.stop_requested()) {
        Item item;
        {
            std::unique_lock lock(mu_);
            if (!work_cv_.wait_for(lock, stop, std::chrono::seconds(1), [&] { return !queue_.empty(); })) {
                lock.unlock();
                if (stop.stop_requested()) break;
                try {
                    if (transport_->connected()) transport_->keepalive();
                } catch (const std::exception&) {
                    transport_->disconnect();
                }
                continue;
            }
            item = queue_.front();
        }

        try {
            if (!transport_->connected()) transport_->connect();
            transport_->publish(item.topic, item.payload);
        } catch (const std::exception&) {
            try {
                transport_->disconnect();
            } catch (...) {
            }
            backoff();
            continue;
        }

        {
            std::lock_guard lock(mu_);
            ++delivered_;
            // the item may have been evicted by an overflow while in flight
            if (!queue_.empty() && queue_.front().seq == item.seq) queue_.pop_front();
        }
        drained_cv_.notify_all();
    }
}

}  // namespace ppe
