#include "ppe/alerting/sinks.hpp"

#include <ostream>

namespace ppe {

void InMemorySink::publish(const AlertEvent& event) {
    std::lock_guard lock(mu_);
    captured_.push_back({alert_topic(event), alert_payload(event), event});
}

SinkStats InMemorySink::stats() const {
    std::lock_guard lock(mu_);
    const auto n = static_cast<std::uint64_t>(captured_.size());
    return {n, n, 0, 0};
}

std::vector<CapturedAlert> InMemorySink::captured() const {
    std::lock_guard lock(mu_);
    return captured_;
}

StdoutSink::StdoutSink(std::ostream& out) : out_(out) {}

void StdoutSink::publish(const AlertEvent& event) {
    std::lock_guard lock(mu_);
    out_ << alert_topic(event) << ' ' << alert_payload(event) << '\n';
    ++count_;
}

SinkStats StdoutSink::stats() const {
    std::lock_guard lock(mu_);
    return {count_, count_, 0, 0};
}

}  // namespace ppe
