#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <string>

#include <json.hpp>

namespace ppe {

/// Latency histogram in microseconds with power-of-two buckets:
/// bucket k holds samples in [2^(k-1), 2^k), bucket 0 holds 0.
class LatencyHistogram {
public:
    static constexpr std::size_t kBuckets = 32;

    void record(std::uint64_t us) noexcept;
    void record(std::chrono::nanoseconds d) noexcept;
    void merge(const LatencyHistogram& other) noexcept;

    std::uint64_t count() const noexcept { return count_; }
    std::uint64_t sum_us() const noexcept { return sum_; }
    std::uint64_t max_us() const noexcept { return max_; }
    std::uint64_t min_us() const noexcept { return count_ ? min_ : 0; }
    double mean_us() const noexcept { return count_ ? static_cast<double>(sum_) / static_cast<double>(count_) : 0.0; }
    /// Upper bound of the bucket holding the q-quantile.
    std::uint64_t quantile_upper_us(double q) const noexcept;
    const std::array<std::uint64_t, kBuckets>& buckets() const noexcept { return buckets_; }

    nlohmann::ordered_json to_json() const;

private:
    std::array<std::uint64_t, kBuckets> buckets_{};
    std::uint64_t count_ = 0;
    std::uint64_t sum_ = 0;
    std::uint64_t min_ = UINT64_MAX;
    std::uint64_t max_ = 0;
};

struct PipelineMetrics {
    std::uint64_t frames_examined = 0;
    std::uint64_t frames_passed = 0;
    std::uint64_t frames_discarded = 0;
    std::uint64_t frames_discarded_brightness = 0;
    std::uint64_t frames_discarded_motion = 0;
    std::uint64_t frames_backend_skipped = 0;  ///< detection failed after retries
    std::uint64_t detections_total = 0;
    std::uint64_t tracks_confirmed = 0;
    std::uint64_t events_in = 0;   ///< helmeted crossings, as in the counts CSV
    std::uint64_t events_out = 0;
    std::uint64_t crossings_unhelmeted = 0;
    std::uint64_t events_out_of_range = 0;  ///< crossings outside the reporting day
    std::uint64_t alerts_published = 0;
    std::uint64_t alerts_delivered = 0;
    std::uint64_t alerts_dropped = 0;
    std::uint64_t remote_requests = 0;
    std::uint64_t remote_failures = 0;
    std::uint64_t remote_retries = 0;
    LatencyHistogram prefilter, detect, track, count;
    double wall_seconds = 0.0;

    nlohmann::ordered_json to_json() const;
};

}  // namespace ppe
