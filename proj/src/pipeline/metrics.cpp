#include "ppe/pipeline/metrics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace ppe {

void LatencyHistogram::record(std::uint64_t us) noexcept {
    const std::size_t b = std::min<std::size_t>(static_cast<std::size_t>(std::bit_width(us)), kBuckets - 1);
    ++buckets_[b];
    ++count_;
    sum_ += us;
    min_ = std::min(min_, us);
    max_ = std::max(max_, us);
}

void LatencyHistogram::record(std::chrono::nanoseconds d) noexcept {
    record(static_cast<std::uint64_t>(std::max<std::int64_t>(0, d.count() / 1000)));
}

void LatencyHistogram::merge(const LatencyHistogram& other) noexcept {
    for (std::size_t i = 0; i < kBuckets; ++i) buckets_[i] += other.buckets_[i];
    count_ += other.count_;
    sum_ += other.sum_;
    min_ = std::min(min_, other.min_);
    max_ = std::max(max_, other.max_);
}

std::uint64_t LatencyHistogram::quantile_upper_us(double q) const noexcept {
    if (count_ == 0) return 0;
    const auto target = static_cast<std::uint64_t>(std::ceil(std::clamp(q, 0.0, 1.0) * static_cast<double>(count_)));
    std::uint64_t seen = 0;
    for (std::size_t i = 0; i < kBuckets; ++i) {
        seen += buckets_[i];
        if (seen >= std::max<std::uint64_t>(target, 1)) return i == 0 ? 0 : (std::uint64_t{1} << i) - 1;
    }
    return max_;
}

nlohmann::ordered_json LatencyHistogram::to_json() const {
    nlohmann::ordered_json j;
    j["count"] = count_;
    j["sum_us"] = sum_;
    j["min_us"] = min_us();
    j["max_us"] = max_;
    j["mean_us"] = mean_us();
    j["p50_upper_us"] = quantile_upper_us(0.5);
    j["p99_upper_us"] = quantile_upper_us(0.99);
    auto& bs = j["buckets"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < kBuckets; ++i) {
        if (buckets_[i] == 0) continue;
        bs.push_back({{"lt_us", std::uint64_t{1} << i}, {"n", buckets_[i]}});
    }
    return j;
}

nlohmann::ordered_json PipelineMetrics::to_json() const {
    nlohmann::ordered_json j;
    j["frames_examined"] = frames_examined;
    j["frames_passed"] = frames_passed;
    j["frames_discarded"] = frames_discarded;
    j["frames_discarded_brightness"] = frames_discarded_brightness;
    j["frames_discarded_motion"] = frames_discarded_motion;
    j["frames_backend_skipped"] = frames_backend_skipped;
    j["detections_total"] = detections_total;
    j["tracks_confirmed"] = tracks_confirmed;
    j["events_in"] = events_in;
    j["events_out"] = events_out;
    j["crossings_unhelmeted"] = crossings_unhelmeted;
    j["events_out_of_range"] = events_out_of_range;
    j["alerts_published"] = alerts_published;
    j["alerts_delivered"] = alerts_delivered;
    j["alerts_dropped"] = alerts_dropped;
    j["remote_requests"] = remote_requests;
    j["remote_failures"] = remote_failures;
    j["remote_retries"] = remote_retries;
    j["wall_seconds"] = wall_seconds;
    auto& lat = j["latency_us"];
    lat["prefilter"] = prefilter.to_json();
    lat["detect"] = detect.to_json();
    lat["track"] = track.to_json();
    lat["count"] = count.to_json();
    return j;
}

}  // namespace ppe
