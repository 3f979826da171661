#include "ppe/pipeline/pipeline.hpp"

#include <atomic>
#include <deque>
#include <exception>
#include <fstream>
#include <future>
#include <iostream>
#include <mutex>
#include <thread>

#include "ppe/alerting/buffered_publisher.hpp"
#include "ppe/alerting/mqtt_client.hpp"
#include "ppe/core/errors.hpp"
#include "ppe/detector/detection_json.hpp"
#include "ppe/detector/replay_backend.hpp"
#include "ppe/detector/synthetic_backend.hpp"
#include "ppe/pipeline/bounded_queue.hpp"
#include "ppe/pipeline/frame_source.hpp"
#include "ppe/prefilter/prefilter.hpp"
#include "ppe/tracker/tracker.hpp"
#include "ppe/util/seed.hpp"

namespace ppe {
namespace {

using Clock = std::chrono::steady_clock;

struct DetectedFrame {
    std::int64_t index = 0;
    std::int64_t timestamp_ms = 0;
    std::vector<Detection> detections;
    bool skipped = false;
};

// First exception wins; every queue is aborted so blocked stages unwind.
class FailureLatch {
public:
    template <typename... Queues>
    void fail(std::exception_ptr e, Queues&... qs) {
        {
            std::lock_guard lock(mu_);
            if (!error_) error_ = e;
        }
        (qs.abort(), ...);
    }
    void rethrow() const {
        if (error_) std::rethrow_exception(error_);
    }
    bool failed() const {
        std::lock_guard lock(mu_);
        return error_ != nullptr;
    }

private:
    mutable std::mutex mu_;
    std::exception_ptr error_;
};

std::shared_ptr<const Scenario> load_scenario(const std::filesystem::path& path, const PipelineConfig& cfg) {
    auto sc = load_scenario_config(path);
    if (cfg.seed) sc.seed = derive_seed(*cfg.seed, "scenario");
    sc.validate();
    return std::make_shared<const Scenario>(std::move(sc), cfg.zones);
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed for " + path.string());
}

std::shared_ptr<AlertSink> make_sink(const PipelineConfig& cfg, const RunOptions& opt) {
    if (opt.sink) return opt.sink;
    switch (cfg.alerting.kind) {
        case SinkKind::Memory:
            return std::make_shared<InMemorySink>();
        case SinkKind::Stdout:
            return std::make_shared<StdoutSink>(opt.alert_stream ? *opt.alert_stream : std::cout);
        case SinkKind::Mqtt: {
            MqttOptions mo;
            mo.url = cfg.alerting.mqtt_url;
            mo.client_id = cfg.alerting.client_id;
            mo.username = cfg.alerting.username;
            mo.password = cfg.alerting.password;
            PublisherOptions po;
            po.capacity = cfg.alerting.buffer_capacity;
            return std::make_shared<BufferedPublisher>(std::make_unique<MqttTransport>(mo), po);
        }
    }
    throw ConfigError("unknown alert sink");
}

}  // namespace

std::string count_event_line(const CountEvent& e) {
    nlohmann::ordered_json j;
    j["type"] = "count";
    j["frame"] = e.frame;
    j["ts_ms"] = e.timestamp_ms;
    j["track_id"] = e.track_id;
    j["direction"] = to_string(e.direction);
    j["helmeted"] = e.helmeted;
    return j.dump();
}

std::string alert_event_line(const AlertEvent& e) {
    nlohmann::ordered_json j;
    j["type"] = "alert";
    j["topic"] = alert_topic(e);
    const auto body = alert_to_json(e);
    for (const char* key : {"kind", "camera_id", "ts_ms", "track_id", "bbox"}) j[key] = body.at(key);
    return j.dump();
}

PipelineResult run_pipeline(const PipelineConfig& cfg, const RunOptions& opt) {
    cfg.validate();
    const auto wall_start = Clock::now();

    // Source.
    std::shared_ptr<const Scenario> scenario;
    std::unique_ptr<FrameSource> source;
    std::shared_ptr<const ReplayLog> replay_log;
    switch (cfg.source.kind) {
        case SourceKind::Scenario:
            scenario = load_scenario(cfg.source.path, cfg);
            source = std::make_unique<ScenarioSource>(scenario, cfg.source.render);
            break;
        case SourceKind::ReplayFrames:
            source = std::make_unique<ManifestSource>(cfg.source.path);
            break;
        case SourceKind::DetectionsOnly:
            replay_log = std::make_shared<const ReplayLog>(load_replay_log(cfg.source.path));
            source = std::make_unique<DetectionLogSource>(
                replay_log, StreamGeometry{cfg.source.width, cfg.source.height, cfg.source.fps, cfg.source.start_ms});
            break;
    }

    // Backend.
    std::unique_ptr<DetectorBackend> backend;
    RemoteBackend* remote = nullptr;
    switch (cfg.backend.kind) {
        case BackendKind::Replay:
            if (replay_log && cfg.backend.replay_path == cfg.source.path)
                backend = std::make_unique<ReplayBackend>(*replay_log, cfg.backend.strict);
            else
                backend = std::make_unique<ReplayBackend>(load_replay_log(cfg.backend.replay_path), cfg.backend.strict);
            break;
        case BackendKind::Synthetic:
            if (!cfg.backend.scenario_path.empty() && cfg.backend.scenario_path != cfg.source.path)
                backend = std::make_unique<SyntheticBackend>(load_scenario(cfg.backend.scenario_path, cfg));
            else
                backend = std::make_unique<SyntheticBackend>(scenario);
            break;
        case BackendKind::Remote: {
            auto r = std::make_unique<RemoteBackend>(cfg.backend.remote);
            remote = r.get();
            backend = std::move(r);
            break;
        }
    }

    auto sink = make_sink(cfg, opt);

    BoundedQueue<Frame> q_source(cfg.queue_depth);
    BoundedQueue<Frame> q_passed(cfg.queue_depth);
    BoundedQueue<DetectedFrame> q_detected(cfg.queue_depth);
    FailureLatch latch;
    auto abort_all = [&](std::exception_ptr e) { latch.fail(e, q_source, q_passed, q_detected); };

    PipelineMetrics metrics;
    LatencyHistogram prefilter_hist, detect_hist;
    PrefilterMetrics pf_metrics;
    std::uint64_t backend_skipped = 0;
    std::atomic<std::int64_t> first_ts{INT64_MIN};

    std::jthread source_thread([&] {
        try {
            while (auto f = source->next()) {
                if (first_ts.load() == INT64_MIN) first_ts = f->timestamp_ms();
                if (!q_source.push(std::move(*f))) return;
            }
            q_source.close();
        } catch (...) {
            abort_all(std::current_exception());
        }
    });

    std::jthread prefilter_thread([&] {
        try {
            Prefilter pf(cfg.prefilter);
            while (auto f = q_source.pop()) {
                const auto t0 = Clock::now();
                const auto verdict = pf.examine(*f);
                prefilter_hist.record(Clock::now() - t0);
                if (verdict == PrefilterVerdict::Passed && !q_passed.push(std::move(*f))) return;
            }
            pf_metrics = pf.metrics();
            q_passed.close();
        } catch (...) {
            abort_all(std::current_exception());
        }
    });

    std::jthread detect_thread([&] {
        auto finish = [&](const Frame& frame, std::vector<Detection> dets, bool skipped) {
            return q_detected.push(DetectedFrame{frame.index(), frame.timestamp_ms(), std::move(dets), skipped});
        };
        auto on_failure = [&](const BackendUnavailable&) {
            if (cfg.on_backend_failure == FailurePolicy::Halt) throw;
            ++backend_skipped;
        };
        try {
            if (!remote) {
                while (auto f = q_passed.pop()) {
                    const auto t0 = Clock::now();
                    auto dets = backend->detect(*f);
                    detect_hist.record(Clock::now() - t0);
                    if (!finish(*f, std::move(dets), false)) return;
                }
            } else {
                // Up to max_inflight requests run concurrently; results leave in submission order.
                struct InFlight {
                    Frame frame;
                    Clock::time_point started;
                    std::future<std::vector<Detection>> result;
                };
                std::deque<InFlight> window;
                auto drain_one = [&]() -> bool {
                    auto item = std::move(window.front());
                    window.pop_front();
                    std::vector<Detection> dets;
                    bool skipped = false;
                    try {
                        dets = item.result.get();
                    } catch (const BackendUnavailable& e) {
                        on_failure(e);
                        skipped = true;
                    }
                    detect_hist.record(Clock::now() - item.started);
                    return finish(item.frame, std::move(dets), skipped);
                };
                while (auto f = q_passed.pop()) {
                    if (window.size() >= static_cast<std::size_t>(cfg.backend.remote.max_inflight) && !drain_one())
                        return;
                    Frame frame = std::move(*f);
                    auto fut = std::async(std::launch::async, [remote, frame] { return remote->detect(frame); });
                    window.push_back({std::move(frame), Clock::now(), std::move(fut)});
                }
                while (!window.empty())
                    if (!drain_one()) return;
            }
            q_detected.close();
        } catch (...) {
            abort_all(std::current_exception());
        }
    });

    // Tracker, counter and alert routing run on this thread, strictly in order.
    PipelineResult result;
    std::string events;
    std::string detections_log;
    try {
        Tracker tracker(cfg.tracker);
        LineCounter counter(cfg.zones);
        std::int64_t last_index = INT64_MIN;
        while (auto item = q_detected.pop()) {
            if (item->index <= last_index) throw NonMonotonicFrame("pipeline reordered frames");
            last_index = item->index;
            if (item->skipped) continue;
            metrics.detections_total += item->detections.size();
            if (cfg.outputs.detections_jsonl)
                detections_log += replay_line(item->index, item->detections, item->timestamp_ms) + "\n";

            const auto t0 = Clock::now();
            const auto confirmed = tracker.step(item->detections, item->index);
            const auto t1 = Clock::now();
            metrics.track.record(t1 - t0);

            for (const auto id : tracker.deleted_ids()) counter.forget(id);
            for (const auto& tr : confirmed) {
                if (!tr.updated || !tr.prev_footpoint) continue;
                const bool helmeted = tr.majority_class() == HeadClass::HelmetedHead;
                for (const auto& ev : counter.observe(tr.track_id, helmeted, *tr.prev_footpoint, tr.last_footpoint,
                                                      item->timestamp_ms, item->index)) {
                    result.crossings.push_back(ev);
                    events += count_event_line(ev) + "\n";
                    AlertEvent alert;
                    alert.kind = !ev.helmeted ? AlertKind::NoHelmet
                                 : ev.direction == CountDirection::In ? AlertKind::CountIn
                                                                      : AlertKind::CountOut;
                    alert.camera_id = cfg.zones.camera_id;
                    alert.timestamp_ms = ev.timestamp_ms;
                    alert.track_id = ev.track_id;
                    alert.bbox = tr.last_bbox;
                    sink->publish(alert);
                    result.alerts.push_back(alert);
                    events += alert_event_line(alert) + "\n";
                }
            }
            metrics.count.record(Clock::now() - t1);
        }
        metrics.tracks_confirmed = static_cast<std::uint64_t>(tracker.confirmed_total());
    } catch (...) {
        abort_all(std::current_exception());
    }
    source_thread.join();
    prefilter_thread.join();
    detect_thread.join();
    latch.rethrow();

    sink->flush(cfg.alerting.flush_timeout);

    // Aggregation.
    const auto first = first_ts.load();
    result.day_start_ms = cfg.day.start_ms ? *cfg.day.start_ms
                          : first == INT64_MIN ? 0
                                               : local_day_start(first, cfg.day.utc_offset_minutes);
    std::vector<CountEvent> helmeted;
    for (const auto& e : result.crossings) {
        if (e.helmeted) helmeted.push_back(e);
        else ++metrics.crossings_unhelmeted;
    }
    const auto agg = hourly_aggregate(helmeted, result.day_start_ms,
                                      result.day_start_ms + HourlyTable::kBuckets * HourlyTable::kHourMs);
    result.table = agg.table;
    metrics.events_out_of_range = agg.out_of_range.size();
    const auto totals = result.table.totals();
    metrics.events_in = static_cast<std::uint64_t>(totals.in);
    metrics.events_out = static_cast<std::uint64_t>(totals.out);

    metrics.frames_examined = pf_metrics.examined;
    metrics.frames_passed = pf_metrics.passed;
    metrics.frames_discarded = pf_metrics.discarded();
    metrics.frames_discarded_brightness = pf_metrics.discarded_brightness;
    metrics.frames_discarded_motion = pf_metrics.discarded_motion;
    metrics.frames_backend_skipped = backend_skipped;
    metrics.prefilter = prefilter_hist;
    metrics.detect = detect_hist;
    const auto ss = sink->stats();
    metrics.alerts_published = ss.published;
    metrics.alerts_delivered = ss.delivered;
    metrics.alerts_dropped = ss.dropped;
    if (remote) {
        const auto rs = remote->stats();
        metrics.remote_requests = rs.requests;
        metrics.remote_failures = rs.failures;
        metrics.remote_retries = rs.retries;
    }
    metrics.wall_seconds = std::chrono::duration<double>(Clock::now() - wall_start).count();

    result.metrics = metrics;
    result.events_jsonl = std::move(events);
    result.counts_csv = to_csv(result.table);
    result.sink = sink;

    if (opt.write_outputs) {
        const auto& o = cfg.outputs;
        if (o.counts_csv) write_file(*o.counts_csv, result.counts_csv);
        if (o.paper_csv) write_file(*o.paper_csv, to_paper_csv(result.table, "AI&ML"));
        if (o.events_jsonl) write_file(*o.events_jsonl, result.events_jsonl);
        if (o.detections_jsonl) write_file(*o.detections_jsonl, detections_log);
        if (o.metrics_json) write_file(*o.metrics_json, metrics.to_json().dump(2) + "\n");
    }
    return result;
}

}  // namespace ppe
