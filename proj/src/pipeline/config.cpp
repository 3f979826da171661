#include "ppe/pipeline/config.hpp"

#include <cstdlib>
#include <fstream>

#include "ppe/core/errors.hpp"
#include "ppe/core/json_io.hpp"

namespace ppe {
namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    return path.is_relative() ? base / path : path;
}

std::optional<std::filesystem::path> optional_path(const nlohmann::json& j, const char* key,
                                                   const std::filesystem::path& base) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return resolve(base, j.at(key).get<std::string>());
}

const nlohmann::json& need(const nlohmann::json& j, const char* key, const char* where) {
    if (!j.is_object() || !j.contains(key)) throw ConfigError(std::string(where) + " needs '" + key + "'");
    return j.at(key);
}

SourceConfig parse_source(const nlohmann::json& j, const std::filesystem::path& base) {
    SourceConfig s;
    const auto kind = need(j, "kind", "source").get<std::string>();
    if (kind == "scenario") s.kind = SourceKind::Scenario;
    else if (kind == "replay_frames") s.kind = SourceKind::ReplayFrames;
    else if (kind == "detections_only") s.kind = SourceKind::DetectionsOnly;
    else throw ConfigError("unknown source kind '" + kind + "'");
    s.path = resolve(base, need(j, "path", "source").get<std::string>());
    s.render = j.value("render", s.render);
    s.width = j.value("width", s.width);
    s.height = j.value("height", s.height);
    s.fps = j.value("fps", s.fps);
    s.start_ms = j.value("start_ms", s.start_ms);
    return s;
}

BackendConfig parse_backend(const nlohmann::json& j, const std::filesystem::path& base) {
    BackendConfig b;
    const auto kind = need(j, "kind", "backend").get<std::string>();
    if (kind == "replay") {
        b.kind = BackendKind::Replay;
        b.replay_path = resolve(base, need(j, "path", "replay backend").get<std::string>());
        b.strict = j.value("strict", false);
    } else if (kind == "synthetic") {
        b.kind = BackendKind::Synthetic;
        if (j.contains("scenario")) b.scenario_path = resolve(base, j.at("scenario").get<std::string>());
    } else if (kind == "remote") {
        b.kind = BackendKind::Remote;
        b.remote.endpoint = need(j, "endpoint", "remote backend").get<std::string>();
        b.remote.timeout_ms = j.value("timeout_ms", b.remote.timeout_ms);
        b.remote.max_inflight = j.value("max_inflight", b.remote.max_inflight);
        b.remote.retries = j.value("retries", b.remote.retries);
        b.remote.backoff_base_ms = j.value("backoff_base_ms", b.remote.backoff_base_ms);
    } else {
        throw ConfigError("unknown backend kind '" + kind + "'");
    }
    return b;
}

PrefilterConfig parse_prefilter(const nlohmann::json& j) {
    PrefilterConfig p;
    if (j.value("enabled", true) == false) return PrefilterConfig::disabled();
    p.brightness_threshold = j.value("brightness_threshold", p.brightness_threshold);
    p.pixel_diff_threshold = j.value("pixel_diff_threshold", p.pixel_diff_threshold);
    p.motion_area_fraction = j.value("motion_area_fraction", p.motion_area_fraction);
    p.brightness_enabled = j.value("brightness_enabled", p.brightness_enabled);
    p.motion_enabled = j.value("motion_enabled", p.motion_enabled);
    return p;
}

TrackerConfig parse_tracker(const nlohmann::json& j) {
    TrackerConfig t;
    t.max_age = j.value("max_age", t.max_age);
    t.n_init = j.value("n_init", t.n_init);
    t.gating_threshold = j.value("gating_threshold", t.gating_threshold);
    t.iou_gate = j.value("iou_gate", t.iou_gate);
    t.appearance_weight = j.value("appearance_weight", t.appearance_weight);
    t.noise.position_weight = j.value("position_weight", t.noise.position_weight);
    t.noise.velocity_weight = j.value("velocity_weight", t.noise.velocity_weight);
    t.noise.process_scale = j.value("process_scale", t.noise.process_scale);
    t.noise.measurement_scale = j.value("measurement_scale", t.noise.measurement_scale);
    return t;
}

AlertingConfig parse_alerting(const nlohmann::json& j) {
    AlertingConfig a;
    const auto kind = need(j, "kind", "alerting").get<std::string>();
    if (kind == "memory") a.kind = SinkKind::Memory;
    else if (kind == "stdout") a.kind = SinkKind::Stdout;
    else if (kind == "mqtt") a.kind = SinkKind::Mqtt;
    else throw ConfigError("unknown alerting kind '" + kind + "'");
    a.mqtt_url = j.value("url", a.mqtt_url);
    a.client_id = j.value("client_id", a.client_id);
    if (j.contains("username")) a.username = j.at("username").get<std::string>();
    if (j.contains("password")) a.password = j.at("password").get<std::string>();
    a.buffer_capacity = j.value("buffer_capacity", a.buffer_capacity);
    a.flush_timeout = std::chrono::milliseconds(j.value("flush_timeout_ms", a.flush_timeout.count()));
    if (const char* v = std::getenv("MQTT_URL"); v && *v) a.mqtt_url = v;
    if (const char* v = std::getenv("MQTT_USER"); v && *v) a.username = v;
    if (const char* v = std::getenv("MQTT_PASS"); v && *v) a.password = v;
    return a;
}

}  // namespace

void PipelineConfig::validate() const {
    prefilter.validate();
    tracker.validate();
    zones.validate();
    if (queue_depth == 0) throw ConfigError("queue_depth must be positive");
    if (source.width <= 0 || source.height <= 0) throw ConfigError("source geometry must be positive");
    if (!(source.fps > 0.0)) throw ConfigError("source fps must be positive");
    if (backend.kind == BackendKind::Synthetic && source.kind != SourceKind::Scenario && backend.scenario_path.empty())
        throw ConfigError("synthetic backend needs a scenario source or a 'scenario' path");
    if (source.kind == SourceKind::DetectionsOnly && backend.kind == BackendKind::Synthetic)
        throw ConfigError("detections_only source needs the replay or remote backend");
    if (backend.kind == BackendKind::Remote) {
        if (backend.remote.endpoint.empty()) throw ConfigError("remote backend needs an endpoint");
        if (backend.remote.timeout_ms <= 0) throw ConfigError("remote timeout_ms must be positive");
        if (backend.remote.max_inflight < 1) throw ConfigError("remote max_inflight must be >= 1");
        if (backend.remote.retries < 0 || backend.remote.backoff_base_ms < 0)
            throw ConfigError("remote retry settings must be non-negative");
    }
    if (alerting.buffer_capacity == 0) throw ConfigError("alerting buffer_capacity must be positive");
}

PipelineConfig parse_pipeline_config(const nlohmann::json& j, const std::filesystem::path& base_dir) {
    PipelineConfig c;
    try {
        if (!j.is_object()) throw ConfigError("pipeline config must be a JSON object");
        c.source = parse_source(need(j, "source", "config"), base_dir);
        if (j.contains("prefilter")) c.prefilter = parse_prefilter(j.at("prefilter"));
        if (j.contains("backend")) {
            c.backend = parse_backend(j.at("backend"), base_dir);
        } else if (c.source.kind == SourceKind::DetectionsOnly) {
            c.backend.kind = BackendKind::Replay;
            c.backend.replay_path = c.source.path;
        } else if (c.source.kind != SourceKind::Scenario) {
            throw ConfigError("config needs a 'backend'");
        }
        if (const auto p = j.value("on_backend_failure", std::string("skip")); p == "skip") {
            c.on_backend_failure = FailurePolicy::Skip;
        } else if (p == "halt") {
            c.on_backend_failure = FailurePolicy::Halt;
        } else {
            throw ConfigError("on_backend_failure must be 'skip' or 'halt'");
        }
        if (j.contains("tracker")) c.tracker = parse_tracker(j.at("tracker"));
        const auto& zones = need(j, "zones", "config");
        c.zones = zones.is_string() ? load_zone_config(resolve(base_dir, zones.get<std::string>()))
                                    : zones.get<ZoneConfig>();
        c.alerting = j.contains("alerting") ? parse_alerting(j.at("alerting")) : parse_alerting({{"kind", "memory"}});
        if (j.contains("outputs")) {
            const auto& o = j.at("outputs");
            c.outputs.counts_csv = optional_path(o, "counts_csv", base_dir);
            c.outputs.paper_csv = optional_path(o, "paper_csv", base_dir);
            c.outputs.events_jsonl = optional_path(o, "events_jsonl", base_dir);
            c.outputs.metrics_json = optional_path(o, "metrics_json", base_dir);
            c.outputs.detections_jsonl = optional_path(o, "detections_jsonl", base_dir);
        }
        if (j.contains("day")) {
            const auto& d = j.at("day");
            if (d.contains("start_ms")) c.day.start_ms = d.at("start_ms").get<std::int64_t>();
            c.day.utc_offset_minutes = d.value("utc_offset_minutes", 0);
        }
        c.queue_depth = j.value("queue_depth", c.queue_depth);
        if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("pipeline config: ") + e.what());
    }
    c.validate();
    return c;
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    return parse_pipeline_config(j, path.parent_path());
}

}  // namespace ppe
