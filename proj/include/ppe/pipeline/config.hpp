#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "ppe/core/types.hpp"
#include "ppe/detector/remote_backend.hpp"
#include "ppe/prefilter/prefilter.hpp"
#include "ppe/tracker/tracker.hpp"

namespace ppe {

enum class SourceKind { Scenario, ReplayFrames, DetectionsOnly };
enum class BackendKind { Replay, Synthetic, Remote };
enum class SinkKind { Memory, Stdout, Mqtt };
enum class FailurePolicy { Skip, Halt };

struct SourceConfig {
    SourceKind kind = SourceKind::Scenario;
    std::filesystem::path path;
    bool render = true;  ///< scenario only
    // Geometry of headless detection-log streams.
    int width = 320;
    int height = 240;
    double fps = 10.0;
    std::int64_t start_ms = 1669096800000;
};

struct BackendConfig {
    BackendKind kind = BackendKind::Synthetic;
    std::filesystem::path replay_path;
    bool strict = false;
    std::filesystem::path scenario_path;  ///< synthetic backend on a non-scenario source
    RemoteBackendConfig remote;
};

struct AlertingConfig {
    SinkKind kind = SinkKind::Memory;
    std::string mqtt_url = "mqtt://127.0.0.1:1883";
    std::string client_id = "ppe-pipeline";
    std::optional<std::string> username;
    std::optional<std::string> password;
    std::size_t buffer_capacity = 10'000;
    std::chrono::milliseconds flush_timeout{5000};
};

struct OutputConfig {
    std::optional<std::filesystem::path> counts_csv;
    std::optional<std::filesystem::path> paper_csv;
    std::optional<std::filesystem::path> events_jsonl;
    std::optional<std::filesystem::path> metrics_json;
    std::optional<std::filesystem::path> detections_jsonl;  ///< detections as seen by the tracker
};

struct DayConfig {
    std::optional<std::int64_t> start_ms;  ///< default: 05:00 local on the first frame's day
    int utc_offset_minutes = 0;
};

struct PipelineConfig {
    SourceConfig source;
    PrefilterConfig prefilter = PrefilterConfig::disabled();
    BackendConfig backend;
    FailurePolicy on_backend_failure = FailurePolicy::Skip;
    TrackerConfig tracker;
    ZoneConfig zones;
    AlertingConfig alerting;
    OutputConfig outputs;
    DayConfig day;
    std::size_t queue_depth = 32;
    std::optional<std::uint64_t> seed;  ///< overrides the scenario seed via a derived seed

    /// Throws ConfigError.
    void validate() const;
};

/// Parses a config document; relative paths resolve against `base_dir`.
/// MQTT_URL, MQTT_USER and MQTT_PASS in the environment override the file.
/// Throws ConfigError (bad values) or ParseError (bad JSON).
PipelineConfig parse_pipeline_config(const nlohmann::json& j, const std::filesystem::path& base_dir);
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

}  // namespace ppe
