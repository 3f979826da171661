#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ppe/core/types.hpp"

namespace ppe {

/// {"x","y","w","h","confidence","class"[,"feature"]}; integral coordinates are written as ints.
nlohmann::ordered_json detection_to_json(const Detection& d);
Detection detection_from_json(const nlohmann::json& j);

nlohmann::ordered_json detections_to_json(const std::vector<Detection>& ds);

struct ReplayEntry {
    std::vector<Detection> detections;
    std::optional<std::int64_t> timestamp_ms;
};

/// Detection log keyed by frame index (the replay JSONL format).
struct ReplayLog {
    std::map<std::int64_t, ReplayEntry> frames;

    std::optional<std::int64_t> last_frame() const;
};

/// Throws IoError, ParseError (with 1-based line) or DuplicateFrameIndex.
ReplayLog load_replay_log(const std::filesystem::path& path);
ReplayLog parse_replay_log(const std::string& text);

/// One JSONL line: {"frame":..,["ts_ms":..,]"detections":[..]}.
std::string replay_line(std::int64_t frame, const std::vector<Detection>& ds,
                        std::optional<std::int64_t> timestamp_ms = std::nullopt);

}  // namespace ppe
