#pragma once

#include <filesystem>

#include "ppe/detector/backend.hpp"
#include "ppe/detector/detection_json.hpp"

namespace ppe {

/// Serves detections recorded in a replay log.
///
/// A frame index absent from the log yields no detections; in strict mode it
/// raises ReplayExhausted instead.
class ReplayBackend final : public DetectorBackend {
public:
    explicit ReplayBackend(ReplayLog log, bool strict = false);

    BackendCapabilities capabilities() const override;
    std::vector<Detection> detect(const Frame& frame) override;

    const ReplayLog& log() const noexcept { return log_; }

private:
    ReplayLog log_;
    bool strict_;
    bool has_features_ = false;
};

ReplayBackend load_replay(const std::filesystem::path& path, bool strict = false);

}  // namespace ppe
