#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ppe/core/types.hpp"
#include "ppe/detector/detection_json.hpp"
#include "ppe/detector/scenario.hpp"

namespace ppe {

/// Binary 8-bit PGM (P5). Throws IoError or ParseError.
Frame read_pgm(const std::filesystem::path& path, std::int64_t index, std::int64_t timestamp_ms);
void write_pgm(const std::filesystem::path& path, const Frame& frame);

/// Pull-based stream of frames with increasing indices.
class FrameSource {
public:
    virtual ~FrameSource() = default;
    virtual std::optional<Frame> next() = 0;
};

/// Frames of a scripted scenario, rendered or headless.
class ScenarioSource final : public FrameSource {
public:
    ScenarioSource(std::shared_ptr<const Scenario> scenario, bool render);
    std::optional<Frame> next() override;

private:
    std::shared_ptr<const Scenario> scenario_;
    bool render_;
    std::int64_t next_ = 0;
};

struct ManifestEntry {
    std::int64_t frame = 0;
    std::int64_t timestamp_ms = 0;
    std::filesystem::path file;
};

/// JSONL manifest of {"frame","ts_ms","file"} lines; relative files resolve
/// against the manifest's directory. Throws ParseError on unordered frames.
std::vector<ManifestEntry> load_frame_manifest(const std::filesystem::path& path);

/// Replays recorded PGM frames listed in a manifest.
class ManifestSource final : public FrameSource {
public:
    explicit ManifestSource(const std::filesystem::path& manifest);
    std::optional<Frame> next() override;

private:
    std::vector<ManifestEntry> entries_;
    std::size_t pos_ = 0;
};

struct StreamGeometry {
    int width = 320;
    int height = 240;
    double fps = 10.0;
    std::int64_t start_ms = 0;
};

/// Headless frames covering every index from the first to the last frame of
/// a detection log. Timestamps come from the log when recorded, otherwise
/// from the geometry's start time and frame rate.
class DetectionLogSource final : public FrameSource {
public:
    DetectionLogSource(std::shared_ptr<const ReplayLog> log, StreamGeometry geometry);
    std::optional<Frame> next() override;

private:
    std::shared_ptr<const ReplayLog> log_;
    StreamGeometry geo_;
    std::int64_t next_ = 0;
    std::int64_t last_ = -1;
};

}  // namespace ppe
