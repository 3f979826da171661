#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ppe/core/types.hpp"
#include "ppe/counter/line_counter.hpp"

namespace ppe {

/// Helmet state over the half-open frame range [from, to).
struct HelmetSpan {
    std::int64_t from = 0;
    std::int64_t to = 0;
    bool helmeted = true;
};

/// Box centre at a frame; positions between waypoints are linearly interpolated.
struct Waypoint {
    std::int64_t frame = 0;
    double x = 0.0;
    double y = 0.0;
};

/// One scripted person. The actor exists from its first to its last waypoint frame.
struct ActorScript {
    std::string actor_id;
    std::vector<HelmetSpan> helmet_schedule;
    std::vector<Waypoint> waypoints;
    double box_w = 20.0;
    double box_h = 24.0;

    std::int64_t first_frame() const { return waypoints.front().frame; }
    std::int64_t last_frame() const { return waypoints.back().frame; }
    bool present_at(std::int64_t frame) const { return frame >= first_frame() && frame <= last_frame(); }
    Point center_at(std::int64_t frame) const;
    bool helmeted_at(std::int64_t frame) const;
};

struct NoiseConfig {
    double miss_prob = 0.0;            ///< i.i.d. per true detection
    double false_positive_rate = 0.0;  ///< expected spurious boxes per frame (Poisson)
    double bbox_jitter_std = 0.0;      ///< Gaussian noise on each box corner, pixels

    bool off() const noexcept { return miss_prob == 0.0 && false_positive_rate == 0.0 && bbox_jitter_std == 0.0; }
};

struct ScenarioConfig {
    std::uint64_t seed = 0;
    std::int64_t duration_frames = 0;
    int width = 320;
    int height = 240;
    double fps = 10.0;
    std::int64_t start_ms = 1669096800000;  // 2022-11-22 06:00 UTC
    std::vector<ActorScript> actors;
    NoiseConfig noise;

    /// Throws ConfigError on out-of-range values or inconsistent scripts.
    void validate() const;
};

void to_json(nlohmann::json& j, const ScenarioConfig& c);
void from_json(const nlohmann::json& j, ScenarioConfig& c);
ScenarioConfig load_scenario_config(const std::filesystem::path& path);

struct GroundTruthCrossing {
    std::string actor_id;
    LineKind line = LineKind::Entry;
    std::int64_t frame = 0;
    std::int64_t timestamp_ms = 0;
    /// Helmet class a perfect detector and tracker would attribute at the
    /// crossing: majority of the scripted states seen so far, ties going to
    /// the current state.
    bool helmeted_at_crossing = true;

    friend bool operator==(const GroundTruthCrossing&, const GroundTruthCrossing&) = default;
};

struct TrajectoryPoint {
    std::int64_t frame = 0;
    BBox box;
    bool helmeted = true;
};

struct GroundTruth {
    std::vector<std::pair<std::string, std::vector<TrajectoryPoint>>> trajectories;
    std::vector<GroundTruthCrossing> crossings;  ///< ordered by frame, then actor order
};

nlohmann::ordered_json ground_truth_to_json(const GroundTruth& gt);

/// Deterministic scripted scene. Every query is a pure function of the
/// configuration, the seed and the frame index, so calls may run concurrently.
class Scenario {
public:
    Scenario(ScenarioConfig cfg, ZoneConfig zones);

    const ScenarioConfig& config() const noexcept { return cfg_; }
    const ZoneConfig& zones() const noexcept { return zones_; }

    std::int64_t timestamp_of(std::int64_t frame) const;

    /// Uncorrupted, integer-aligned, frame-clipped box of every actor present at `frame`.
    std::vector<std::pair<std::size_t, TrajectoryPoint>> truth_at(std::int64_t frame) const;

    /// Truth corrupted by the noise model, seeded per frame.
    std::vector<Detection> detections_at(std::int64_t frame) const;

    /// Background 20, actors drawn as filled rectangles of intensity 200.
    Frame render(std::int64_t frame) const;

    GroundTruth ground_truth() const;

private:
    ScenarioConfig cfg_;
    ZoneConfig zones_;
};

struct ScenarioOutput {
    std::vector<std::pair<std::int64_t, std::vector<Detection>>> detections;
    GroundTruth truth;
    std::vector<Frame> frames;  ///< empty unless rendering was requested
};

ScenarioOutput generate_scenario(const ScenarioConfig& cfg, const ZoneConfig& zones, bool render = false);

}  // namespace ppe
