#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ppe/core/types.hpp"
#include "ppe/tracker/kalman_filter.hpp"

namespace ppe {

enum class TrackStatus { Tentative, Confirmed, Deleted };

struct TrackerConfig {
    int max_age = 30;                         ///< frames without update before a confirmed track is dropped
    int n_init = 3;                           ///< consecutive hits to confirm
    double gating_threshold = kChi2Gate95;    ///< squared Mahalanobis cut-off
    double iou_gate = 0.3;                    ///< minimum IoU in the fallback stage
    double appearance_weight = 0.0;           ///< lambda in [0,1]; 0 means motion only
    KalmanNoise noise;

    /// Throws ConfigError.
    void validate() const;
};

struct Track {
    std::int64_t track_id = 0;
    KalmanState state;
    TrackStatus status = TrackStatus::Tentative;
    int hits = 0;  ///< consecutive updates
    int age = 0;   ///< frames since creation
    int time_since_update = 0;
    std::array<int, 2> class_votes{};  ///< indexed by HeadClass
    HeadClass last_class = HeadClass::HelmetedHead;
    std::optional<std::vector<float>> last_feature;

    BBox last_bbox;                     ///< last matched detection box
    std::optional<Point> prev_footpoint;  ///< footpoint of the update before the last one
    Point last_footpoint;
    bool updated = false;  ///< matched in the most recent step

    /// Majority of class votes; a tie goes to the most recent class.
    HeadClass majority_class() const noexcept;
    BBox predicted_bbox() const { return to_bbox(state.mean); }
    bool confirmed() const noexcept { return status == TrackStatus::Confirmed; }
};

struct AssociationResult {
    std::vector<std::pair<std::size_t, std::size_t>> matches;  ///< (track index, detection index)
    std::vector<std::size_t> unmatched_tracks;
    std::vector<std::size_t> unmatched_detections;
};

/// Matching cascade over confirmed tracks (ascending time_since_update) on a
/// gated motion/appearance cost, then IoU matching for what remains.
AssociationResult associate(std::span<const Track> tracks, std::span<const Detection> detections,
                            const KalmanFilter& kf, const TrackerConfig& cfg);

/// Cost used in the cascade; kForbidden outside the Mahalanobis gate.
double association_cost(const Track& track, const Detection& det, const KalmanFilter& kf,
                        const TrackerConfig& cfg);

/// Tracking-by-detection for one stream. Not thread-safe; feed frames in order.
class Tracker {
public:
    explicit Tracker(TrackerConfig cfg = {});

    /// One iteration. Frame gaps (skipped frames) advance the motion model by
    /// the gap. Returns the confirmed tracks after the update.
    /// Throws NonMonotonicFrame unless frame_index exceeds the previous one.
    std::vector<Track> step(std::span<const Detection> detections, std::int64_t frame_index);

    const std::vector<Track>& tracks() const noexcept { return tracks_; }
    /// Ids removed by the most recent step.
    const std::vector<std::int64_t>& deleted_ids() const noexcept { return deleted_; }
    std::int64_t confirmed_total() const noexcept { return confirmed_total_; }
    const TrackerConfig& config() const noexcept { return cfg_; }

private:
    void initiate(const Detection& det);

    TrackerConfig cfg_;
    KalmanFilter kf_;
    std::vector<Track> tracks_;
    std::vector<std::int64_t> deleted_;
    std::optional<std::int64_t> last_frame_;
    std::int64_t next_id_ = 1;
    std::int64_t confirmed_total_ = 0;
};

}  // namespace ppe
