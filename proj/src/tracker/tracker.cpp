#include "ppe/tracker/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "ppe/core/errors.hpp"
#include "ppe/core/geometry.hpp"
#include "ppe/tracker/hungarian.hpp"

namespace ppe {
namespace {

double cosine_distance(const std::vector<float>& a, const std::vector<float>& b) {
    if (a.size() != b.size()) return 1.0;
    double dot = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) dot += static_cast<double>(a[i]) * b[i];
    return 1.0 - dot;
}

void match_stage(const CostMatrix& cost, const std::vector<std::size_t>& track_ids,
                 std::vector<std::size_t>& det_ids, AssociationResult& res, std::vector<std::size_t>& leftover) {
    const auto assignment = hungarian_partial(cost);
    std::vector<char> det_taken(det_ids.size(), false);
    for (const auto& [r, c] : assignment.pairs) {
        res.matches.emplace_back(track_ids[r], det_ids[c]);
        det_taken[c] = true;
    }
    for (int r : assignment.unassigned_rows) leftover.push_back(track_ids[r]);
    std::vector<std::size_t> remaining;
    for (std::size_t c = 0; c < det_ids.size(); ++c)
        if (!det_taken[c]) remaining.push_back(det_ids[c]);
    det_ids = std::move(remaining);
}

}  // namespace

void TrackerConfig::validate() const {
    if (max_age < 1) throw ConfigError("tracker.max_age must be >= 1");
    if (n_init < 1) throw ConfigError("tracker.n_init must be >= 1");
    if (!(gating_threshold > 0.0)) throw ConfigError("tracker.gating_threshold must be positive");
    if (iou_gate < 0.0 || iou_gate > 1.0) throw ConfigError("tracker.iou_gate must lie in [0,1]");
    if (appearance_weight < 0.0 || appearance_weight > 1.0)
        throw ConfigError("tracker.appearance_weight must lie in [0,1]");
    if (noise.process_scale < 0.0 || noise.measurement_scale < 0.0)
        throw ConfigError("tracker noise scales must be >= 0");
}

HeadClass Track::majority_class() const noexcept {
    const int helmeted = class_votes[static_cast<int>(HeadClass::HelmetedHead)];
    const int bare = class_votes[static_cast<int>(HeadClass::UnhelmetedHead)];
    if (helmeted == bare) return last_class;
    return helmeted > bare ? HeadClass::HelmetedHead : HeadClass::UnhelmetedHead;
}

double association_cost(const Track& track, const Detection& det, const KalmanFilter& kf,
                        const TrackerConfig& cfg) {
    if (!(det.bbox.h > 0.0)) return kForbidden;
    double d2 = 0.0;
    try {
        d2 = kf.mahalanobis(track.state, to_measurement(det.bbox));
    } catch (const SingularInnovation&) {
        return kForbidden;
    }
    if (d2 > cfg.gating_threshold) return kForbidden;
    const double motion = d2 / cfg.gating_threshold;
    if (cfg.appearance_weight > 0.0 && track.last_feature && det.feature)
        return cfg.appearance_weight * cosine_distance(*track.last_feature, *det.feature) +
               (1.0 - cfg.appearance_weight) * motion;
    return motion;
}

AssociationResult associate(std::span<const Track> tracks, std::span<const Detection> detections,
                            const KalmanFilter& kf, const TrackerConfig& cfg) {
    AssociationResult res;
    std::vector<std::size_t> dets(detections.size());
    std::iota(dets.begin(), dets.end(), std::size_t{0});

    std::map<int, std::vector<std::size_t>> cascade;  // time_since_update -> confirmed tracks
    std::vector<std::size_t> leftover;
    for (std::size_t i = 0; i < tracks.size(); ++i) {
        if (tracks[i].status == TrackStatus::Confirmed)
            cascade[tracks[i].time_since_update].push_back(i);
        else if (tracks[i].status == TrackStatus::Tentative)
            leftover.push_back(i);
    }

    for (const auto& [_, level] : cascade) {
        if (dets.empty()) {
            leftover.insert(leftover.end(), level.begin(), level.end());
            continue;
        }
        CostMatrix cost(static_cast<Eigen::Index>(level.size()), static_cast<Eigen::Index>(dets.size()));
        for (std::size_t r = 0; r < level.size(); ++r)
            for (std::size_t c = 0; c < dets.size(); ++c)
                cost(r, c) = association_cost(tracks[level[r]], detections[dets[c]], kf, cfg);
        match_stage(cost, level, dets, res, leftover);
    }

    // Only tracks seen in the previous frame take part in IoU matching; a
    // coasting track's predicted box is no evidence of overlap.
    std::vector<std::size_t> iou_candidates, stale;
    for (const auto i : leftover)
        (tracks[i].status == TrackStatus::Tentative || tracks[i].time_since_update <= 1 ? iou_candidates : stale)
            .push_back(i);
    leftover = std::move(iou_candidates);
    std::sort(leftover.begin(), leftover.end());
    if (!leftover.empty() && !dets.empty()) {
        CostMatrix cost(static_cast<Eigen::Index>(leftover.size()), static_cast<Eigen::Index>(dets.size()));
        for (std::size_t r = 0; r < leftover.size(); ++r)
            for (std::size_t c = 0; c < dets.size(); ++c) {
                const double overlap = iou(tracks[leftover[r]].predicted_bbox(), detections[dets[c]].bbox);
                cost(r, c) = overlap < cfg.iou_gate ? kForbidden : 1.0 - overlap;
            }
        std::vector<std::size_t> unmatched;
        match_stage(cost, leftover, dets, res, unmatched);
        leftover = std::move(unmatched);
    }
    leftover.insert(leftover.end(), stale.begin(), stale.end());

    std::sort(leftover.begin(), leftover.end());
    res.unmatched_tracks = std::move(leftover);
    res.unmatched_detections = std::move(dets);
    std::sort(res.matches.begin(), res.matches.end());
    return res;
}

Tracker::Tracker(TrackerConfig cfg) : cfg_(cfg), kf_(cfg.noise) { cfg_.validate(); }

void Tracker::initiate(const Detection& det) {
    Track t;
    t.track_id = next_id_++;
    t.state = kf_.initiate(to_measurement(det.bbox));
    t.hits = 1;
    t.age = 1;
    t.class_votes[static_cast<int>(det.cls)] = 1;
    t.last_class = det.cls;
    t.last_feature = det.feature;
    t.last_bbox = det.bbox;
    t.last_footpoint = footpoint(det.bbox);
    t.updated = true;
    if (t.hits >= cfg_.n_init) {
        t.status = TrackStatus::Confirmed;
        ++confirmed_total_;
    }
    tracks_.push_back(std::move(t));
}

std::vector<Track> Tracker::step(std::span<const Detection> detections, std::int64_t frame_index) {
    if (last_frame_ && frame_index <= *last_frame_)
        throw NonMonotonicFrame("frame " + std::to_string(frame_index) + " does not follow frame " +
                                std::to_string(*last_frame_));
    const int gap = last_frame_ ? static_cast<int>(std::min<std::int64_t>(frame_index - *last_frame_, 1 << 20)) : 1;
    last_frame_ = frame_index;
    deleted_.clear();

    for (auto& t : tracks_) {
        t.state = kf_.predict(t.state, gap);
        t.age += gap;
        t.time_since_update += gap;
        t.updated = false;
    }

    // Detections without a usable height cannot enter the motion model.
    std::vector<Detection> usable;
    usable.reserve(detections.size());
    for (const auto& d : detections)
        if (d.bbox.h > 0.0 && d.bbox.w > 0.0) usable.push_back(d);

    const auto assoc = associate(tracks_, usable, kf_, cfg_);

    for (const auto& [ti, di] : assoc.matches) {
        auto& t = tracks_[ti];
        const auto& det = usable[di];
        t.state = kf_.update(t.state, to_measurement(det.bbox));
        ++t.hits;
        t.time_since_update = 0;
        ++t.class_votes[static_cast<int>(det.cls)];
        t.last_class = det.cls;
        if (det.feature) t.last_feature = det.feature;
        t.prev_footpoint = t.last_footpoint;
        t.last_footpoint = footpoint(det.bbox);
        t.last_bbox = det.bbox;
        t.updated = true;
        if (t.status == TrackStatus::Tentative && t.hits >= cfg_.n_init) {
            t.status = TrackStatus::Confirmed;
            ++confirmed_total_;
        }
    }
    for (std::size_t ti : assoc.unmatched_tracks) {
        auto& t = tracks_[ti];
        t.hits = 0;
        if (t.status == TrackStatus::Tentative || t.time_since_update > cfg_.max_age) t.status = TrackStatus::Deleted;
    }
    for (std::size_t di : assoc.unmatched_detections) initiate(usable[di]);

    std::vector<Track> alive;
    alive.reserve(tracks_.size());
    for (auto& t : tracks_) {
        if (t.status == TrackStatus::Deleted)
            deleted_.push_back(t.track_id);
        else
            alive.push_back(std::move(t));
    }
    tracks_ = std::move(alive);

    std::vector<Track> confirmed;
    for (const auto& t : tracks_)
        if (t.confirmed()) confirmed.push_back(t);
    return confirmed;
}

}  // namespace ppe
