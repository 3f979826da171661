#include "ppe/detector/replay_backend.hpp"

#include "ppe/core/errors.hpp"
#include "ppe/core/geometry.hpp"

namespace ppe {

ReplayBackend::ReplayBackend(ReplayLog log, bool strict) : log_(std::move(log)), strict_(strict) {
    for (const auto& [_, entry] : log_.frames)
        for (const auto& d : entry.detections)
            if (d.feature) has_features_ = true;
}

BackendCapabilities ReplayBackend::capabilities() const { return {"replay", has_features_}; }

std::vector<Detection> ReplayBackend::detect(const Frame& frame) {
    const auto it = log_.frames.find(frame.index());
    if (it == log_.frames.end()) {
        if (strict_) throw ReplayExhausted("replay log has no entry for frame " + std::to_string(frame.index()));
        return {};
    }
    std::vector<Detection> out = it->second.detections;
    for (auto& d : out) d.bbox = clip(d.bbox, frame.width(), frame.height());
    std::erase_if(out, [](const Detection& d) { return d.bbox.area() <= 0.0; });
    return out;
}

ReplayBackend load_replay(const std::filesystem::path& path, bool strict) {
    return ReplayBackend(load_replay_log(path), strict);
}

}  // namespace ppe
