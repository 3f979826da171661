#include "ppe/prefilter/prefilter.hpp"

#include <cstdlib>
#include <numeric>
#include <string>

#include "ppe/core/errors.hpp"

namespace ppe {

void PrefilterConfig::validate() const {
    if (brightness_threshold < 0.0 || brightness_threshold > 255.0)
        throw ConfigError("prefilter.brightness_threshold must lie in [0,255]");
    if (pixel_diff_threshold < 0 || pixel_diff_threshold > 255)
        throw ConfigError("prefilter.pixel_diff_threshold must lie in [0,255]");
    if (motion_area_fraction < 0.0 || motion_area_fraction > 1.0)
        throw ConfigError("prefilter.motion_area_fraction must lie in [0,1]");
}

GateDecision brightness_gate(const Frame& frame, const PrefilterConfig& cfg) {
    const auto px = frame.pixels();
    if (px.empty()) return GateDecision::Pass;
    const std::uint64_t sum = std::accumulate(px.begin(), px.end(), std::uint64_t{0});
    // mean >= threshold, evaluated without dividing
    return static_cast<double>(sum) >= cfg.brightness_threshold * static_cast<double>(px.size())
               ? GateDecision::Pass
               : GateDecision::Discard;
}

GateDecision motion_gate(const Frame& prev, const Frame& curr, const PrefilterConfig& cfg) {
    if (prev.width() != curr.width() || prev.height() != curr.height())
        throw DimensionMismatch("motion gate: frame " + std::to_string(curr.index()) + " is " +
                                std::to_string(curr.width()) + "x" + std::to_string(curr.height()) +
                                ", reference is " + std::to_string(prev.width()) + "x" +
                                std::to_string(prev.height()));
    const auto a = prev.pixels();
    const auto b = curr.pixels();
    if (a.size() != b.size() || a.empty()) throw DimensionMismatch("motion gate needs two frames with pixels");
    std::size_t changed = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::abs(int{b[i]} - int{a[i]}) > cfg.pixel_diff_threshold) ++changed;
    const double fraction = static_cast<double>(changed) / static_cast<double>(a.size());
    return fraction > cfg.motion_area_fraction ? GateDecision::Pass : GateDecision::Discard;
}

Prefilter::Prefilter(PrefilterConfig cfg) : cfg_(cfg) { cfg_.validate(); }

PrefilterVerdict Prefilter::examine(const Frame& frame) {
    ++metrics_.examined;
    if (!frame.has_pixels()) {
        ++metrics_.passed;
        return PrefilterVerdict::Passed;
    }

    auto verdict = PrefilterVerdict::Passed;
    if (cfg_.brightness_enabled && brightness_gate(frame, cfg_) == GateDecision::Discard) {
        verdict = PrefilterVerdict::DiscardedBrightness;
    } else if (cfg_.motion_enabled && reference_ &&
               motion_gate(*reference_, frame, cfg_) == GateDecision::Discard) {
        verdict = PrefilterVerdict::DiscardedMotion;
    }
    if (cfg_.motion_enabled) reference_ = frame;

    switch (verdict) {
        case PrefilterVerdict::Passed: ++metrics_.passed; break;
        case PrefilterVerdict::DiscardedBrightness: ++metrics_.discarded_brightness; break;
        case PrefilterVerdict::DiscardedMotion: ++metrics_.discarded_motion; break;
    }
    return verdict;
}

FilteredStream filter_stream(std::span<const Frame> frames, const PrefilterConfig& cfg) {
    Prefilter filter(cfg);
    FilteredStream out;
    for (const auto& f : frames)
        if (filter.examine(f) == PrefilterVerdict::Passed) out.frames.push_back(f);
    out.metrics = filter.metrics();
    return out;
}

}  // namespace ppe
