#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ppe/core/types.hpp"

namespace ppe {

/// Image-processor gates applied before any detection backend sees a frame.
struct PrefilterConfig {
    double brightness_threshold = 20.0;  ///< minimum mean intensity, [0,255]
    int pixel_diff_threshold = 25;       ///< per-pixel |curr - prev| above this counts as changed
    double motion_area_fraction = 0.01;  ///< changed-pixel fraction that must be exceeded
    bool brightness_enabled = true;
    bool motion_enabled = true;

    /// Throws ConfigError when a threshold is out of range.
    void validate() const;

    static PrefilterConfig disabled() {
        PrefilterConfig c;
        c.brightness_enabled = c.motion_enabled = false;
        return c;
    }
};

enum class GateDecision { Pass, Discard };

GateDecision brightness_gate(const Frame& frame, const PrefilterConfig& cfg);

/// Throws DimensionMismatch when the frames differ in size or lack pixels.
GateDecision motion_gate(const Frame& prev, const Frame& curr, const PrefilterConfig& cfg);

struct PrefilterMetrics {
    std::uint64_t examined = 0;
    std::uint64_t passed = 0;
    std::uint64_t discarded_brightness = 0;
    std::uint64_t discarded_motion = 0;

    std::uint64_t discarded() const noexcept { return discarded_brightness + discarded_motion; }
};

enum class PrefilterVerdict { Passed, DiscardedBrightness, DiscardedMotion };

/// Stateful gate for one stream. Brightness runs first, then motion against
/// the previously examined frame (whether or not that frame passed).
/// Headless frames cannot be gated and always pass.
class Prefilter {
public:
    explicit Prefilter(PrefilterConfig cfg);

    PrefilterVerdict examine(const Frame& frame);

    const PrefilterMetrics& metrics() const noexcept { return metrics_; }
    const PrefilterConfig& config() const noexcept { return cfg_; }

private:
    PrefilterConfig cfg_;
    PrefilterMetrics metrics_;
    std::optional<Frame> reference_;
};

struct FilteredStream {
    std::vector<Frame> frames;
    PrefilterMetrics metrics;
};

FilteredStream filter_stream(std::span<const Frame> frames, const PrefilterConfig& cfg);

}  // namespace ppe
