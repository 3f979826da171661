#include "ppe/core/types.hpp"

#include "ppe/core/errors.hpp"
#include "ppe/core/geometry.hpp"

namespace ppe {

std::string to_string(HeadClass c) {
    return c == HeadClass::HelmetedHead ? "helmeted_head" : "unhelmeted_head";
}

HeadClass head_class_from_string(const std::string& s) {
    if (s == "helmeted_head") return HeadClass::HelmetedHead;
    if (s == "unhelmeted_head") return HeadClass::UnhelmetedHead;
    throw ParseError("unknown detection class '" + s + "'");
}

void ZoneConfig::validate() const {
    if (detection_area.w < 0 || detection_area.h < 0)
        throw ConfigError("zone '" + camera_id + "': detection area has negative size");
    auto check = [&](const DirectedLine& l, const char* name) {
        if (l.a == l.b) throw ConfigError(std::string("zone '") + camera_id + "': " + name + " has coincident endpoints");
        if (!contains(detection_area, l.a) || !contains(detection_area, l.b))
            throw ConfigError(std::string("zone '") + camera_id + "': " + name + " leaves the detection area");
    };
    check(entry_line, "entry_line");
    check(exit_line, "exit_line");
    if (!(line_hysteresis_px >= 0.0)) throw ConfigError("zone '" + camera_id + "': line_hysteresis_px must be >= 0");
}

Frame::Frame(std::int64_t index, std::int64_t timestamp_ms, int width, int height)
    : index_(index), timestamp_ms_(timestamp_ms), width_(width), height_(height) {
    if (width <= 0 || height <= 0)
        throw DimensionMismatch("frame " + std::to_string(index) + " has non-positive size");
}

Frame::Frame(std::int64_t index, std::int64_t timestamp_ms, int width, int height,
             std::vector<std::uint8_t> pixels)
    : Frame(index, timestamp_ms, width, height) {
    if (pixels.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
        throw DimensionMismatch("frame " + std::to_string(index) + ": buffer holds " +
                                std::to_string(pixels.size()) + " bytes, expected " +
                                std::to_string(static_cast<std::size_t>(width) * height));
    pixels_ = std::make_shared<const std::vector<std::uint8_t>>(std::move(pixels));
}

Frame Frame::headless(std::int64_t index, std::int64_t timestamp_ms, int width, int height) {
    return Frame(index, timestamp_ms, width, height);
}

std::span<const std::uint8_t> Frame::pixels() const noexcept {
    if (!pixels_) return {};
    return {pixels_->data(), pixels_->size()};
}

}  // namespace ppe
