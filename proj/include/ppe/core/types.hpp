#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ppe {

/// Pixel coordinates, screen convention: x grows rightward, y grows downward.
struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

/// Axis-aligned box given by its top-left corner and size in pixels.
struct BBox {
    double x = 0.0;
    double y = 0.0;
    double w = 0.0;
    double h = 0.0;

    double area() const noexcept { return w * h; }
    double right() const noexcept { return x + w; }
    double bottom() const noexcept { return y + h; }

    friend bool operator==(const BBox&, const BBox&) = default;
};

enum class HeadClass { HelmetedHead, UnhelmetedHead };

std::string to_string(HeadClass c);
HeadClass head_class_from_string(const std::string& s);

struct Detection {
    BBox bbox;
    double confidence = 1.0;
    HeadClass cls = HeadClass::HelmetedHead;
    /// Appearance vector, unit norm when present.
    std::optional<std::vector<float>> feature;

    friend bool operator==(const Detection&, const Detection&) = default;
};

/// Which side change of a DirectedLine counts as a crossing.
///
/// The side of a point is the sign of the cross product (b - a) x (p - a).
/// AtoLeft counts moves from the negative to the positive side, AtoRight
/// the opposite. "Left" follows the y-up textbook convention; on a y-down
/// screen the positive side appears to the right of travel a->b.
enum class CrossingDirection { AtoLeft, AtoRight };

struct DirectedLine {
    Point a;
    Point b;
    CrossingDirection direction = CrossingDirection::AtoLeft;

    friend bool operator==(const DirectedLine&, const DirectedLine&) = default;
};

/// Rectangular counting area plus the entry (green) and exit (yellow) lines.
struct ZoneConfig {
    std::string camera_id;
    BBox detection_area;
    DirectedLine entry_line;
    DirectedLine exit_line;
    /// Footpoints within this distance of a line count as on it, so box
    /// jitter near the line cannot register a side change.
    double line_hysteresis_px = 0.0;

    /// Throws ConfigError when a line is degenerate or leaves the area.
    void validate() const;

    friend bool operator==(const ZoneConfig&, const ZoneConfig&) = default;
};

/// One grayscale image of a stream. Copies share the pixel buffer.
///
/// A "headless" frame carries index, timestamp and size but no pixels; it is
/// produced by detection-log sources where the imagery was never recorded.
class Frame {
public:
    /// Throws DimensionMismatch unless pixels.size() == width * height.
    Frame(std::int64_t index, std::int64_t timestamp_ms, int width, int height,
          std::vector<std::uint8_t> pixels);

    static Frame headless(std::int64_t index, std::int64_t timestamp_ms, int width, int height);

    std::int64_t index() const noexcept { return index_; }
    std::int64_t timestamp_ms() const noexcept { return timestamp_ms_; }
    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    bool has_pixels() const noexcept { return pixels_ != nullptr; }
    std::span<const std::uint8_t> pixels() const noexcept;

private:
    Frame(std::int64_t index, std::int64_t timestamp_ms, int width, int height);

    std::int64_t index_;
    std::int64_t timestamp_ms_;
    int width_;
    int height_;
    std::shared_ptr<const std::vector<std::uint8_t>> pixels_;
};

/// Outcome of comparing two count series. Correlation fields are empty
/// when the comparison is degenerate (no variance to correlate).
struct StatsReport {
    double mean_diff = 0.0;
    double sample_std = 0.0;
    std::optional<double> pearson_r;
    std::optional<double> p_value;
    std::size_t n = 0;

    bool degenerate() const noexcept { return !pearson_r.has_value(); }
};

}  // namespace ppe
