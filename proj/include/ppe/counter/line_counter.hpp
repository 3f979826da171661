#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "ppe/core/types.hpp"

namespace ppe {

enum class CountDirection { In, Out };
enum class LineKind { Entry, Exit };

std::string to_string(CountDirection d);

struct CountEvent {
    CountDirection direction = CountDirection::In;
    std::int64_t timestamp_ms = 0;
    std::int64_t track_id = 0;
    bool helmeted = false;
    std::int64_t frame = 0;

    friend bool operator==(const CountEvent&, const CountEvent&) = default;
};

/// Debounce state for one (track, line) pair.
struct LineCrossState {
    int last_side = 0;  ///< last non-zero side seen; 0 until the track leaves the line
    Point anchor;       ///< footpoint at which last_side was observed
    bool counted = false;
};

/// Turns footpoint trajectories into directional line-crossing events.
///
/// A crossing fires when the footpoint moves from one side of a line to the
/// other along a segment that meets the line segment, both ends lie in the
/// detection area, the side change matches the line's declared direction,
/// and the (track, line) pair has not counted before. Points on a line, or
/// within the zone's hysteresis band around it, are skipped: the crossing
/// segment spans from the last point seen clear of the line.
class LineCounter {
public:
    explicit LineCounter(ZoneConfig zones);

    /// Feeds one step of a track. Returns 0, 1 or 2 events (one per line at most).
    std::vector<CountEvent> observe(std::int64_t track_id, bool helmeted, Point prev, Point curr,
                                    std::int64_t timestamp_ms, std::int64_t frame = 0);

    /// Releases the state of a track that no longer exists.
    void forget(std::int64_t track_id);

    const ZoneConfig& zones() const noexcept { return zones_; }
    std::size_t tracked_pairs() const noexcept { return state_.size(); }

private:
    int side_of(Point p, const DirectedLine& line) const;
    bool step_line(LineCrossState& st, const DirectedLine& line, Point prev, Point curr);

    ZoneConfig zones_;
    std::map<std::pair<std::int64_t, LineKind>, LineCrossState> state_;
};

}  // namespace ppe
