#include "ppe/counter/line_counter.hpp"

#include <cmath>

#include "ppe/core/geometry.hpp"

namespace ppe {

std::string to_string(CountDirection d) { return d == CountDirection::In ? "in" : "out"; }

LineCounter::LineCounter(ZoneConfig zones) : zones_(std::move(zones)) { zones_.validate(); }

int LineCounter::side_of(Point p, const DirectedLine& line) const {
    const int s = line_side(p, line);
    if (s == 0 || zones_.line_hysteresis_px <= 0.0) return s;
    const double len = std::hypot(line.b.x - line.a.x, line.b.y - line.a.y);
    const double dist = std::fabs((line.b.x - line.a.x) * (p.y - line.a.y) - (line.b.y - line.a.y) * (p.x - line.a.x)) / len;
    return dist <= zones_.line_hysteresis_px ? 0 : s;
}

bool LineCounter::step_line(LineCrossState& st, const DirectedLine& line, Point prev, Point curr) {
    if (st.last_side == 0) {
        if (const int s = side_of(prev, line); s != 0) {
            st.last_side = s;
            st.anchor = prev;
        }
    }
    const int side = side_of(curr, line);
    if (side == 0) return false;
    if (st.last_side == 0 || side == st.last_side) {
        st.last_side = side;
        st.anchor = curr;
        return false;
    }

    const int wanted_from = line.direction == CrossingDirection::AtoLeft ? -1 : +1;
    const bool fires = !st.counted && st.last_side == wanted_from &&
                       contains(zones_.detection_area, st.anchor) &&
                       contains(zones_.detection_area, curr) &&
                       segments_intersect(st.anchor, curr, line.a, line.b);
    st.last_side = side;
    st.anchor = curr;
    if (fires) st.counted = true;
    return fires;
}

std::vector<CountEvent> LineCounter::observe(std::int64_t track_id, bool helmeted, Point prev, Point curr,
                                             std::int64_t timestamp_ms, std::int64_t frame) {
    std::vector<CountEvent> events;
    auto& entry = state_[{track_id, LineKind::Entry}];
    if (step_line(entry, zones_.entry_line, prev, curr))
        events.push_back({CountDirection::In, timestamp_ms, track_id, helmeted, frame});
    auto& exit = state_[{track_id, LineKind::Exit}];
    if (step_line(exit, zones_.exit_line, prev, curr))
        events.push_back({CountDirection::Out, timestamp_ms, track_id, helmeted, frame});
    return events;
}

void LineCounter::forget(std::int64_t track_id) {
    state_.erase({track_id, LineKind::Entry});
    state_.erase({track_id, LineKind::Exit});
}

}  // namespace ppe
