#include "ppe/core/geometry.hpp"

#include <algorithm>

namespace ppe {
namespace {

double cross(Point o, Point a, Point b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

int sign(double v) { return (v > 0.0) - (v < 0.0); }

bool on_segment(Point p, Point q, Point r) {
    // r collinear with p-q: check it lies within the bounding box of the segment.
    return std::min(p.x, q.x) <= r.x && r.x <= std::max(p.x, q.x) &&
           std::min(p.y, q.y) <= r.y && r.y <= std::max(p.y, q.y);
}

}  // namespace

int line_side(Point p, const DirectedLine& line) { return sign(cross(line.a, line.b, p)); }

DirectedLine reversed(const DirectedLine& line) {
    return {line.b, line.a,
            line.direction == CrossingDirection::AtoLeft ? CrossingDirection::AtoRight
                                                         : CrossingDirection::AtoLeft};
}

double iou(const BBox& a, const BBox& b) {
    const double iw = std::min(a.right(), b.right()) - std::max(a.x, b.x);
    const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y);
    const double inter = (iw > 0.0 && ih > 0.0) ? iw * ih : 0.0;
    const double uni = a.area() + b.area() - inter;
    if (uni <= 0.0) return 0.0;
    return std::clamp(inter / uni, 0.0, 1.0);
}

Point footpoint(const BBox& box) { return {box.x + box.w / 2.0, box.y + box.h}; }

Point center(const BBox& box) { return {box.x + box.w / 2.0, box.y + box.h / 2.0}; }

bool contains(const BBox& area, Point p) {
    return p.x >= area.x && p.x <= area.right() && p.y >= area.y && p.y <= area.bottom();
}

bool segments_intersect(Point p1, Point p2, Point q1, Point q2) {
    const int d1 = sign(cross(q1, q2, p1));
    const int d2 = sign(cross(q1, q2, p2));
    const int d3 = sign(cross(p1, p2, q1));
    const int d4 = sign(cross(p1, p2, q2));
    if (d1 * d2 < 0 && d3 * d4 < 0) return true;
    if (d1 == 0 && on_segment(q1, q2, p1)) return true;
    if (d2 == 0 && on_segment(q1, q2, p2)) return true;
    if (d3 == 0 && on_segment(p1, p2, q1)) return true;
    if (d4 == 0 && on_segment(p1, p2, q2)) return true;
    return false;
}

BBox clip(const BBox& box, double width, double height) {
    const double x0 = std::clamp(box.x, 0.0, width);
    const double y0 = std::clamp(box.y, 0.0, height);
    const double x1 = std::clamp(box.right(), 0.0, width);
    const double y1 = std::clamp(box.bottom(), 0.0, height);
    return {x0, y0, std::max(0.0, x1 - x0), std::max(0.0, y1 - y0)};
}

}  // namespace ppe
