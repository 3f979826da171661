#pragma once

#include "ppe/core/types.hpp"

namespace ppe {

/// Sign of (b - a) x (p - a): +1, 0 or -1.
int line_side(Point p, const DirectedLine& line);

/// Same line with endpoints swapped and the crossing direction mirrored.
DirectedLine reversed(const DirectedLine& line);

/// Intersection over union; 0 when the union is empty.
double iou(const BBox& a, const BBox& b);

/// Bottom-centre of the box, the point tested against counting lines.
Point footpoint(const BBox& box);

Point center(const BBox& box);

/// Inclusive containment test.
bool contains(const BBox& area, Point p);

/// Closed-segment intersection test (touching counts).
bool segments_intersect(Point p1, Point p2, Point q1, Point q2);

/// Clip to [0,width] x [0,height]; sizes never go negative.
BBox clip(const BBox& box, double width, double height);

}  // namespace ppe
