#pragma once

#include <cmath>

#include "detplace/grid.hpp"

namespace detplace {

/// Absolute tolerance, in meters, for geometric equality tests.
inline constexpr double kGeometryTolerance = 1e-9;

struct Segment {
  Point a;
  Point b;

  double length() const { return std::hypot(b.x - a.x, b.y - a.y); }
};

inline double distance(Point p, Point q) { return std::hypot(q.x - p.x, q.y - p.y); }

/// Length of the part of `s` lying inside the closed disk (center, radius).
double chord_length(const Segment& s, Point center, double radius);

/// True iff `s` meets the open interior of `cell`. Running along an edge or
/// touching a corner does not count.
bool segment_intersects_cell(const Segment& s, const Rect& cell);

/// True iff the straight walk between the two cell centers crosses no blocked
/// cell interior. Exact integer arithmetic; no tolerance involved.
bool line_of_sight(const GridMap& map, CellIndex from, CellIndex to);

}  // namespace detplace
