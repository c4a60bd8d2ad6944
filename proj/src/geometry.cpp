#include "detplace/geometry.hpp"

#include <algorithm>
#include <cstdint>
#include <utility>

namespace detplace {

double chord_length(const Segment& s, Point center, double radius) {
  const double dx = s.b.x - s.a.x;
  const double dy = s.b.y - s.a.y;
  const double a = dx * dx + dy * dy;
  if (a == 0.0) return 0.0;
  const double fx = s.a.x - center.x;
  const double fy = s.a.y - center.y;
  const double half_b = fx * dx + fy * dy;
  const double c = fx * fx + fy * fy - radius * radius;
  const double disc = half_b * half_b - a * c;
  if (disc <= 0.0) return 0.0;

  // Roots of a t^2 + 2 half_b t + c = 0 without cancellation.
  const double q = -(half_b + std::copysign(std::sqrt(disc), half_b));
  double t0 = q / a;
  double t1 = q != 0.0 ? c / q : -t0;
  if (t0 > t1) std::swap(t0, t1);

  const double lo = std::max(0.0, t0);
  const double hi = std::min(1.0, t1);
  if (hi <= lo) return 0.0;
  return (hi - lo) * std::sqrt(a);
}

bool segment_intersects_cell(const Segment& s, const Rect& cell) {
  const double len = s.length();
  const double d[2] = {s.b.x - s.a.x, s.b.y - s.a.y};
  const double p[2] = {s.a.x, s.a.y};
  const double lo_bound[2] = {cell.xmin, cell.ymin};
  const double hi_bound[2] = {cell.xmax, cell.ymax};

  double t_lo = 0.0;
  double t_hi = 1.0;
  for (int axis = 0; axis < 2; ++axis) {
    if (d[axis] == 0.0) {
      // Parallel to this axis: must lie strictly between the two faces.
      if (p[axis] <= lo_bound[axis] + kGeometryTolerance ||
          p[axis] >= hi_bound[axis] - kGeometryTolerance)
        return false;
      continue;
    }
    double t0 = (lo_bound[axis] - p[axis]) / d[axis];
    double t1 = (hi_bound[axis] - p[axis]) / d[axis];
    if (t0 > t1) std::swap(t0, t1);
    t_lo = std::max(t_lo, t0);
    t_hi = std::min(t_hi, t1);
  }
  if (len == 0.0) return t_lo <= t_hi;
  return (t_hi - t_lo) * len > kGeometryTolerance;
}

bool line_of_sight(const GridMap& map, CellIndex from, CellIndex to) {
  if (from == to) return true;
  if (from.col > to.col) std::swap(from, to);

  // Doubled coordinates: centers sit on odd integers and cell (r, c) has the
  // open interior (2c, 2c+2) x (2r, 2r+2).
  const std::int64_t x1 = 2 * from.col + 1;
  const std::int64_t y1 = 2 * from.row + 1;
  const std::int64_t x2 = 2 * to.col + 1;
  const std::int64_t dx = x2 - x1;
  const std::int64_t dy = 2 * (to.row - from.row);

  if (dx == 0) {
    const int r0 = std::min(from.row, to.row);
    const int r1 = std::max(from.row, to.row);
    for (int r = r0; r <= r1; ++r)
      if (map.blocked({r, from.col})) return false;
    return true;
  }

  for (int c = from.col; c <= to.col; ++c) {
    const std::int64_t xl = std::max<std::int64_t>(2 * c, x1);
    const std::int64_t xh = std::min<std::int64_t>(2 * c + 2, x2);
    // y scaled by dx (> 0) keeps everything integral.
    const std::int64_t ya = y1 * dx + dy * (xl - x1);
    const std::int64_t yb = y1 * dx + dy * (xh - x1);
    const std::int64_t lo = std::min(ya, yb);
    const std::int64_t hi = std::max(ya, yb);
    // Rows r with 2r*dx < hi and lo < (2r+2)*dx; both bounds are positive.
    const std::int64_t span = 2 * dx;
    const int r_min = static_cast<int>(lo / span);
    const int r_max = static_cast<int>((hi + span - 1) / span) - 1;
    for (int r = std::max(r_min, 0); r <= std::min(r_max, map.rows() - 1); ++r)
      if (map.blocked({r, c})) return false;
  }
  return true;
}

}  // namespace detplace
