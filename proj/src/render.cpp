#include "detplace/render.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace detplace {

namespace {

struct Canvas {
  double scale;  // pixels per meter

  double px(double meters) const { return meters * scale; }
};

void open_svg(std::ostream& out, const Instance& inst, const Canvas& cv) {
  const double w = cv.px(inst.map.cols() * inst.map.cell_size());
  const double h = cv.px(inst.map.rows() * inst.map.cell_size());
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\" viewBox=\"0 0 " << w << ' ' << h << "\">\n"
      << "<rect class=\"background\" x=\"0\" y=\"0\" width=\"" << w << "\" height=\"" << h
      << "\" fill=\"#ffffff\"/>\n";
}

void draw_map(std::ostream& out, const Instance& inst, const Canvas& cv) {
  const GridMap& map = inst.map;
  const double s = cv.px(map.cell_size());
  out << "<g class=\"blocked\" fill=\"#555555\">\n";
  for (int r = 0; r < map.rows(); ++r) {
    // Merge horizontal runs to keep the file small.
    for (int c = 0; c < map.cols();) {
      if (!map.blocked({r, c})) {
        ++c;
        continue;
      }
      int end = c;
      while (end < map.cols() && map.blocked({r, end})) ++end;
      out << "<rect x=\"" << c * s << "\" y=\"" << r * s << "\" width=\"" << (end - c) * s << "\" height=\"" << s
          << "\"/>\n";
      c = end;
    }
  }
  out << "</g>\n";
}

void draw_sites(std::ostream& out, const Instance& inst, const Canvas& cv) {
  const double s = cv.px(inst.map.cell_size());
  out << "<g class=\"entrances\" fill=\"#1f77b4\">\n";
  for (const CellIndex& e : inst.entrances) {
    const Point p = inst.map.center(e);
    out << "<rect x=\"" << cv.px(p.x) - 0.4 * s << "\" y=\"" << cv.px(p.y) - 0.4 * s << "\" width=\"" << 0.8 * s
        << "\" height=\"" << 0.8 * s << "\"/>\n";
  }
  out << "</g>\n";

  double max_value = 0.0;
  for (const auto& o : inst.objectives) max_value = std::max(max_value, o.value);
  out << "<g class=\"objectives\" fill=\"#d62728\" fill-opacity=\"0.8\">\n";
  for (const auto& o : inst.objectives) {
    const Point p = inst.map.center(o.cell);
    const double rel = max_value > 0.0 ? std::sqrt(o.value / max_value) : 1.0;
    out << "<circle cx=\"" << cv.px(p.x) << "\" cy=\"" << cv.px(p.y) << "\" r=\"" << s * (0.25 + 0.75 * rel)
        << "\"/>\n";
  }
  out << "</g>\n";
}

void draw_polyline(std::ostream& out, const Path& p, const Canvas& cv, const char* cls, const char* style) {
  out << "<polyline class=\"" << cls << "\" fill=\"none\" " << style << " points=\"";
  for (std::size_t k = 0; k < p.waypoints.size(); ++k) {
    if (k) out << ' ';
    out << cv.px(p.waypoints[k].x) << ',' << cv.px(p.waypoints[k].y);
  }
  out << "\"/>\n";
}

}  // namespace

void render_svg(std::ostream& out, const Instance& inst, const RenderOptions& options) {
  const Canvas cv{options.pixels_per_cell / inst.map.cell_size()};
  open_svg(out, inst, cv);
  draw_map(out, inst, cv);
  draw_sites(out, inst, cv);
  out << "</svg>\n";
}

void render_svg(std::ostream& out, const Instance& inst, const PathMatrix& paths, const Placement& placement,
                const std::optional<EvalResult>& evaluation, const RenderOptions& options) {
  const Canvas cv{options.pixels_per_cell / inst.map.cell_size()};
  open_svg(out, inst, cv);
  draw_map(out, inst, cv);

  out << "<g class=\"paths\">\n";
  for (int i = 0; i < paths.entrance_count(); ++i)
    for (int j = 0; j < paths.objective_count(); ++j)
      draw_polyline(out, paths.path(i, j), cv, "path", "stroke=\"#888888\" stroke-opacity=\"0.35\" stroke-width=\"1\"");
  out << "</g>\n";

  out << "<g class=\"detectors\">\n";
  for (const CellIndex& c : placement.cells) {
    const Point p = inst.map.center(c);
    out << "<circle class=\"detector-range\" cx=\"" << cv.px(p.x) << "\" cy=\"" << cv.px(p.y) << "\" r=\""
        << cv.px(inst.physics.detection_radius)
        << "\" fill=\"#2ca02c\" fill-opacity=\"0.15\" stroke=\"#2ca02c\" stroke-width=\"1\"/>\n";
    out << "<circle class=\"detector\" cx=\"" << cv.px(p.x) << "\" cy=\"" << cv.px(p.y) << "\" r=\""
        << cv.px(inst.map.cell_size()) * 0.3 << "\" fill=\"#2ca02c\"/>\n";
  }
  out << "</g>\n";

  if (evaluation && evaluation->critical) {
    const auto [i, j] = *evaluation->critical;
    draw_polyline(out, paths.path(i, j), cv, "critical", "stroke=\"#ff0000\" stroke-width=\"3\"");
  }
  draw_sites(out, inst, cv);
  out << "</svg>\n";
}

}  // namespace detplace
