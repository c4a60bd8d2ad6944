#pragma once

#include <iosfwd>
#include <optional>

#include "detplace/evaluation.hpp"
#include "detplace/instance.hpp"
#include "detplace/pathfinding.hpp"

namespace detplace {

struct RenderOptions {
  double pixels_per_cell = 10.0;
};

/// Map-only SVG: blocked cells, entrances, objectives scaled by value.
void render_svg(std::ostream& out, const Instance& inst, const RenderOptions& options = {});

/// Map plus every path (faint), detector disks of radius tau, and, under the
/// worst-case model, the critical path drawn with class "critical".
void render_svg(std::ostream& out, const Instance& inst, const PathMatrix& paths, const Placement& placement,
                const std::optional<EvalResult>& evaluation, const RenderOptions& options = {});

}  // namespace detplace
