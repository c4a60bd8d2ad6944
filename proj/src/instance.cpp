#include "detplace/instance.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "detplace/evaluation.hpp"

namespace detplace {

const char* to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::bad_dimensions: return "bad-dimensions";
    case ViolationKind::bad_parameter: return "bad-parameter";
    case ViolationKind::no_entrances: return "no-entrances";
    case ViolationKind::no_objectives: return "no-objectives";
    case ViolationKind::out_of_bounds: return "out-of-bounds";
    case ViolationKind::entrance_blocked: return "entrance-blocked";
    case ViolationKind::objective_blocked: return "objective-blocked";
    case ViolationKind::duplicate_site: return "duplicate-site";
    case ViolationKind::negative_value: return "negative-value";
    case ViolationKind::unreachable: return "unreachable";
  }
  return "unknown";
}

namespace {

std::string cell_text(CellIndex c) {
  std::ostringstream os;
  os << '(' << c.row << ',' << c.col << ')';
  return os.str();
}

}  // namespace

std::vector<Violation> validate(const Instance& inst) {
  std::vector<Violation> out;
  auto add = [&out](ViolationKind kind, std::string message) {
    out.push_back({kind, std::move(message)});
  };

  const GridMap& map = inst.map;
  if (map.rows() < 1 || map.cols() < 1 || !(map.cell_size() > 0.0)) {
    add(ViolationKind::bad_dimensions, "map must have positive dimensions and cell size");
    return out;
  }

  const Physics& ph = inst.physics;
  if (!(ph.detection_radius > 0.0)) add(ViolationKind::bad_parameter, "tau must be > 0");
  if (!(ph.detection_rate > 0.0)) add(ViolationKind::bad_parameter, "eta must be > 0");
  if (!(ph.neutralization_prob >= 0.0 && ph.neutralization_prob <= 1.0))
    add(ViolationKind::bad_parameter, "theta must lie in [0, 1]");
  if (!(ph.attacker_speed > 0.0)) add(ViolationKind::bad_parameter, "v must be > 0");
  if (!(ph.neutralization_time >= 0.0)) add(ViolationKind::bad_parameter, "tn must be >= 0");
  if (inst.detectors < 1) add(ViolationKind::bad_parameter, "delta must be >= 1");

  if (inst.entrances.empty()) add(ViolationKind::no_entrances, "at least one entrance required");
  if (inst.objectives.empty()) add(ViolationKind::no_objectives, "at least one objective required");

  std::set<CellIndex> sites;
  bool sites_ok = true;
  for (const CellIndex& e : inst.entrances) {
    if (!map.contains(e)) {
      add(ViolationKind::out_of_bounds, "entrance " + cell_text(e) + " outside map");
      sites_ok = false;
      continue;
    }
    if (map.blocked(e)) {
      add(ViolationKind::entrance_blocked, "entrance " + cell_text(e) + " is blocked");
      sites_ok = false;
    }
    if (!sites.insert(e).second)
      add(ViolationKind::duplicate_site, "site " + cell_text(e) + " used twice");
  }
  for (const Objective& o : inst.objectives) {
    if (!map.contains(o.cell)) {
      add(ViolationKind::out_of_bounds, "objective " + cell_text(o.cell) + " outside map");
      sites_ok = false;
      continue;
    }
    if (map.blocked(o.cell)) {
      add(ViolationKind::objective_blocked, "objective " + cell_text(o.cell) + " is blocked");
      sites_ok = false;
    }
    if (!(o.value >= 0.0) || !std::isfinite(o.value))
      add(ViolationKind::negative_value, "objective " + cell_text(o.cell) + " has invalid value");
    if (!sites.insert(o.cell).second)
      add(ViolationKind::duplicate_site, "site " + cell_text(o.cell) + " used twice");
  }

  if (sites_ok && !inst.entrances.empty() && !inst.objectives.empty()) {
    const std::vector<int> label = connected_components(map);
    for (const Objective& o : inst.objectives) {
      for (const CellIndex& e : inst.entrances) {
        if (label[map.flat(e)] != label[map.flat(o.cell)]) {
          add(ViolationKind::unreachable,
              "objective " + cell_text(o.cell) + " unreachable from entrance " + cell_text(e));
          break;
        }
      }
    }
  }
  return out;
}

void require_valid(const Instance& inst) {
  const auto violations = validate(inst);
  if (violations.empty()) return;
  std::string msg = "invalid instance:";
  for (const auto& v : violations) msg += std::string(" [") + to_string(v.kind) + "] " + v.message + ";";
  throw std::invalid_argument(msg);
}

void canonicalize(Instance& inst) {
  std::sort(inst.entrances.begin(), inst.entrances.end());
  std::sort(inst.objectives.begin(), inst.objectives.end(),
            [](const Objective& a, const Objective& b) { return a.cell < b.cell; });
}

std::vector<CellIndex> candidate_cells(const Instance& inst, const DominanceCounts* dominance,
                                       int delta, CandidateOptions options) {
  std::vector<CellIndex> out;
  std::set<CellIndex> objective_cells;
  if (options.forbid_objective_cells)
    for (const auto& o : inst.objectives) objective_cells.insert(o.cell);

  for (int r = 0; r < inst.map.rows(); ++r) {
    for (int c = 0; c < inst.map.cols(); ++c) {
      const CellIndex cell{r, c};
      if (inst.map.blocked(cell)) continue;
      if (dominance && dominance->at(cell) >= delta) continue;
      if (objective_cells.count(cell)) continue;
      out.push_back(cell);
    }
  }
  return out;
}

std::vector<CellIndex> candidate_cells(const Instance& inst) {
  return candidate_cells(inst, nullptr, inst.detectors);
}

}  // namespace detplace
