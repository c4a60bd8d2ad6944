#pragma once

#include <string>
#include <vector>

#include "detplace/grid.hpp"

namespace detplace {

struct Objective {
  CellIndex cell;
  double value = 0.0;  // expected casualties C_j when attacked undisturbed

  friend bool operator==(const Objective&, const Objective&) = default;
};

/// Detector and attacker physics shared by every path of an instance.
struct Physics {
  double detection_radius = 20.0;    // tau, meters
  double detection_rate = 0.06;      // eta, per meter inside a detector disk
  double neutralization_prob = 0.6;  // theta
  double attacker_speed = 1.0;       // v, m/s
  double neutralization_time = 10.0; // t_n, seconds

  /// Length cut from the end of every path: v * t_n.
  double cut_length() const { return attacker_speed * neutralization_time; }

  friend bool operator==(const Physics&, const Physics&) = default;
};

/// A placement problem. Entrances and objectives are kept in row-major order,
/// which is also the order the map file format stores them in.
struct Instance {
  GridMap map;
  std::vector<CellIndex> entrances;
  std::vector<Objective> objectives;
  Physics physics;
  int detectors = 1;  // delta

  int entrance_count() const { return static_cast<int>(entrances.size()); }
  int objective_count() const { return static_cast<int>(objectives.size()); }
  int path_count() const { return entrance_count() * objective_count(); }
  /// Flat path index of (entrance i, objective j).
  int path_index(int i, int j) const { return i * objective_count() + j; }

  friend bool operator==(const Instance&, const Instance&) = default;
};

enum class ViolationKind {
  bad_dimensions,
  bad_parameter,
  no_entrances,
  no_objectives,
  out_of_bounds,
  entrance_blocked,
  objective_blocked,
  duplicate_site,
  negative_value,
  unreachable,
};

struct Violation {
  ViolationKind kind;
  std::string message;
};

const char* to_string(ViolationKind kind);

/// Every broken invariant of `inst`, including (entrance, objective) pairs
/// that have no path. Empty means the instance is solvable.
std::vector<Violation> validate(const Instance& inst);

/// Throws std::invalid_argument listing the violations, if any.
void require_valid(const Instance& inst);

/// Sorts entrances and objectives into row-major order.
void canonicalize(Instance& inst);

struct DominanceCounts;

struct CandidateOptions {
  bool forbid_objective_cells = false;
};

/// Unblocked cells in row-major order, minus those dominated by at least
/// `delta` other cells when dominance counts are supplied.
std::vector<CellIndex> candidate_cells(const Instance& inst, const DominanceCounts* dominance,
                                       int delta, CandidateOptions options = {});
std::vector<CellIndex> candidate_cells(const Instance& inst);

/// A set of detector cells, kept sorted row-major.
struct Placement {
  std::vector<CellIndex> cells;

  int size() const { return static_cast<int>(cells.size()); }
  friend bool operator==(const Placement&, const Placement&) = default;
};

}  // namespace detplace
