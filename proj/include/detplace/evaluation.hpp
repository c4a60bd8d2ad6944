#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "detplace/instance.hpp"
#include "detplace/pathfinding.hpp"

namespace detplace {

enum class AttackerModel { uniform, proportional, worst_case };

const char* to_string(AttackerModel model);
/// Accepts "uniform", "prop"/"proportional", "worst"/"worst_case".
std::optional<AttackerModel> parse_attacker_model(std::string_view text);

/// Detected lengths are stored as integers in units of 2^-44 m. Sums of
/// coverage are then exact, so a placement's value does not depend on the
/// order its detectors were added in.
using FixedLength = std::int64_t;
inline constexpr double kFixedScale = 17592186044416.0;  // 2^44, room for 524 km per path

inline FixedLength to_fixed(double meters) { return static_cast<FixedLength>(std::llround(meters * kFixedScale)); }
inline double from_fixed(FixedLength units) { return static_cast<double>(units) / kFixedScale; }

/// Per-cell detected lengths l_ijk on every truncated path. Rows ("slots")
/// follow the cell list the cache was built for; zero entries are omitted.
class DetectionCache {
 public:
  struct Entry {
    std::int32_t path;
    FixedLength length;
  };

  DetectionCache() = default;

  int slot_count() const { return static_cast<int>(cells_.size()); }
  int path_count() const { return path_count_; }
  CellIndex cell(int slot) const { return cells_[slot]; }
  const std::vector<CellIndex>& cells() const { return cells_; }
  /// -1 when the cell has no slot.
  int slot_of(CellIndex c) const;
  std::span<const Entry> entries(int slot) const {
    return {entries_.data() + offsets_[slot], entries_.data() + offsets_[slot + 1]};
  }
  /// Detected length in meters (0 when not stored).
  double length(int slot, int path) const;
  FixedLength fixed_length(int slot, int path) const;

  friend bool operator==(const DetectionCache&, const DetectionCache&);

 private:
  friend DetectionCache assemble_cache(int, int, std::vector<CellIndex>, std::vector<std::vector<Entry>>&&);

  int path_count_ = 0;
  int cols_ = 0;
  std::vector<CellIndex> cells_;
  std::vector<int> slot_of_;  // row-major over the map
  std::vector<std::int64_t> offsets_;
  std::vector<Entry> entries_;
};

/// Parallel (OpenMP) build over `cells`.
DetectionCache build_cache(const Instance& inst, const PathMatrix& paths, std::span<const CellIndex> cells);
/// Single-threaded reference build; identical output.
DetectionCache build_cache_serial(const Instance& inst, const PathMatrix& paths,
                                  std::span<const CellIndex> cells);

/// Detected length of a truncated path for a detector at `center`.
double detected_length(const TruncatedPath& path, Point center, double radius);

/// Number of other cached cells whose coverage vector Pareto-dominates each
/// cell's (>= on every path, > on at least one). Zero for cells without slot.
struct DominanceCounts {
  int rows = 0;
  int cols = 0;
  std::vector<int> counts;

  int at(CellIndex c) const { return counts[static_cast<std::size_t>(c.row) * cols + c.col]; }
  friend bool operator==(const DominanceCounts&, const DominanceCounts&) = default;
};

DominanceCounts build_dominance(const DetectionCache& cache, int rows, int cols);
DominanceCounts build_dominance_serial(const DetectionCache& cache, int rows, int cols);

/// Probability that one detector fires on a path segment of length `l`.
inline double detection_prob(double l, double eta) { return 1.0 - std::exp(-eta * l); }

/// Probability of crossing all detectors undetected given total detected
/// length (fixed point).
inline double non_detection_fixed(FixedLength total, double eta) { return std::exp(-eta * from_fixed(total)); }

/// Expected casualties on one path given its non-detection probability.
inline double path_casualties(double non_detection, double value, double theta) {
  return value * (non_detection * theta + (1.0 - theta));
}

/// Non-detection probability of path (i, j) under `placement`.
double non_detection(const Placement& placement, int i, int j, const Instance& inst,
                     const DetectionCache& cache);

/// Row-major i * phi + j matrix of expected casualties per path.
struct CasualtyMatrix {
  int entrances = 0;
  int objectives = 0;
  std::vector<double> values;

  double at(int i, int j) const { return values[i * objectives + j]; }
};

/// Path selection probabilities. For worst_case all mass goes to the first
/// maximizer of `per_path` in (i, j) order. Throws std::domain_error for the
/// proportional model when all objective values are zero.
std::vector<double> gamma(AttackerModel model, const Instance& inst, const CasualtyMatrix& per_path);

struct EvalResult {
  double total = 0.0;  // W
  CasualtyMatrix per_path;
  std::optional<std::pair<int, int>> critical;
};

/// Evaluates placements given as cache slots. Pure and thread-safe.
class Evaluator {
 public:
  Evaluator(const Instance& inst, const DetectionCache& cache, AttackerModel model);

  AttackerModel model() const { return model_; }
  const DetectionCache& cache() const { return *cache_; }
  int path_count() const { return static_cast<int>(values_.size()); }

  double value(std::span<const int> slots) const;
  EvalResult evaluate(std::span<const int> slots) const;

  /// Per-path coverage of a set of slots.
  void coverage(std::span<const int> slots, std::vector<FixedLength>& out) const;
  /// W for each path from coverage.
  void path_values(std::span<const FixedLength> coverage, std::vector<double>& out) const;
  double path_value(int path, FixedLength coverage) const {
    return path_casualties(non_detection_fixed(coverage, eta_), values_[path], theta_);
  }
  /// Combines per-path values into W; identical arithmetic for every caller.
  double combine(std::span<const double> per_path) const;

  /// Value of `base` plus one more slot, where `base_coverage`/`base_values`
  /// describe `base`. `scratch` must have path_count() entries. Bitwise equal
  /// to value() of the extended set.
  double value_with(std::span<const FixedLength> base_coverage, std::span<const double> base_values,
                    int slot, std::vector<double>& scratch) const;

 private:
  const DetectionCache* cache_;
  AttackerModel model_;
  double eta_;
  double theta_;
  int objectives_;
  std::vector<double> values_;  // C_j per flat path
  std::vector<double> weights_; // gamma per flat path (fixed models only)
};

/// Evaluates a placement of map cells through the cache.
EvalResult evaluate(const Placement& placement, const Instance& inst, const DetectionCache& cache,
                    AttackerModel model);

/// Same quantity computed directly from path geometry without the cache.
EvalResult evaluate_direct(const Placement& placement, const Instance& inst, const PathMatrix& paths,
                           AttackerModel model);

}  // namespace detplace
