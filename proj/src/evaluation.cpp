#include "detplace/evaluation.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace detplace {

const char* to_string(AttackerModel model) {
  switch (model) {
    case AttackerModel::uniform: return "uniform";
    case AttackerModel::proportional: return "prop";
    case AttackerModel::worst_case: return "worst";
  }
  return "unknown";
}

std::optional<AttackerModel> parse_attacker_model(std::string_view text) {
  if (text == "uniform") return AttackerModel::uniform;
  if (text == "prop" || text == "proportional") return AttackerModel::proportional;
  if (text == "worst" || text == "worst_case" || text == "worst-case") return AttackerModel::worst_case;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Detection cache

int DetectionCache::slot_of(CellIndex c) const {
  if (c.row < 0 || c.col < 0 || c.col >= cols_) return -1;
  const std::size_t f = static_cast<std::size_t>(c.row) * cols_ + c.col;
  return f < slot_of_.size() ? slot_of_[f] : -1;
}

FixedLength DetectionCache::fixed_length(int slot, int path) const {
  const auto e = entries(slot);
  const auto it = std::lower_bound(e.begin(), e.end(), path,
                                   [](const Entry& x, int p) { return x.path < p; });
  return it != e.end() && it->path == path ? it->length : 0;
}

double DetectionCache::length(int slot, int path) const { return from_fixed(fixed_length(slot, path)); }

bool operator==(const DetectionCache& a, const DetectionCache& b) {
  if (a.path_count_ != b.path_count_ || a.cells_ != b.cells_ || a.offsets_ != b.offsets_) return false;
  return std::equal(a.entries_.begin(), a.entries_.end(), b.entries_.begin(), b.entries_.end(),
                    [](const DetectionCache::Entry& x, const DetectionCache::Entry& y) {
                      return x.path == y.path && x.length == y.length;
                    });
}

double detected_length(const TruncatedPath& path, Point center, double radius) {
  double total = 0.0;
  for (int k = 0; k < path.segment_count(); ++k) total += chord_length(path.segment(k), center, radius);
  return total;
}

DetectionCache assemble_cache(int path_count, int rows_cols_hint, std::vector<CellIndex> cells,
                              std::vector<std::vector<DetectionCache::Entry>>&& rows) {
  DetectionCache cache;
  cache.path_count_ = path_count;
  cache.cells_ = std::move(cells);
  int max_row = 0;
  int max_col = 0;
  for (const auto& c : cache.cells_) {
    max_row = std::max(max_row, c.row);
    max_col = std::max(max_col, c.col);
  }
  cache.cols_ = std::max(rows_cols_hint, max_col + 1);
  cache.slot_of_.assign(static_cast<std::size_t>(max_row + 1) * cache.cols_, -1);
  for (int s = 0; s < static_cast<int>(cache.cells_.size()); ++s)
    cache.slot_of_[static_cast<std::size_t>(cache.cells_[s].row) * cache.cols_ + cache.cells_[s].col] = s;
  cache.offsets_.assign(cache.cells_.size() + 1, 0);
  for (std::size_t s = 0; s < rows.size(); ++s)
    cache.offsets_[s + 1] = cache.offsets_[s] + static_cast<std::int64_t>(rows[s].size());
  cache.entries_.reserve(cache.offsets_.back());
  for (auto& r : rows) cache.entries_.insert(cache.entries_.end(), r.begin(), r.end());
  return cache;
}

namespace {

struct PathBounds {
  Rect box;
};

std::vector<PathBounds> path_bounds(const PathMatrix& paths, double radius) {
  std::vector<PathBounds> out(paths.size());
  for (int p = 0; p < paths.size(); ++p) {
    const auto& pts = paths.truncated(p).waypoints;
    Rect r{1e300, 1e300, -1e300, -1e300};
    for (const Point& q : pts) {
      r.xmin = std::min(r.xmin, q.x);
      r.ymin = std::min(r.ymin, q.y);
      r.xmax = std::max(r.xmax, q.x);
      r.ymax = std::max(r.ymax, q.y);
    }
    r.xmin -= radius;
    r.ymin -= radius;
    r.xmax += radius;
    r.ymax += radius;
    out[p].box = r;
  }
  return out;
}

std::vector<DetectionCache::Entry> cache_row(const Instance& inst, const PathMatrix& paths,
                                             const std::vector<PathBounds>& bounds, CellIndex cell) {
  std::vector<DetectionCache::Entry> row;
  const Point center = inst.map.center(cell);
  const double radius = inst.physics.detection_radius;
  for (int p = 0; p < paths.size(); ++p) {
    const Rect& b = bounds[p].box;
    if (center.x < b.xmin || center.x > b.xmax || center.y < b.ymin || center.y > b.ymax) continue;
    const FixedLength l = to_fixed(detected_length(paths.truncated(p), center, radius));
    if (l > 0) row.push_back({p, l});
  }
  return row;
}

}  // namespace

DetectionCache build_cache_serial(const Instance& inst, const PathMatrix& paths,
                                  std::span<const CellIndex> cells) {
  const auto bounds = path_bounds(paths, inst.physics.detection_radius);
  std::vector<std::vector<DetectionCache::Entry>> rows(cells.size());
  for (std::size_t s = 0; s < cells.size(); ++s) rows[s] = cache_row(inst, paths, bounds, cells[s]);
  return assemble_cache(paths.size(), inst.map.cols(), {cells.begin(), cells.end()}, std::move(rows));
}

DetectionCache build_cache(const Instance& inst, const PathMatrix& paths, std::span<const CellIndex> cells) {
  const auto bounds = path_bounds(paths, inst.physics.detection_radius);
  std::vector<std::vector<DetectionCache::Entry>> rows(cells.size());
  const int n = static_cast<int>(cells.size());
#pragma omp parallel for schedule(dynamic, 32)
  for (int s = 0; s < n; ++s) rows[s] = cache_row(inst, paths, bounds, cells[s]);
  return assemble_cache(paths.size(), inst.map.cols(), {cells.begin(), cells.end()}, std::move(rows));
}

// ---------------------------------------------------------------------------
// Dominance

namespace {

struct DenseCoverage {
  int paths = 0;
  std::vector<FixedLength> values;  // slot-major
  std::vector<FixedLength> sums;
  int nonzero_slots = 0;

  explicit DenseCoverage(const DetectionCache& cache) : paths(cache.path_count()) {
    const int k = cache.slot_count();
    values.assign(static_cast<std::size_t>(k) * paths, 0);
    sums.assign(k, 0);
    for (int s = 0; s < k; ++s) {
      for (const auto& e : cache.entries(s)) {
        values[static_cast<std::size_t>(s) * paths + e.path] = e.length;
        sums[s] += e.length;
      }
      if (sums[s] > 0) ++nonzero_slots;
    }
  }
  const FixedLength* row(int s) const { return values.data() + static_cast<std::size_t>(s) * paths; }
};

int dominators_of(const DetectionCache& cache, const DenseCoverage& dense, int b) {
  const auto support = cache.entries(b);
  if (support.empty()) return dense.nonzero_slots;
  // a dominates b iff a >= b on b's support and a != b; given the first
  // condition, a != b is equivalent to sum(a) > sum(b).
  int count = 0;
  for (int a = 0; a < cache.slot_count(); ++a) {
    if (a == b || dense.sums[a] <= dense.sums[b]) continue;
    const FixedLength* row = dense.row(a);
    bool ok = true;
    for (const auto& e : support) {
      if (row[e.path] < e.length) {
        ok = false;
        break;
      }
    }
    if (ok) ++count;
  }
  return count;
}

}  // namespace

DominanceCounts build_dominance_serial(const DetectionCache& cache, int rows, int cols) {
  DominanceCounts out{rows, cols, std::vector<int>(static_cast<std::size_t>(rows) * cols, 0)};
  const DenseCoverage dense(cache);
  for (int b = 0; b < cache.slot_count(); ++b) {
    const CellIndex c = cache.cell(b);
    out.counts[static_cast<std::size_t>(c.row) * cols + c.col] = dominators_of(cache, dense, b);
  }
  return out;
}

DominanceCounts build_dominance(const DetectionCache& cache, int rows, int cols) {
  DominanceCounts out{rows, cols, std::vector<int>(static_cast<std::size_t>(rows) * cols, 0)};
  const DenseCoverage dense(cache);
  const int k = cache.slot_count();
#pragma omp parallel for schedule(dynamic, 16)
  for (int b = 0; b < k; ++b) {
    const CellIndex c = cache.cell(b);
    out.counts[static_cast<std::size_t>(c.row) * cols + c.col] = dominators_of(cache, dense, b);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Objective

double non_detection(const Placement& placement, int i, int j, const Instance& inst,
                     const DetectionCache& cache) {
  const int path = inst.path_index(i, j);
  FixedLength total = 0;
  for (const CellIndex& c : placement.cells) {
    const int slot = cache.slot_of(c);
    if (slot < 0) throw std::invalid_argument("non_detection: placement cell has no cache slot");
    total += cache.fixed_length(slot, path);
  }
  return non_detection_fixed(total, inst.physics.detection_rate);
}

std::vector<double> gamma(AttackerModel model, const Instance& inst, const CasualtyMatrix& per_path) {
  const int ne = inst.entrance_count();
  const int no = inst.objective_count();
  std::vector<double> g(static_cast<std::size_t>(ne) * no, 0.0);
  switch (model) {
    case AttackerModel::uniform:
      std::fill(g.begin(), g.end(), 1.0 / (static_cast<double>(ne) * no));
      break;
    case AttackerModel::proportional: {
      double total = 0.0;
      for (const auto& o : inst.objectives) total += o.value;
      if (!(total > 0.0)) throw std::domain_error("proportional model needs a positive total objective value");
      for (int i = 0; i < ne; ++i)
        for (int j = 0; j < no; ++j) g[i * no + j] = inst.objectives[j].value / (ne * total);
      break;
    }
    case AttackerModel::worst_case: {
      if (per_path.values.size() != g.size())
        throw std::invalid_argument("gamma: casualty matrix does not match instance");
      const auto it = std::max_element(per_path.values.begin(), per_path.values.end());
      g[static_cast<std::size_t>(it - per_path.values.begin())] = 1.0;
      break;
    }
  }
  return g;
}

Evaluator::Evaluator(const Instance& inst, const DetectionCache& cache, AttackerModel model)
    : cache_(&cache),
      model_(model),
      eta_(inst.physics.detection_rate),
      theta_(inst.physics.neutralization_prob),
      objectives_(inst.objective_count()) {
  if (cache.path_count() != inst.path_count())
    throw std::invalid_argument("Evaluator: cache was built for a different path matrix");
  values_.resize(inst.path_count());
  for (int i = 0; i < inst.entrance_count(); ++i)
    for (int j = 0; j < inst.objective_count(); ++j)
      values_[inst.path_index(i, j)] = inst.objectives[j].value;
  if (model != AttackerModel::worst_case) weights_ = gamma(model, inst, {});
}

void Evaluator::coverage(std::span<const int> slots, std::vector<FixedLength>& out) const {
  out.assign(values_.size(), 0);
  for (int s : slots)
    for (const auto& e : cache_->entries(s)) out[e.path] += e.length;
}

void Evaluator::path_values(std::span<const FixedLength> coverage, std::vector<double>& out) const {
  out.resize(values_.size());
  for (std::size_t p = 0; p < values_.size(); ++p) out[p] = path_value(static_cast<int>(p), coverage[p]);
}

double Evaluator::combine(std::span<const double> per_path) const {
  const double top = *std::max_element(per_path.begin(), per_path.end());
  if (model_ == AttackerModel::worst_case) return top;
  double w = 0.0;
  for (std::size_t p = 0; p < per_path.size(); ++p) w += weights_[p] * per_path[p];
  // A convex combination never exceeds its largest term; clip rounding.
  return std::min(w, top);
}

double Evaluator::value(std::span<const int> slots) const {
  std::vector<FixedLength> cov;
  std::vector<double> vals;
  coverage(slots, cov);
  path_values(cov, vals);
  return combine(vals);
}

double Evaluator::value_with(std::span<const FixedLength> base_coverage, std::span<const double> base_values,
                             int slot, std::vector<double>& scratch) const {
  std::copy(base_values.begin(), base_values.end(), scratch.begin());
  for (const auto& e : cache_->entries(slot))
    scratch[e.path] = path_value(e.path, base_coverage[e.path] + e.length);
  return combine(scratch);
}

EvalResult Evaluator::evaluate(std::span<const int> slots) const {
  EvalResult r;
  std::vector<FixedLength> cov;
  coverage(slots, cov);
  r.per_path.entrances = static_cast<int>(values_.size()) / std::max(objectives_, 1);
  r.per_path.objectives = objectives_;
  path_values(cov, r.per_path.values);
  r.total = combine(r.per_path.values);
  if (model_ == AttackerModel::worst_case) {
    const auto it = std::max_element(r.per_path.values.begin(), r.per_path.values.end());
    const int flat = static_cast<int>(it - r.per_path.values.begin());
    r.critical = std::make_pair(flat / objectives_, flat % objectives_);
  }
  return r;
}

namespace {

std::vector<int> slots_for(const Placement& placement, const DetectionCache& cache) {
  std::vector<int> slots;
  for (const CellIndex& c : placement.cells) {
    const int s = cache.slot_of(c);
    if (s < 0) throw std::invalid_argument("placement cell has no cache slot");
    slots.push_back(s);
  }
  return slots;
}

}  // namespace

EvalResult evaluate(const Placement& placement, const Instance& inst, const DetectionCache& cache,
                    AttackerModel model) {
  const Evaluator ev(inst, cache, model);
  const auto slots = slots_for(placement, cache);
  return ev.evaluate(slots);
}

EvalResult evaluate_direct(const Placement& placement, const Instance& inst, const PathMatrix& paths,
                           AttackerModel model) {
  EvalResult r;
  r.per_path.entrances = inst.entrance_count();
  r.per_path.objectives = inst.objective_count();
  r.per_path.values.resize(inst.path_count());
  const Physics& ph = inst.physics;
  for (int i = 0; i < inst.entrance_count(); ++i) {
    for (int j = 0; j < inst.objective_count(); ++j) {
      double covered = 0.0;
      for (const CellIndex& c : placement.cells)
        covered += detected_length(paths.truncated(i, j), inst.map.center(c), ph.detection_radius);
      const double nd = std::exp(-ph.detection_rate * covered);
      r.per_path.values[inst.path_index(i, j)] =
          path_casualties(nd, inst.objectives[j].value, ph.neutralization_prob);
    }
  }
  const std::vector<double> g = gamma(model, inst, r.per_path);
  for (std::size_t p = 0; p < g.size(); ++p) r.total += g[p] * r.per_path.values[p];
  r.total = std::min(r.total, *std::max_element(r.per_path.values.begin(), r.per_path.values.end()));
  if (model == AttackerModel::worst_case) {
    const auto it = std::find(g.begin(), g.end(), 1.0);
    const int flat = static_cast<int>(it - g.begin());
    r.critical = std::make_pair(flat / inst.objective_count(), flat % inst.objective_count());
  }
  return r;
}

}  // namespace detplace
