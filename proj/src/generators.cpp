#include "detplace/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace detplace {

const char* to_string(MapClass c) {
  switch (c) {
    case MapClass::harbour: return "harbour";
    case MapClass::newtown: return "newtown";
    case MapClass::oldtown: return "oldtown";
  }
  return "unknown";
}

std::optional<MapClass> parse_map_class(std::string_view text) {
  if (text == "harbour") return MapClass::harbour;
  if (text == "newtown") return MapClass::newtown;
  if (text == "oldtown") return MapClass::oldtown;
  return std::nullopt;
}

GenParams GenParams::defaults(MapClass c) {
  GenParams p;
  p.map_class = c;
  p.physics.neutralization_time = 10.0;
  p.physics.neutralization_prob = 0.6;
  if (c == MapClass::harbour) {
    p.physics.detection_radius = 500.0;
    p.physics.detection_rate = 0.006;
    p.physics.attacker_speed = 20.0;
    p.density = {9e7, 1.8e6};
  } else {
    p.physics.detection_radius = 20.0;
    p.physics.detection_rate = 0.06;
    p.physics.attacker_speed = 1.0;
    p.density = {0.4, 0.1};
  }
  return p;
}

namespace {

double cell_size_for(MapClass c) { return c == MapClass::harbour ? 200.0 : 5.0; }

}  // namespace

int margin_cells(int extent, double fraction) {
  return static_cast<int>(std::ceil(fraction * extent - 1e-9));
}

void assign_values(Instance& inst, const DensityDistribution& density, const CasualtyModel& model, Rng& rng) {
  const double floor_density = 1e-6 * density.mean;
  for (Objective& o : inst.objectives) {
    const double rho = std::max(rng.normal(density.mean, density.stddev), floor_density);
    o.value = model(rho);
  }
}

namespace {

constexpr int kDr[4] = {-1, 0, 1, 0};  // N, E, S, W
constexpr int kDc[4] = {0, 1, 0, -1};

bool outside_margin(const GridMap& map, CellIndex c, double fraction) {
  const int mr = margin_cells(map.rows(), fraction);
  const int mc = margin_cells(map.cols(), fraction);
  return c.row >= mr && c.row < map.rows() - mr && c.col >= mc && c.col < map.cols() - mc;
}

// Label of the largest 8-connected open region, or -1 when the map is closed.
int largest_component(const std::vector<int>& label, int count) {
  if (count == 0) return -1;
  std::vector<int> size(count, 0);
  for (int l : label)
    if (l >= 0) ++size[l];
  return static_cast<int>(std::max_element(size.begin(), size.end()) - size.begin());
}

template <class T>
void partial_shuffle(std::vector<T>& v, std::size_t k, Rng& rng) {
  for (std::size_t i = 0; i < k && i < v.size(); ++i) std::swap(v[i], v[i + rng.index(v.size() - i)]);
}

// Picks entrances on the border of the main region; false if too few exist.
bool place_entrances(Instance& inst, const GenParams& params, Rng& rng) {
  const GridMap& map = inst.map;
  int count = 0;
  const auto label = connected_components(map, &count);
  const int main = largest_component(label, count);
  if (main < 0) return false;
  std::vector<CellIndex> pool;
  for (const CellIndex& c : map.unblocked_cells()) {
    if (!map.on_border(c) || label[map.flat(c)] != main) continue;
    const bool is_objective = std::any_of(inst.objectives.begin(), inst.objectives.end(),
                                          [&](const Objective& o) { return o.cell == c; });
    if (!is_objective) pool.push_back(c);
  }
  const int want = static_cast<int>(rng.uniform_int(params.entrances.lo, params.entrances.hi));
  if (static_cast<int>(pool.size()) < want) return false;
  partial_shuffle(pool, want, rng);
  inst.entrances.assign(pool.begin(), pool.begin() + want);
  return true;
}

// Town objectives: uniform over open cells of the main region off the margin.
bool place_town_objectives(Instance& inst, const GenParams& params, Rng& rng) {
  const GridMap& map = inst.map;
  int count = 0;
  const auto label = connected_components(map, &count);
  const int main = largest_component(label, count);
  if (main < 0) return false;
  std::vector<CellIndex> pool;
  for (const CellIndex& c : map.unblocked_cells())
    if (label[map.flat(c)] == main && outside_margin(map, c, params.border_margin)) pool.push_back(c);
  const int want = static_cast<int>(rng.uniform_int(params.objectives.lo, params.objectives.hi));
  if (static_cast<int>(pool.size()) < want) return false;
  partial_shuffle(pool, want, rng);
  inst.objectives.clear();
  for (int k = 0; k < want; ++k) inst.objectives.push_back({pool[k], 0.0});
  return true;
}

Instance blank_instance(const GenParams& params) {
  Instance inst;
  inst.map = GridMap(params.rows, params.cols, cell_size_for(params.map_class));
  inst.map.fill(true);
  inst.physics = params.physics;
  inst.detectors = params.detectors;
  return inst;
}

template <class Draft>
Generated generate_with_retries(const GenParams& params, Draft draft) {
  if (params.rows < 3 || params.cols < 3) throw std::invalid_argument("generator: map too small");
  if (params.entrances.lo < 1 || params.entrances.hi < params.entrances.lo || params.objectives.lo < 1 ||
      params.objectives.hi < params.objectives.lo)
    throw std::invalid_argument("generator: bad entrance/objective ranges");
  for (int attempt = 0; attempt < params.max_attempts; ++attempt) {
    Rng rng(derive_seed(params.seed, to_string(params.map_class), static_cast<std::uint64_t>(attempt)));
    Generated g;
    g.instance = blank_instance(params);
    if (!draft(g, rng)) continue;
    assign_values(g.instance, params.density, linear_casualty_model(params.lethal_area), rng);
    canonicalize(g.instance);
    if (!validate(g.instance).empty()) continue;
    g.report.attempts = attempt + 1;
    return g;
  }
  throw GenerationError(params.seed, std::string("no valid ") + to_string(params.map_class) + " map after " +
                                         std::to_string(params.max_attempts) + " attempts");
}

// ---------------------------------------------------------------------------
// harbour

void diffuse(GridMap& map, const double decay[4], Rng& rng) {
  struct Visit {
    CellIndex cell;
    double p;
  };
  std::vector<Visit> stack{{{map.rows() / 2, map.cols() / 2}, 1.0}};
  while (!stack.empty()) {
    const Visit v = stack.back();
    stack.pop_back();
    if (!map.blocked(v.cell)) continue;
    if (!(rng.uniform01() < v.p)) continue;
    map.set_blocked(v.cell, false);
    // Pushed in reverse so that the north branch is explored first.
    for (int d = 3; d >= 0; --d) {
      const CellIndex n{v.cell.row + kDr[d], v.cell.col + kDc[d]};
      if (map.contains(n) && map.blocked(n)) stack.push_back({n, v.p * decay[d]});
    }
  }
}

// Majority vote over the 3x3 block (cells outside the map do not vote; a tie
// keeps the current state). Returns false once a sweep changes nothing.
bool smooth_once(GridMap& map) {
  GridMap next = map;
  bool changed = false;
  for (int r = 0; r < map.rows(); ++r) {
    for (int c = 0; c < map.cols(); ++c) {
      int blocked = 0;
      int total = 0;
      for (int dr = -1; dr <= 1; ++dr)
        for (int dc = -1; dc <= 1; ++dc) {
          const CellIndex n{r + dr, c + dc};
          if (!map.contains(n)) continue;
          ++total;
          blocked += map.blocked(n) ? 1 : 0;
        }
      const bool current = map.blocked({r, c});
      bool value = current;
      if (2 * blocked > total) value = true;
      else if (2 * blocked < total) value = false;
      if (value != current) {
        next.set_blocked({r, c}, value);
        changed = true;
      }
    }
  }
  map = std::move(next);
  return changed;
}

bool place_coastline_objectives(Generated& g, const GenParams& params, Rng& rng) {
  GridMap& map = g.instance.map;
  int count = 0;
  const auto label = connected_components(map, &count);
  const int main = largest_component(label, count);
  if (main < 0) return false;
  std::vector<CellIndex> water;
  for (const CellIndex& c : map.unblocked_cells())
    if (label[map.flat(c)] == main) water.push_back(c);

  const GridMap coast = map;
  const int want = static_cast<int>(rng.uniform_int(params.objectives.lo, params.objectives.hi));
  constexpr int kMaxWalks = 200;
  constexpr int kMaxSteps = 100000;
  for (int k = 0; k < want; ++k) {
    bool placed = false;
    for (int walk = 0; walk < kMaxWalks && !placed; ++walk) {
      // Walks run on the coastline as it was before any objective was cut,
      // so every objective touches the original water.
      CellIndex pos = water[rng.index(water.size())];
      for (int step = 0; step < kMaxSteps; ++step) {
        int d;
        CellIndex next;
        do {
          d = static_cast<int>(rng.index(4));
          next = {pos.row + kDr[d], pos.col + kDc[d]};
        } while (!map.contains(next));
        pos = next;
        if (coast.blocked(pos)) break;
      }
      if (!coast.blocked(pos) || !map.blocked(pos) || !outside_margin(map, pos, params.border_margin)) continue;
      map.set_blocked(pos, false);
      g.instance.objectives.push_back({pos, 0.0});
      g.report.coastline_objectives.push_back(pos);
      placed = true;
    }
    if (!placed) return false;
  }
  return true;
}

}  // namespace

Generated gen_harbour(const GenParams& params) {
  return generate_with_retries(params, [&params](Generated& g, Rng& rng) {
    GridMap& map = g.instance.map;
    double decay[4];
    for (double& b : decay) b = rng.uniform(params.decay.lo, params.decay.hi);
    diffuse(map, decay, rng);
    for (int it = 0; it < params.smoothing_iterations && smooth_once(map); ++it) {
    }
    std::vector<std::uint8_t> before(map.cell_count());
    for (int i = 0; i < map.cell_count(); ++i) before[i] = map.blocked(map.unflat(i)) ? 1 : 0;
    if (!place_coastline_objectives(g, params, rng)) return false;
    g.report.blocked_before_objectives = std::move(before);
    return place_entrances(g.instance, params, rng);
  });
}

// ---------------------------------------------------------------------------
// newtown

namespace {

int sample_width(const std::vector<double>& probs, Rng& rng) {
  const double total = std::accumulate(probs.begin(), probs.end(), 0.0);
  double u = rng.uniform01() * total;
  for (std::size_t w = 0; w < probs.size(); ++w) {
    if (u < probs[w]) return static_cast<int>(w);
    u -= probs[w];
  }
  return static_cast<int>(probs.size()) - 1;
}

void open_square(GridMap& map, int r0, int c0, int side) {
  for (int r = r0; r < r0 + side; ++r)
    for (int c = c0; c < c0 + side; ++c) map.set_blocked({r, c}, false);
}

GenReport::Plaza place_plaza(GridMap& map, IntRange side_range, Rng& rng) {
  const int limit = std::min(map.rows(), map.cols());
  const int side = std::min(static_cast<int>(rng.uniform_int(side_range.lo, side_range.hi)), limit);
  const int r = static_cast<int>(rng.uniform_int(0, map.rows() - side));
  const int c = static_cast<int>(rng.uniform_int(0, map.cols() - side));
  open_square(map, r, c, side);
  return {r, c, side};
}

}  // namespace

Generated gen_newtown(const GenParams& params) {
  if (params.street_width_probs.empty()) throw std::invalid_argument("newtown: no street width probabilities");
  return generate_with_retries(params, [&params](Generated& g, Rng& rng) {
    GridMap& map = g.instance.map;
    for (int pass = 0; pass < 2; ++pass) {
      const bool vertical = pass == 0;
      const int extent = vertical ? map.cols() : map.rows();
      const int length = vertical ? map.rows() : map.cols();
      for (int pos = 0; pos < extent;) {
        const int w = sample_width(params.street_width_probs, rng);
        if (w == 0) {
          ++pos;
          continue;
        }
        const int width = std::min(w, extent - pos);
        for (int k = pos; k < pos + width; ++k)
          for (int t = 0; t < length; ++t) map.set_blocked(vertical ? CellIndex{t, k} : CellIndex{k, t}, false);
        g.report.streets.push_back({vertical, pos, width});
        pos += w + 1;
      }
    }
    const int plazas = static_cast<int>(rng.uniform_int(params.newtown_plazas.lo, params.newtown_plazas.hi));
    for (int k = 0; k < plazas; ++k) g.report.plazas.push_back(place_plaza(map, params.newtown_plaza_side, rng));
    if (map.unblocked_count() == 0) return false;
    return place_town_objectives(g.instance, params, rng) && place_entrances(g.instance, params, rng);
  });
}

// ---------------------------------------------------------------------------
// oldtown

namespace {

struct StreetSeed {
  int main;        // coordinate along the main axis
  double lateral;  // coordinate across it
  int step;        // +1 or -1 along the main axis
  bool along_rows; // main axis runs along a row (east-west street)
  int width;
  int parent;
};

double draw_slope(double max_slope, Rng& rng) {
  const double magnitude = rng.uniform(1.0, max_slope);
  return rng.bernoulli(0.5) ? magnitude : -magnitude;
}

void lay_streets(GridMap& map, std::vector<StreetSeed> pending, const GenParams& params, double max_slope,
                 GenReport& report, Rng& rng) {
  while (!pending.empty()) {
    const StreetSeed s = pending.back();
    pending.pop_back();
    const double slope = draw_slope(max_slope, rng);
    const int id = static_cast<int>(report.sloped_streets.size());
    report.sloped_streets.push_back({s.width, slope, s.parent, s.along_rows});

    const int main_extent = s.along_rows ? map.cols() : map.rows();
    const int lateral_extent = s.along_rows ? map.rows() : map.cols();
    const int lo = -(s.width - 1) / 2;
    const int hi = s.width / 2;
    double lateral = s.lateral;
    for (int m = s.main; m >= 0 && m < main_extent; m += s.step, lateral += 1.0 / slope) {
      const int center = static_cast<int>(std::lround(lateral));
      if (center < 0 || center >= lateral_extent) break;
      for (int off = lo; off <= hi; ++off) {
        const int l = center + off;
        if (l < 0 || l >= lateral_extent) continue;
        map.set_blocked(s.along_rows ? CellIndex{l, m} : CellIndex{m, l}, false);
      }
      if (s.width > 1 && rng.bernoulli(params.branch_prob)) {
        // Branches leave at right angles to the parent's main axis.
        const int step = rng.bernoulli(0.5) ? 1 : -1;
        pending.push_back({center, static_cast<double>(m), step, !s.along_rows, s.width - 1, id});
      }
    }
  }
}

}  // namespace

Generated gen_oldtown(const GenParams& params) {
  const double max_slope = params.max_slope.value_or(std::min(params.rows, params.cols) / 5.0);
  if (!(max_slope >= 1.0)) throw std::invalid_argument("oldtown: max slope must be >= 1");
  if (params.street_width < 1) throw std::invalid_argument("oldtown: street width must be >= 1");
  return generate_with_retries(params, [&params, max_slope](Generated& g, Rng& rng) {
    GridMap& map = g.instance.map;
    const int plazas = static_cast<int>(rng.uniform_int(params.oldtown_plazas.lo, params.oldtown_plazas.hi));
    for (int k = 0; k < plazas; ++k) {
      const GenReport::Plaza pz = place_plaza(map, params.oldtown_plaza_side, rng);
      g.report.plazas.push_back(pz);
      const int w = params.street_width;
      auto along = [&](int lo_edge) { return static_cast<double>(lo_edge + rng.uniform_int(0, pz.side - 1)); };
      std::vector<StreetSeed> seeds;
      seeds.push_back({pz.row - 1, along(pz.col), -1, false, w, -1});        // north
      seeds.push_back({pz.col + pz.side, along(pz.row), +1, true, w, -1});   // east
      seeds.push_back({pz.row + pz.side, along(pz.col), +1, false, w, -1});  // south
      seeds.push_back({pz.col - 1, along(pz.row), -1, true, w, -1});         // west
      std::reverse(seeds.begin(), seeds.end());
      lay_streets(map, std::move(seeds), params, max_slope, g.report, rng);
    }
    return place_town_objectives(g.instance, params, rng) && place_entrances(g.instance, params, rng);
  });
}

Generated generate(const GenParams& params) {
  switch (params.map_class) {
    case MapClass::harbour: return gen_harbour(params);
    case MapClass::newtown: return gen_newtown(params);
    case MapClass::oldtown: return gen_oldtown(params);
  }
  throw std::invalid_argument("unknown map class");
}

}  // namespace detplace
