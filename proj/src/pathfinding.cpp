#include "detplace/pathfinding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <queue>
#include <stdexcept>

#include "detplace/io.hpp"

namespace detplace {

namespace {

std::vector<std::uint32_t> visible_above(const GridMap& map, const std::vector<CellIndex>& cells, int u) {
  std::vector<std::uint32_t> out;
  for (int v = u + 1; v < static_cast<int>(cells.size()); ++v)
    if (line_of_sight(map, cells[u], cells[v])) out.push_back(static_cast<std::uint32_t>(v));
  return out;
}

}  // namespace

VisibilityGraph assemble_graph(const GridMap& map, std::vector<std::vector<std::uint32_t>>&& upper) {
  VisibilityGraph g;
  g.cols_ = map.cols();
  g.cell_size_ = map.cell_size();
  g.cells_ = map.unblocked_cells();
  g.vertex_of_.assign(map.cell_count(), -1);
  for (int v = 0; v < static_cast<int>(g.cells_.size()); ++v) g.vertex_of_[map.flat(g.cells_[v])] = v;

  const int n = static_cast<int>(g.cells_.size());
  std::vector<std::vector<std::uint32_t>> lower(n);
  for (int u = 0; u < n; ++u)
    for (std::uint32_t v : upper[u]) lower[v].push_back(static_cast<std::uint32_t>(u));

  g.offsets_.assign(n + 1, 0);
  for (int v = 0; v < n; ++v)
    g.offsets_[v + 1] = g.offsets_[v] + static_cast<std::int64_t>(lower[v].size() + upper[v].size());
  g.adjacency_.reserve(g.offsets_[n]);
  for (int v = 0; v < n; ++v) {
    g.adjacency_.insert(g.adjacency_.end(), lower[v].begin(), lower[v].end());
    g.adjacency_.insert(g.adjacency_.end(), upper[v].begin(), upper[v].end());
    std::vector<std::uint32_t>().swap(lower[v]);
    std::vector<std::uint32_t>().swap(upper[v]);
  }
  return g;
}

VisibilityGraph build_visibility_graph_serial(const GridMap& map) {
  const std::vector<CellIndex> cells = map.unblocked_cells();
  const int n = static_cast<int>(cells.size());
  std::vector<std::vector<std::uint32_t>> upper(n);
  for (int u = 0; u < n; ++u) upper[u] = visible_above(map, cells, u);
  return assemble_graph(map, std::move(upper));
}

VisibilityGraph build_visibility_graph(const GridMap& map) {
  const std::vector<CellIndex> cells = map.unblocked_cells();
  const int n = static_cast<int>(cells.size());
  std::vector<std::vector<std::uint32_t>> upper(n);
#pragma omp parallel for schedule(dynamic, 16)
  for (int u = 0; u < n; ++u) upper[u] = visible_above(map, cells, u);
  return assemble_graph(map, std::move(upper));
}

bool VisibilityGraph::adjacent(int u, int v) const {
  const auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), static_cast<std::uint32_t>(v));
}

double VisibilityGraph::weight(int u, int v) const {
  const CellIndex a = cells_[u];
  const CellIndex b = cells_[v];
  return std::hypot(static_cast<double>(std::abs(a.row - b.row)),
                    static_cast<double>(std::abs(a.col - b.col))) *
         cell_size_;
}

Point VisibilityGraph::center(int v) const {
  const CellIndex c = cells_[v];
  return {(c.col + 0.5) * cell_size_, (c.row + 0.5) * cell_size_};
}

std::vector<double> distances_to(const VisibilityGraph& graph, int target) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(graph.vertex_count(), inf);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[target] = 0.0;
  heap.push({0.0, target});
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;
    for (std::uint32_t v : graph.neighbors(u)) {
      const double nd = d + graph.weight(u, static_cast<int>(v));
      if (nd < dist[v]) {
        dist[v] = nd;
        heap.push({nd, static_cast<int>(v)});
      }
    }
  }
  return dist;
}

namespace {

// Walks forward from `from`, always taking the smallest-index neighbor that
// stays on a shortest path to the target the distances were computed for.
Path extract_path(const VisibilityGraph& graph, const std::vector<double>& dist, int from, int to) {
  Path p;
  int u = from;
  p.cells.push_back(graph.cell_of(u));
  p.waypoints.push_back(graph.center(u));
  while (u != to) {
    const double tol = kGeometryTolerance + 1e-13 * dist[u];
    int next = -1;
    for (std::uint32_t v : graph.neighbors(u)) {
      if (dist[v] + graph.weight(u, static_cast<int>(v)) <= dist[u] + tol && dist[v] < dist[u]) {
        next = static_cast<int>(v);
        break;
      }
    }
    if (next < 0) throw std::logic_error("extract_path: inconsistent distance field");
    p.length += graph.weight(u, next);
    u = next;
    p.cells.push_back(graph.cell_of(u));
    p.waypoints.push_back(graph.center(u));
  }
  return p;
}

}  // namespace

std::optional<Path> shortest_path(const VisibilityGraph& graph, CellIndex from, CellIndex to) {
  const int s = graph.vertex_of(from);
  const int t = graph.vertex_of(to);
  if (s < 0 || t < 0) return std::nullopt;
  const std::vector<double> dist = distances_to(graph, t);
  if (!std::isfinite(dist[s])) return std::nullopt;
  return extract_path(graph, dist, s, t);
}

TruncatedPath truncate(const Path& p, double cut) {
  TruncatedPath out;
  if (p.waypoints.empty()) return out;
  out.waypoints.push_back(p.waypoints.front());
  const double keep = p.length - cut;
  if (keep <= kGeometryTolerance) return out;

  double walked = 0.0;
  for (std::size_t k = 0; k + 1 < p.waypoints.size(); ++k) {
    const Point a = p.waypoints[k];
    const Point b = p.waypoints[k + 1];
    const double seg = distance(a, b);
    if (walked + seg < keep - kGeometryTolerance) {
      out.waypoints.push_back(b);
      walked += seg;
      continue;
    }
    const double remaining = keep - walked;
    if (remaining >= seg - kGeometryTolerance) {
      out.waypoints.push_back(b);
    } else {
      const double f = remaining / seg;
      out.waypoints.push_back({a.x + f * (b.x - a.x), a.y + f * (b.y - a.y)});
    }
    break;
  }
  for (int k = 0; k < out.segment_count(); ++k) out.length += out.segment(k).length();
  return out;
}

PathMatrix::PathMatrix(int entrances, int objectives, std::vector<Path> paths,
                       std::vector<TruncatedPath> truncated)
    : entrances_(entrances),
      objectives_(objectives),
      paths_(std::move(paths)),
      truncated_(std::move(truncated)) {}

PathMatrix all_paths(const Instance& inst, const VisibilityGraph& graph) {
  const int ne = inst.entrance_count();
  const int no = inst.objective_count();
  std::vector<Path> paths(static_cast<std::size_t>(ne) * no);
  std::vector<TruncatedPath> truncated(paths.size());
  const double cut = inst.physics.cut_length();
  bool missing = false;

#pragma omp parallel for schedule(dynamic, 1) reduction(|| : missing)
  for (int j = 0; j < no; ++j) {
    const int t = graph.vertex_of(inst.objectives[j].cell);
    if (t < 0) {
      missing = true;
      continue;
    }
    const std::vector<double> dist = distances_to(graph, t);
    for (int i = 0; i < ne; ++i) {
      const int s = graph.vertex_of(inst.entrances[i]);
      if (s < 0 || !std::isfinite(dist[s])) {
        missing = true;
        continue;
      }
      const int flat = inst.path_index(i, j);
      paths[flat] = extract_path(graph, dist, s, t);
      truncated[flat] = truncate(paths[flat], cut);
    }
  }
  if (missing) throw std::runtime_error("all_paths: some entrance/objective pair is disconnected");
  return PathMatrix(ne, no, std::move(paths), std::move(truncated));
}

PathMatrix all_paths(const Instance& inst) { return all_paths(inst, build_visibility_graph(inst.map)); }

void write_path_dump(std::ostream& out, const PathMatrix& paths) {
  for (int i = 0; i < paths.entrance_count(); ++i) {
    for (int j = 0; j < paths.objective_count(); ++j) {
      const Path& p = paths.path(i, j);
      out << i << ' ' << j << ' ' << format_double(p.length) << ' ' << format_double(paths.truncated(i, j).length);
      for (const Point& w : p.waypoints) out << ' ' << format_double(w.x) << ',' << format_double(w.y);
      out << '\n';
    }
  }
}

}  // namespace detplace
