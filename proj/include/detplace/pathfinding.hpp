#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "detplace/geometry.hpp"
#include "detplace/instance.hpp"

namespace detplace {

/// Shortest walk through cell-center waypoints, entrance first.
struct Path {
  std::vector<CellIndex> cells;
  std::vector<Point> waypoints;
  double length = 0.0;
};

/// Prefix of a Path on which neutralization is still possible. May end in the
/// middle of a segment. An empty prefix keeps only the start point.
struct TruncatedPath {
  std::vector<Point> waypoints;
  double length = 0.0;

  int segment_count() const { return waypoints.size() < 2 ? 0 : static_cast<int>(waypoints.size()) - 1; }
  Segment segment(int k) const { return {waypoints[k], waypoints[k + 1]}; }
};

/// Undirected graph on unblocked cells; u ~ v iff line_of_sight(u, v).
/// Vertices are numbered in row-major order of their cells. Edge weights are
/// center-to-center distances in meters and are computed on demand.
class VisibilityGraph {
 public:
  VisibilityGraph() = default;

  int vertex_count() const { return static_cast<int>(cells_.size()); }
  std::int64_t edge_count() const { return static_cast<std::int64_t>(adjacency_.size()) / 2; }
  /// -1 when the cell is blocked.
  int vertex_of(CellIndex c) const { return vertex_of_[static_cast<std::size_t>(c.row) * cols_ + c.col]; }
  CellIndex cell_of(int v) const { return cells_[v]; }
  std::span<const std::uint32_t> neighbors(int v) const {
    return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
  }
  bool adjacent(int u, int v) const;
  double weight(int u, int v) const;
  Point center(int v) const;

  friend bool operator==(const VisibilityGraph&, const VisibilityGraph&) = default;

 private:
  friend VisibilityGraph assemble_graph(const GridMap&, std::vector<std::vector<std::uint32_t>>&&);

  int cols_ = 0;
  double cell_size_ = 1.0;
  std::vector<int> vertex_of_;
  std::vector<CellIndex> cells_;
  std::vector<std::int64_t> offsets_;
  std::vector<std::uint32_t> adjacency_;  // sorted within each vertex
};

/// Parallel (OpenMP) construction.
VisibilityGraph build_visibility_graph(const GridMap& map);
/// Single-threaded reference construction; produces an identical graph.
VisibilityGraph build_visibility_graph_serial(const GridMap& map);

/// Distance from every vertex to `target` (infinity when disconnected).
std::vector<double> distances_to(const VisibilityGraph& graph, int target);

/// Minimum-length path; among equal-length paths the one whose waypoint
/// vertex sequence is lexicographically smallest. Empty when disconnected.
std::optional<Path> shortest_path(const VisibilityGraph& graph, CellIndex from, CellIndex to);

/// Drops the final `cut` meters of `p`.
TruncatedPath truncate(const Path& p, double cut);

/// Entrance-by-objective matrix of paths and their truncated prefixes.
class PathMatrix {
 public:
  PathMatrix() = default;
  PathMatrix(int entrances, int objectives, std::vector<Path> paths, std::vector<TruncatedPath> truncated);

  int entrance_count() const { return entrances_; }
  int objective_count() const { return objectives_; }
  int size() const { return static_cast<int>(paths_.size()); }
  const Path& path(int i, int j) const { return paths_[i * objectives_ + j]; }
  const TruncatedPath& truncated(int i, int j) const { return truncated_[i * objectives_ + j]; }
  const Path& path(int flat) const { return paths_[flat]; }
  const TruncatedPath& truncated(int flat) const { return truncated_[flat]; }

 private:
  int entrances_ = 0;
  int objectives_ = 0;
  std::vector<Path> paths_;
  std::vector<TruncatedPath> truncated_;
};

/// All shortest paths of a validated instance, cut by v * t_n.
/// Throws std::runtime_error when some pair is disconnected.
PathMatrix all_paths(const Instance& inst, const VisibilityGraph& graph);
PathMatrix all_paths(const Instance& inst);

/// One line per (i, j): "i j length cut_length x,y x,y ..." (full path).
void write_path_dump(std::ostream& out, const PathMatrix& paths);

}  // namespace detplace
