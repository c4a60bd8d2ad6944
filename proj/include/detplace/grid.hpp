#pragma once

#include <compare>
#include <cstdint>
#include <vector>

namespace detplace {

/// Row/column address of a map cell. Ordering is row-major.
struct CellIndex {
  int row = 0;
  int col = 0;

  friend auto operator<=>(const CellIndex&, const CellIndex&) = default;
};

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

/// Axis-aligned rectangle, xmin < xmax and ymin < ymax.
struct Rect {
  double xmin = 0.0;
  double ymin = 0.0;
  double xmax = 0.0;
  double ymax = 0.0;
};

/// Discretized area of rows x cols square cells. Cell (r, c) spans
/// [c*s, (c+1)*s] x [r*s, (r+1)*s] in the plane, with x along columns.
class GridMap {
 public:
  GridMap() = default;
  GridMap(int rows, int cols, double cell_size);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double cell_size() const { return cell_size_; }
  int cell_count() const { return rows_ * cols_; }

  bool contains(CellIndex c) const {
    return c.row >= 0 && c.row < rows_ && c.col >= 0 && c.col < cols_;
  }
  bool on_border(CellIndex c) const {
    return c.row == 0 || c.col == 0 || c.row == rows_ - 1 || c.col == cols_ - 1;
  }
  int flat(CellIndex c) const { return c.row * cols_ + c.col; }
  CellIndex unflat(int index) const { return {index / cols_, index % cols_}; }

  bool blocked(CellIndex c) const { return blocked_[flat(c)] != 0; }
  void set_blocked(CellIndex c, bool value) { blocked_[flat(c)] = value ? 1 : 0; }
  void fill(bool value);

  int unblocked_count() const;
  std::vector<CellIndex> unblocked_cells() const;

  Point center(CellIndex c) const {
    return {(c.col + 0.5) * cell_size_, (c.row + 0.5) * cell_size_};
  }
  Rect rect(CellIndex c) const {
    return {c.col * cell_size_, c.row * cell_size_, (c.col + 1) * cell_size_,
            (c.row + 1) * cell_size_};
  }

  friend bool operator==(const GridMap&, const GridMap&) = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  double cell_size_ = 1.0;
  std::vector<std::uint8_t> blocked_;
};

/// Labels unblocked cells by 8-connected component (-1 for blocked cells).
/// Under the open-interior passability rule these are exactly the connected
/// components of the visibility graph.
std::vector<int> connected_components(const GridMap& map, int* count = nullptr);

}  // namespace detplace
