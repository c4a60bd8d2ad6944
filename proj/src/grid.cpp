#include "detplace/grid.hpp"

#include <algorithm>
#include <stdexcept>

namespace detplace {

GridMap::GridMap(int rows, int cols, double cell_size)
    : rows_(rows), cols_(cols), cell_size_(cell_size) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("GridMap: empty dimensions");
  if (!(cell_size > 0.0)) throw std::invalid_argument("GridMap: cell_size must be positive");
  blocked_.assign(static_cast<std::size_t>(rows) * cols, 0);
}

void GridMap::fill(bool value) { std::fill(blocked_.begin(), blocked_.end(), value ? 1 : 0); }

int GridMap::unblocked_count() const {
  return static_cast<int>(std::count(blocked_.begin(), blocked_.end(), 0));
}

std::vector<CellIndex> GridMap::unblocked_cells() const {
  std::vector<CellIndex> out;
  out.reserve(unblocked_count());
  for (int i = 0; i < cell_count(); ++i)
    if (blocked_[i] == 0) out.push_back(unflat(i));
  return out;
}

std::vector<int> connected_components(const GridMap& map, int* count) {
  std::vector<int> label(map.cell_count(), -1);
  std::vector<int> stack;
  int next = 0;
  for (int start = 0; start < map.cell_count(); ++start) {
    if (label[start] >= 0 || map.blocked(map.unflat(start))) continue;
    label[start] = next;
    stack.push_back(start);
    while (!stack.empty()) {
      const CellIndex c = map.unflat(stack.back());
      stack.pop_back();
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          const CellIndex n{c.row + dr, c.col + dc};
          if ((dr == 0 && dc == 0) || !map.contains(n) || map.blocked(n)) continue;
          const int f = map.flat(n);
          if (label[f] >= 0) continue;
          label[f] = next;
          stack.push_back(f);
        }
      }
    }
    ++next;
  }
  if (count) *count = next;
  return label;
}

}  // namespace detplace
