#include <doctest.h>

#include <random>

#include "detplace/geometry.hpp"
#include "oracles.hpp"

using namespace detplace;

TEST_SUITE("geometry") {

TEST_CASE("chord_length examples") {
  CHECK(chord_length({{-2, 0}, {2, 0}}, {0, 0}, 1.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(chord_length({{0, 5}, {10, 5}}, {0, 0}, 1.0) == 0.0);
  CHECK(chord_length({{0, 1}, {10, 1}}, {5, 1}, 3.0) == doctest::Approx(6.0).epsilon(1e-15));

  std::mt19937_64 gen(7);
  const Segment s{{0, 0}, {4, 3}};
  const double mc = oracle::chord_monte_carlo(s.a, s.b, {2, 2}, 1.0, 1000000, gen);
  CHECK(std::abs(chord_length(s, {2, 2}, 1.0) - mc) <= 1e-3 * mc);
}

TEST_CASE("chord_length edge cases") {
  // Segment wholly inside.
  CHECK(chord_length({{0, 0}, {1, 0}}, {0.5, 0}, 5.0) == doctest::Approx(1.0));
  // Tangent line touches in a single point.
  CHECK(chord_length({{-5, 1}, {5, 1}}, {0, 0}, 1.0) == doctest::Approx(0.0).epsilon(1e-12));
  // Zero-length segment.
  CHECK(chord_length({{0.2, 0.1}, {0.2, 0.1}}, {0, 0}, 1.0) == 0.0);
  // Ends exactly at the center.
  CHECK(chord_length({{-3, 0}, {0, 0}}, {0, 0}, 2.0) == doctest::Approx(2.0));
}

TEST_CASE("chord_length properties") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  std::uniform_real_distribution<double> ur(0.5, 30.0);
  for (int k = 0; k < 5000; ++k) {
    const Point a{u(gen), u(gen)}, b{u(gen), u(gen)}, c{u(gen) / 2, u(gen) / 2};
    const double r = ur(gen);
    const Segment s{a, b};
    const double len = s.length();
    const double v = chord_length(s, c, r);
    CHECK(v >= 0.0);
    CHECK(v <= len + 1e-9);
    CHECK(v <= 2 * r + 1e-9);
    CHECK(chord_length({b, a}, c, r) == doctest::Approx(v).epsilon(1e-12).scale(len));
    const double t = std::uniform_real_distribution<double>(0.0, 1.0)(gen);
    const Point m{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
    CHECK(std::abs(chord_length({a, m}, c, r) + chord_length({m, b}, c, r) - v) <= 1e-9 * std::max(len, 1.0));
    CHECK(chord_length(s, c, r * 0.7) <= v + 1e-12);
    CHECK(std::abs(v - oracle::coverage({{a, b}, len}, c, r)) <= 1e-9 * std::max(len, 1.0));
  }
}

TEST_CASE("segment_intersects_cell examples") {
  const Rect cell{0, 0, 1, 1};
  CHECK(segment_intersects_cell({{-1, 0.5}, {2, 0.5}}, cell));
  CHECK_FALSE(segment_intersects_cell({{-1, 0}, {2, 0}}, cell));  // along an edge
  CHECK_FALSE(segment_intersects_cell({{0, 1}, {1, 1}}, cell));
  CHECK_FALSE(segment_intersects_cell({{3, 3}, {4, 5}}, cell));
  CHECK_FALSE(segment_intersects_cell({{-1, 1}, {1, -1}}, cell));  // corner point only
  CHECK(segment_intersects_cell({{0.5, 0.5}, {0.5, 0.5}}, cell));  // point inside
  CHECK_FALSE(segment_intersects_cell({{1, 0.5}, {1, 0.5}}, cell));
  CHECK(segment_intersects_cell({{0, 0}, {1, 1}}, cell));  // diagonal
}

TEST_CASE("segment_intersects_cell agrees with exact rational test") {
  std::mt19937_64 gen(3);
  std::uniform_int_distribution<int> u(-6, 6);
  for (int k = 0; k < 20000; ++k) {
    const int x0 = u(gen), y0 = u(gen), x1 = u(gen), y1 = u(gen);
    const int bx = u(gen) / 2, by = u(gen) / 2;
    const int w = 1 + std::abs(u(gen)) / 2, h = 1 + std::abs(u(gen)) / 2;
    const bool expect = oracle::open_box_hit(x0, y0, x1, y1, bx, bx + w, by, by + h);
    // Scale by a cell size to exercise non-unit geometry.
    const double s = 5.0;
    const bool got = segment_intersects_cell({{x0 * s, y0 * s}, {x1 * s, y1 * s}},
                                             Rect{bx * s, by * s, (bx + w) * s, (by + h) * s});
    CHECK_MESSAGE(got == expect, "segment (" << x0 << "," << y0 << ")-(" << x1 << "," << y1 << ") box " << bx << ","
                                             << by << " " << w << "x" << h);
  }
}

TEST_CASE("line_of_sight examples") {
  GridMap map(5, 5, 5.0);
  CHECK(line_of_sight(map, {2, 2}, {2, 3}));
  CHECK(line_of_sight(map, {2, 2}, {2, 2}));
  for (int r = 0; r < 5; ++r) map.set_blocked({r, 2}, true);
  CHECK_FALSE(line_of_sight(map, {0, 0}, {0, 4}));
  CHECK_FALSE(line_of_sight(map, {4, 1}, {0, 3}));

  // Diagonal squeeze between two corner-touching blocks is passable.
  GridMap squeeze(2, 2, 1.0);
  squeeze.set_blocked({0, 1}, true);
  squeeze.set_blocked({1, 0}, true);
  CHECK(line_of_sight(squeeze, {0, 0}, {1, 1}));
}

TEST_CASE("line_of_sight matches brute force over all pairs") {
  std::mt19937_64 gen(5);
  std::bernoulli_distribution blocked(0.25);
  for (int trial = 0; trial < 40; ++trial) {
    const int rows = 3 + trial % 7, cols = 3 + (trial * 5) % 8;
    GridMap map(rows, cols, 2.5);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) map.set_blocked({r, c}, blocked(gen));
    const auto cells = map.unblocked_cells();
    for (const CellIndex& a : cells)
      for (const CellIndex& b : cells) {
        const bool los = line_of_sight(map, a, b);
        REQUIRE(los == oracle::sight(map, a, b));
        CHECK(los == line_of_sight(map, b, a));
      }
  }
}

}  // TEST_SUITE
