#include <doctest.h>

#include <numeric>
#include <random>

#include "detplace/evaluation.hpp"
#include "detplace/solvers.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace detplace;

namespace {

constexpr AttackerModel kModels[] = {AttackerModel::uniform, AttackerModel::proportional, AttackerModel::worst_case};

std::vector<CellIndex> random_cells(std::mt19937_64& gen, const Instance& inst, int k) {
  auto cells = inst.map.unblocked_cells();
  std::shuffle(cells.begin(), cells.end(), gen);
  cells.resize(std::min<std::size_t>(k, cells.size()));
  std::sort(cells.begin(), cells.end());
  return cells;
}

}  // namespace

TEST_SUITE("evaluation") {

TEST_CASE("detection_prob and path_casualties") {
  CHECK(detection_prob(0.0, 0.06) == 0.0);
  CHECK(detection_prob(1e6, 0.06) == doctest::Approx(1.0));
  CHECK(detection_prob(20.0, 0.06) == doctest::Approx(1.0 - std::exp(-1.2)).epsilon(1e-15));

  CHECK(path_casualties(1.0, 7.0, 0.6) == doctest::Approx(7.0));
  CHECK(path_casualties(0.0, 10.0, 0.6) == doctest::Approx(4.0));
  CHECK(path_casualties(0.3, 10.0, 0.0) == doctest::Approx(10.0));
}

TEST_CASE("non-detection: product form equals exponent form") {
  CHECK(non_detection_fixed(0, 0.06) == 1.0);
  const double l = 13.25;
  CHECK(non_detection_fixed(to_fixed(l), 0.06) == doctest::Approx(1.0 - detection_prob(l, 0.06)).epsilon(1e-12));

  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> ul(0.0, 60.0), ue(0.001, 0.2);
  for (int k = 0; k < 2000; ++k) {
    const double eta = ue(gen);
    const double a = ul(gen), b = ul(gen), c = ul(gen);
    const double product = (1 - detection_prob(a, eta)) * (1 - detection_prob(b, eta)) * (1 - detection_prob(c, eta));
    const double exponent = non_detection_fixed(to_fixed(a) + to_fixed(b) + to_fixed(c), eta);
    CHECK(std::abs(product - exponent) <= 1e-12);
  }
}

TEST_CASE("gamma examples") {
  Instance inst;
  inst.map = GridMap(3, 3, 1.0);
  inst.entrances = {{0, 0}, {2, 0}};
  inst.objectives = {{{0, 2}, 1.0}, {{1, 2}, 3.0}, {{2, 2}, 0.0}};
  CasualtyMatrix w{2, 3, {1, 2, 3, 4, 5, 6}};
  for (double g : gamma(AttackerModel::uniform, inst, w)) CHECK(g == doctest::Approx(1.0 / 6.0));

  inst.objectives.pop_back();
  w = {2, 2, {1, 1, 1, 1}};
  const auto prop = gamma(AttackerModel::proportional, inst, w);
  CHECK(prop == std::vector<double>{1.0 / 8, 3.0 / 8, 1.0 / 8, 3.0 / 8});

  w = {2, 2, {3, 5, 2, 1}};
  CHECK(gamma(AttackerModel::worst_case, inst, w) == std::vector<double>{0, 1, 0, 0});
  w = {2, 2, {5, 5, 5, 1}};
  CHECK(gamma(AttackerModel::worst_case, inst, w) == std::vector<double>{1, 0, 0, 0});

  inst.objectives[0].value = inst.objectives[1].value = 0.0;
  CHECK_THROWS_AS(gamma(AttackerModel::proportional, inst, w), std::domain_error);
}

TEST_CASE("worst case equals the LP maximum") {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  for (int k = 0; k < 200; ++k) {
    const int eps = 1 + k % 4, phi = 1 + (k / 4) % 4;
    Instance inst;
    inst.map = GridMap(4, 4, 1.0);
    for (int i = 0; i < eps; ++i) inst.entrances.push_back({i, 0});
    for (int j = 0; j < phi; ++j) inst.objectives.push_back({{j, 3}, 1.0});
    CasualtyMatrix w{eps, phi, {}};
    for (int t = 0; t < eps * phi; ++t) w.values.push_back(u(gen));
    const auto g = gamma(AttackerModel::worst_case, inst, w);
    double v = 0.0;
    for (int t = 0; t < eps * phi; ++t) v += g[t] * w.values[t];
    CHECK(v == oracle::lp_vertex_max(w.values));
  }
}

TEST_CASE("cache entries match direct geometry; serial equals parallel") {
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 6; ++trial) {
    testing_support::RandomSpec spec{16, 16, 0.2, 4, 4, 3};
    const Instance inst = testing_support::random_instance(gen, spec);
    const PathMatrix paths = all_paths(inst);
    const auto cells = inst.map.unblocked_cells();
    const DetectionCache cache = build_cache(inst, paths, cells);
    CHECK(cache == build_cache_serial(inst, paths, cells));
    REQUIRE(cache.slot_count() == static_cast<int>(cells.size()));
    for (int s = 0; s < cache.slot_count(); ++s)
      for (int p = 0; p < paths.size(); ++p) {
        const double direct = oracle::coverage(paths.truncated(p), inst.map.center(cells[s]),
                                               inst.physics.detection_radius);
        CHECK(std::abs(cache.length(s, p) - direct) <= 1e-9);
        CHECK(cache.length(s, p) <= paths.truncated(p).length + 1e-9);
        CHECK(cache.length(s, p) <=
              2 * inst.physics.detection_radius * paths.truncated(p).segment_count() + 1e-9);
      }
    CHECK(build_dominance(cache, inst.map.rows(), inst.map.cols()) ==
          build_dominance_serial(cache, inst.map.rows(), inst.map.cols()));
  }
}

TEST_CASE("cache examples") {
  // Straight path through a detector center with at least 40 m either side.
  Instance inst;
  inst.map = GridMap(1, 30, 5.0);
  inst.entrances = {{0, 0}};
  inst.objectives = {{{0, 29}, 1.0}};
  inst.physics.neutralization_time = 0.0;
  const auto paths = all_paths(inst);
  const std::vector<CellIndex> cells{{0, 15}};
  const auto cache = build_cache(inst, paths, cells);
  CHECK(cache.length(0, 0) == doctest::Approx(40.0));

  // A detector far from every path.
  Instance wide;
  wide.map = GridMap(20, 20, 5.0);
  wide.entrances = {{0, 0}};
  wide.objectives = {{{0, 19}, 1.0}};
  const auto wp = all_paths(wide);
  const std::vector<CellIndex> far{{19, 10}};
  const auto wc = build_cache(wide, wp, far);
  CHECK(wc.entries(0).empty());
  CHECK(wc.length(0, 0) == 0.0);

  // Truncated path of length zero: nothing is ever detected.
  Instance shortp;
  shortp.map = GridMap(1, 3, 5.0);
  shortp.entrances = {{0, 0}};
  shortp.objectives = {{{0, 2}, 1.0}};
  const auto sp = all_paths(shortp);
  CHECK(sp.truncated(0).length == 0.0);
  const auto sc = build_cache(shortp, sp, shortp.map.unblocked_cells());
  for (int s = 0; s < sc.slot_count(); ++s) CHECK(sc.entries(s).empty());
}

TEST_CASE("dominance examples") {
  Instance inst;
  inst.map = GridMap(1, 30, 5.0);
  inst.entrances = {{0, 0}};
  inst.objectives = {{{0, 29}, 1.0}};
  const auto paths = all_paths(inst);

  const std::vector<CellIndex> single{{0, 10}};
  const auto one = build_cache(inst, paths, single);
  const auto d1 = build_dominance(one, 1, 30);
  CHECK(std::accumulate(d1.counts.begin(), d1.counts.end(), 0) == 0);

  // Far end cells see nothing of the truncated path; (0,10) sees plenty.
  Instance tall = inst;
  tall.map = GridMap(12, 30, 5.0);
  const auto tp = all_paths(tall);
  const std::vector<CellIndex> two{{0, 10}, {11, 29}};
  const auto tc = build_cache(tall, tp, two);
  REQUIRE(tc.entries(1).empty());
  const auto d2 = build_dominance(tc, 12, 30);
  CHECK(d2.at({11, 29}) >= 1);
  CHECK(d2.at({0, 10}) == 0);

  // Identical coverage vectors do not dominate each other.
  GridMap sym(3, 3, 1.0);
  Instance s;
  s.map = sym;
  s.entrances = {{1, 0}};
  s.objectives = {{{1, 2}, 1.0}};
  s.physics.detection_radius = 1.2;
  s.physics.neutralization_time = 0.0;
  const auto spaths = all_paths(s);
  const std::vector<CellIndex> pair{{0, 1}, {2, 1}};
  const auto scache = build_cache(s, spaths, pair);
  REQUIRE_FALSE(scache.entries(0).empty());
  const auto sd = build_dominance(scache, 3, 3);
  CHECK(sd.at({0, 1}) == 0);
  CHECK(sd.at({2, 1}) == 0);
}

TEST_CASE("evaluate: zero coverage closed forms") {
  Instance inst;
  inst.map = GridMap(10, 10, 5.0);
  inst.entrances = {{0, 0}, {9, 0}};
  inst.objectives = {{{0, 9}, 2.0}, {{9, 9}, 6.0}};
  inst.physics.neutralization_time = 1000.0;  // truncated paths are empty
  const auto paths = all_paths(inst);
  const Placement p{{{5, 5}, {2, 3}}};
  const double sum_c = 8.0;
  CHECK(evaluate_direct(p, inst, paths, AttackerModel::proportional).total ==
        doctest::Approx((2.0 / sum_c) * 2.0 + (6.0 / sum_c) * 6.0));
  const auto worst = evaluate_direct(p, inst, paths, AttackerModel::worst_case);
  CHECK(worst.total == 6.0);
  REQUIRE(worst.critical);
  CHECK(*worst.critical == std::pair{0, 1});
  CHECK_FALSE(evaluate_direct(p, inst, paths, AttackerModel::uniform).critical);
}

TEST_CASE("evaluate through the cache agrees with the product-form oracle") {
  std::mt19937_64 gen(10);
  for (int trial = 0; trial < 20; ++trial) {
    testing_support::RandomSpec spec{10, 10, 0.2, 4, 4, 3};
    const Instance inst = testing_support::random_instance(gen, spec);
    const PathMatrix paths = all_paths(inst);
    const DetectionCache cache = build_cache(inst, paths, inst.map.unblocked_cells());
    for (int k = 0; k < 10; ++k) {
      const auto cells = random_cells(gen, inst, 1 + k % 4);
      const Placement p{cells};
      const auto w = oracle::path_values(inst, paths, cells);
      for (AttackerModel m : kModels) {
        const double want = oracle::total(inst, w, m);
        const auto via_cache = evaluate(p, inst, cache, m);
        const auto direct = evaluate_direct(p, inst, paths, m);
        CHECK(std::abs(via_cache.total - want) <= 1e-10 * want);
        CHECK(std::abs(direct.total - want) <= 1e-10 * want);
        CHECK(via_cache.critical.has_value() == (m == AttackerModel::worst_case));
      }
    }
  }
}

TEST_CASE("W properties: bounds, monotonicity, dominance, scaling") {
  std::mt19937_64 gen(12);
  for (int trial = 0; trial < 15; ++trial) {
    testing_support::RandomSpec spec{8, 8, 0.15, 3, 4, 3};
    Instance inst = testing_support::random_instance(gen, spec);
    const PathMatrix paths = all_paths(inst);
    const DetectionCache cache = build_cache(inst, paths, inst.map.unblocked_cells());
    const auto cells = random_cells(gen, inst, 4);
    for (std::size_t k = 1; k < cells.size(); ++k) {
      const Placement small{{cells.begin(), cells.begin() + k}};
      Placement big{{cells.begin(), cells.begin() + k + 1}};
      std::sort(big.cells.begin(), big.cells.end());
      for (AttackerModel m : kModels)
        CHECK(evaluate(big, inst, cache, m).total <= evaluate(small, inst, cache, m).total);
      const auto r = evaluate(big, inst, cache, AttackerModel::worst_case);
      CHECK(r.total >= evaluate(big, inst, cache, AttackerModel::proportional).total);
      CHECK(r.total >= evaluate(big, inst, cache, AttackerModel::uniform).total);
      CHECK(r.total == *std::max_element(r.per_path.values.begin(), r.per_path.values.end()));
      for (int i = 0; i < inst.entrance_count(); ++i)
        for (int j = 0; j < inst.objective_count(); ++j) {
          const double c = inst.objectives[j].value, theta = inst.physics.neutralization_prob;
          CHECK(r.per_path.at(i, j) <= c);
          CHECK(r.per_path.at(i, j) >= c * (1 - theta) - 1e-12);
        }
    }
    // Scaling all C_j by s scales W by s.
    const Placement p{cells};
    Instance scaled = inst;
    for (auto& o : scaled.objectives) o.value *= 3.5;
    for (AttackerModel m : kModels) {
      const auto a = evaluate(p, inst, cache, m), b = evaluate(p, scaled, cache, m);
      CHECK(b.total == doctest::Approx(3.5 * a.total).epsilon(1e-12));
      CHECK(a.critical == b.critical);
    }
  }
}

TEST_CASE("incremental value equals full value bitwise") {
  std::mt19937_64 gen(14);
  const Instance inst = testing_support::random_instance(gen, {12, 12, 0.2, 4, 4, 3});
  const PathMatrix paths = all_paths(inst);
  const DetectionCache cache = build_cache(inst, paths, inst.map.unblocked_cells());
  for (AttackerModel m : kModels) {
    const Evaluator ev(inst, cache, m);
    std::vector<double> scratch(ev.path_count());
    for (int k = 0; k < 50; ++k) {
      std::vector<int> base;
      for (int t = 0; t < 3; ++t) base.push_back(static_cast<int>(gen() % cache.slot_count()));
      const int extra = static_cast<int>(gen() % cache.slot_count());
      std::vector<FixedLength> cov;
      std::vector<double> vals;
      ev.coverage(base, cov);
      ev.path_values(cov, vals);
      std::vector<int> all = base;
      all.push_back(extra);
      std::vector<int> shuffled = all;
      std::shuffle(shuffled.begin(), shuffled.end(), gen);
      CHECK(ev.value_with(cov, vals, extra, scratch) == ev.value(all));
      CHECK(ev.value(shuffled) == ev.value(all));
    }
  }
}

TEST_CASE("dominance pruning preserves the exhaustive optimum") {
  std::mt19937_64 gen(15);
  for (int trial = 0; trial < 8; ++trial) {
    const Instance inst = testing_support::random_instance(gen);
    const Problem problem = prepare(inst);
    for (AttackerModel m : {AttackerModel::proportional, AttackerModel::worst_case}) {
      const auto full = oracle::exhaustive(inst, problem.paths, inst.map.unblocked_cells(), 2, m);
      const auto pruned =
          oracle::exhaustive(inst, problem.paths, candidate_cells(inst, &problem.dominance, 2), 2, m);
      CHECK(pruned.value == doctest::Approx(full.value).epsilon(1e-12));
    }
  }
}

TEST_CASE("model names") {
  CHECK(parse_attacker_model("prop") == AttackerModel::proportional);
  CHECK(parse_attacker_model("worst") == AttackerModel::worst_case);
  CHECK(parse_attacker_model("uniform") == AttackerModel::uniform);
  CHECK_FALSE(parse_attacker_model("max"));
  CHECK(std::string(to_string(AttackerModel::proportional)) == "prop");
}

}  // TEST_SUITE
