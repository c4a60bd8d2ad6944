#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "detplace/experiment.hpp"
#include "detplace/io.hpp"
#include "detplace/render.hpp"
#include "support.hpp"

using namespace detplace;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("detplace_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run(const std::string& args) {
  const std::string cmd = std::string(DETPLACE_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

int count(const std::string& text, const std::string& needle) {
  int n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

BenchRow row(std::string inst, Algorithm alg, AttackerModel m, int delta, double w) {
  BenchRow r;
  r.instance = std::move(inst);
  r.map_class = "newtown";
  r.algorithm = alg;
  r.model = m;
  r.delta = delta;
  r.value = w;
  return r;
}

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("deviation from best known") {
  CHECK(deviation_pct(0.0, 0.0) == 0.0);
  CHECK(deviation_pct(11.0, 10.0) == doctest::Approx(10.0));
  CHECK(deviation_pct(10.0, 10.0) == 0.0);

  std::vector<BenchRow> rows{
      row("a", Algorithm::greedy, AttackerModel::proportional, 5, 12.0),
      row("a", Algorithm::hill_climbing, AttackerModel::proportional, 5, 10.0),
      row("a", Algorithm::greedy, AttackerModel::worst_case, 5, 20.0),
      row("a", Algorithm::hill_climbing, AttackerModel::worst_case, 5, 25.0),
      row("b", Algorithm::greedy, AttackerModel::proportional, 5, 8.0),
      row("b", Algorithm::hill_climbing, AttackerModel::proportional, 5, 8.0),
  };
  rows.push_back(row("b", Algorithm::tabu_search, AttackerModel::proportional, 5, 1.0));
  rows.back().error = "failed";
  compute_deviations(rows);
  CHECK(rows[0].deviation_pct == doctest::Approx(20.0));
  CHECK(rows[1].deviation_pct == 0.0);
  CHECK(rows[2].deviation_pct == 0.0);
  CHECK(rows[3].deviation_pct == doctest::Approx(25.0));
  CHECK(rows[4].deviation_pct == 0.0);  // failed rows do not count as best known

  const auto summary = summarize(rows);
  // (newtown, prop, 5, greedy), (newtown, prop, 5, hc), (newtown, worst, 5, greedy), (newtown, worst, 5, hc)
  REQUIRE(summary.size() == 4);
  CHECK(summary[0].algorithm == Algorithm::greedy);
  CHECK(summary[0].model == AttackerModel::proportional);
  CHECK(summary[0].runs == 2);
  CHECK(summary[0].mean_deviation == doctest::Approx(10.0));
}

TEST_CASE("CSV rows") {
  BenchRow r = row("x,y.map", Algorithm::evolutionary, AttackerModel::worst_case, 10, 0.1);
  r.seed = 3;
  r.evaluations = 42;
  r.seconds = 1.5;
  r.deviation_pct = 2.25;
  std::ostringstream out;
  write_results_csv(out, {r});
  CHECK(out.str() == std::string(kCsvHeader) + "\n\"x,y.map\",newtown,ea,worst,10,3,0.1,42,1.5,2.25\n");
}

TEST_CASE("experiment spec parsing") {
  std::istringstream in(
      "# comment\n"
      "instances = a.map oldtown_3.map\n"
      "algorithms = greedy, ts\n"
      "models = worst\n"
      "deltas = 2 4\n"
      "seeds = 5 6\n"
      "budget_evals = 1000\n"
      "out = res\n"
      "threads = 2\n");
  const ExperimentSpec s = read_experiment_spec(in, "/base");
  REQUIRE(s.instances.size() == 2);
  CHECK(s.instances[0].path == fs::path("/base/a.map"));
  CHECK(s.instances[0].map_class == "unknown");
  CHECK(s.instances[1].map_class == "oldtown");
  CHECK(s.algorithms == std::vector<Algorithm>{Algorithm::greedy, Algorithm::tabu_search});
  CHECK(s.models == std::vector<AttackerModel>{AttackerModel::worst_case});
  CHECK(s.deltas == std::vector<int>{2, 4});
  CHECK(s.seeds == std::vector<std::uint64_t>{5, 6});
  CHECK_FALSE(s.budget.seconds);
  CHECK(s.budget.evaluations == 1000);
  CHECK(s.output_dir == fs::path("/base/res"));
  CHECK(s.threads == 2);

  std::istringstream bad("instances = a.map\ncolour = blue\n");
  CHECK_THROWS_AS(read_experiment_spec(bad, "."), ParseError);
  std::istringstream none("algorithms = hc\n");
  CHECK_THROWS_AS(read_experiment_spec(none, "."), ParseError);
  std::istringstream alg("instances = a.map\nalgorithms = sa\n");
  CHECK_THROWS_AS(read_experiment_spec(alg, "."), ParseError);
}

TEST_CASE("generate_batch writes instances and a manifest") {
  const fs::path dir = scratch_dir("batch");
  GenParams base = GenParams::defaults(MapClass::oldtown);
  base.rows = base.cols = 32;
  const auto entries = generate_batch(MapClass::oldtown, 3, 10, dir, &base);
  REQUIRE(entries.size() == 3);
  CHECK(entries[2].seed == 12);
  CHECK(entries[0].path == fs::path("oldtown_000.map"));
  const auto back = read_manifest(dir / "manifest.csv");
  REQUIRE(back.size() == 3);
  CHECK(back[1].map_class == "oldtown");
  CHECK(load_instance(dir / back[1].path).map.rows() == 32);

  const auto none = generate_batch(MapClass::newtown, 0, 1, dir / "empty");
  CHECK(none.empty());
  CHECK(slurp(dir / "empty" / "manifest.csv") == "seed,class,path\n");
}

TEST_CASE("run_bench: deviations, failures and thread independence") {
  const fs::path dir = scratch_dir("bench");
  std::mt19937_64 gen(3);
  for (int k = 0; k < 2; ++k)
    save_instance(testing_support::random_instance(gen, {8, 8, 0.15, 3, 3, 3}),
                  dir / ("newtown_" + std::to_string(k) + ".map"));
  {
    std::ofstream broken(dir / "oldtown_bad.map");
    broken << "DETPLACE 1\nrows 2\n";
  }

  ExperimentSpec spec;
  spec.instances = {{dir / "newtown_0.map", "newtown"}, {dir / "newtown_1.map", "newtown"}};
  spec.algorithms = {Algorithm::hill_climbing};
  spec.deltas = {2, 3};
  spec.seeds = {1, 2};
  spec.budget = Budget::evals(500);
  spec.output_dir = dir / "single";
  const auto single = run_bench(spec);
  CHECK(single.failures == 0);
  for (const auto& r : single.rows) CHECK(r.deviation_pct >= 0.0);

  spec.seeds = {1};
  const auto one = run_bench(spec, false);
  for (const auto& r : one.rows) CHECK(r.deviation_pct == 0.0);

  spec.algorithms = {Algorithm::greedy, Algorithm::hill_climbing, Algorithm::tabu_search,
                     Algorithm::evolutionary};
  spec.seeds = {1, 2};
  spec.threads = 1;
  spec.output_dir = dir / "t1";
  const auto t1 = run_bench(spec);
  spec.threads = 3;
  spec.output_dir = dir / "t3";
  const auto t3 = run_bench(spec);
  // greedy once per (instance, model, delta) + 3 algorithms x 2 seeds
  CHECK(t1.rows.size() == 2 * 2 * 2 * (1 + 3 * 2));
  REQUIRE(t1.rows.size() == t3.rows.size());
  for (std::size_t k = 0; k < t1.rows.size(); ++k) {
    CHECK(t1.rows[k].value == t3.rows[k].value);
    CHECK(t1.rows[k].evaluations == t3.rows[k].evaluations);
    CHECK(t1.rows[k].deviation_pct == t3.rows[k].deviation_pct);
  }
  CHECK(fs::exists(dir / "t1" / "results.csv"));
  CHECK(fs::exists(dir / "t1" / "summary.csv"));
  CHECK_FALSE(fs::exists(dir / "t1" / "failures.csv"));

  spec.instances.push_back({dir / "oldtown_bad.map", "oldtown"});
  spec.deltas = {2, 40};
  spec.output_dir = dir / "partial";
  const auto partial = run_bench(spec);
  CHECK(partial.failures > 0);
  CHECK(fs::exists(dir / "partial" / "failures.csv"));
  const std::string results = slurp(dir / "partial" / "results.csv");
  CHECK(results.find("oldtown_bad") == std::string::npos);
}

TEST_CASE("SVG rendering") {
  std::mt19937_64 gen(6);
  const Instance inst = testing_support::random_instance(gen, {10, 10, 0.2, 3, 3, 2});
  const PathMatrix paths = all_paths(inst);
  const auto open = inst.map.unblocked_cells();
  const Placement p{{open[0], open[5]}};

  std::ostringstream map_only;
  render_svg(map_only, inst);
  CHECK(map_only.str().rfind("<?xml", 0) == 0);
  CHECK(count(map_only.str(), "<svg") == 1);
  CHECK(count(map_only.str(), "</svg>") == 1);
  CHECK(count(map_only.str(), "class=\"critical\"") == 0);

  std::ostringstream worst;
  render_svg(worst, inst, paths, p, evaluate_direct(p, inst, paths, AttackerModel::worst_case));
  CHECK(count(worst.str(), "class=\"critical\"") == 1);
  CHECK(count(worst.str(), "class=\"path\"") == inst.path_count());
  CHECK(count(worst.str(), "class=\"detector-range\"") == 2);

  std::ostringstream prop;
  render_svg(prop, inst, paths, p, evaluate_direct(p, inst, paths, AttackerModel::proportional));
  CHECK(count(prop.str(), "class=\"critical\"") == 0);
}

TEST_CASE("command line") {
  const fs::path dir = scratch_dir("cli");
  const std::string d = dir.string();
  CHECK(run("") == 1);
  CHECK(run("frobnicate") == 1);
  CHECK(run("generate --class marsh --out " + d + "/x") == 1);
  CHECK(run("generate --class oldtown --count 2 --seed 4 --out " + d + "/maps") == 0);
  CHECK(fs::exists(dir / "maps" / "oldtown_001.map"));
  CHECK(run("generate --class oldtown --count 0 --out " + d + "/none") == 0);
  CHECK(run("generate --class oldtown --count 1 --out /proc/forbidden") == 2);

  const std::string map = d + "/maps/oldtown_000.map";
  const std::string solve = "solve --instance " + map + " --alg ea --model worst --delta 5 --budget-evals 800 --seed 9";
  CHECK(run(solve + " --out " + d + "/p1.txt --csv " + d + "/runs.csv") == 0);
  CHECK(run(solve + " --out " + d + "/p2.txt --csv " + d + "/runs.csv") == 0);
  CHECK(slurp(dir / "p1.txt") == slurp(dir / "p2.txt"));
  const std::string csv = slurp(dir / "runs.csv");
  CHECK(csv.rfind(std::string(kCsvHeader) + "\n", 0) == 0);
  CHECK(count(csv, "\n") == 3);
  // Same W in both rows.
  std::istringstream lines(csv);
  std::string header, a, b;
  std::getline(lines, header);
  std::getline(lines, a);
  std::getline(lines, b);
  auto w_of = [](const std::string& line) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string x; std::getline(ss, x, ',');) f.push_back(x);
    return f.at(6);
  };
  CHECK(w_of(a) == w_of(b));
  CHECK(a.rfind("oldtown_000.map,oldtown,ea,worst,5,9,", 0) == 0);

  const Placement placed = load_placement(dir / "p1.txt");
  const Instance inst = load_instance(map);
  CHECK(placed.size() == 5);
  for (const CellIndex& c : placed.cells) CHECK_FALSE(inst.map.blocked(c));

  CHECK(run("solve --instance " + map + " --delta 100000 --budget-evals 10") == 2);
  CHECK(run("solve --instance " + map + " --alg sa") == 1);

  CHECK(run("render --instance " + map + " --out " + d + "/m.svg") == 0);
  CHECK(run("render --instance " + map + " --placement " + d + "/p1.txt --model worst --out " + d + "/w.svg") == 0);
  CHECK(count(slurp(dir / "w.svg"), "class=\"critical\"") == 1);
  CHECK(run("render --instance " + map + " --placement " + d + "/p1.txt --model prop --out " + d + "/p.svg") == 0);
  CHECK(count(slurp(dir / "p.svg"), "class=\"critical\"") == 0);

  {
    std::ofstream spec(dir / "spec.txt");
    spec << "manifest = maps/manifest.csv\nalgorithms = greedy hc\nmodels = prop\ndeltas = 3\n"
            "budget_evals = 300\nout = bench\n";
  }
  CHECK(run("bench --spec " + d + "/spec.txt") == 0);
  const std::string results = slurp(dir / "bench" / "results.csv");
  CHECK(count(results, "\n") == 1 + 2 * 2);
  CHECK(results.find(",oldtown,hc,prop,3,1,") != std::string::npos);

  {
    std::ofstream spec(dir / "spec2.txt");
    spec << "instances = maps/oldtown_000.map\nalgorithms = greedy\nmodels = prop\ndeltas = 3 100000\n"
            "budget_evals = 300\nout = bench2\n";
  }
  CHECK(run("bench --spec " + d + "/spec2.txt") == 3);

  CHECK(run("paths --instance " + map + " --out " + d + "/paths.txt") == 0);
  CHECK(count(slurp(dir / "paths.txt"), "\n") == inst.path_count());
}

}  // TEST_SUITE
