// detplace: generate benchmark maps, place detectors, run benches, render SVGs.
//
// Exit codes: 0 success, 1 usage, 2 data error, 3 some bench cells failed.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "detplace/evaluation.hpp"
#include "detplace/experiment.hpp"
#include "detplace/generators.hpp"
#include "detplace/io.hpp"
#include "detplace/pathfinding.hpp"
#include "detplace/render.hpp"
#include "detplace/solvers.hpp"

using namespace detplace;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitPartial = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GenerateArgs {
  std::string map_class;
  int count = 1;
  std::uint64_t seed = 1;
  std::string out;
};

struct SolveArgs {
  std::string instance;
  std::string alg = "greedy";
  std::string model = "prop";
  std::optional<int> delta;
  std::optional<double> budget_s;
  std::optional<std::int64_t> budget_evals;
  std::uint64_t seed = 1;
  std::string out;
  std::string csv;
  std::string map_class;
};

struct BenchArgs {
  std::string spec;
  std::optional<int> threads;
  std::string out;
};

struct RenderArgs {
  std::string instance;
  std::string placement;
  std::string model;
  std::string out;
  double pixels = 10.0;
};

struct PathsArgs {
  std::string instance;
  std::string out;
};

int cmd_generate(const GenerateArgs& a) {
  const auto mc = parse_map_class(a.map_class);
  if (!mc) throw UsageError("unknown class '" + a.map_class + "'");
  if (a.count < 0) throw UsageError("--count must be >= 0");
  const auto entries = generate_batch(*mc, a.count, a.seed, a.out);
  std::printf("wrote %zu instances to %s\n", entries.size(), a.out.c_str());
  return 0;
}

int cmd_solve(const SolveArgs& a) {
  const auto alg = parse_algorithm(a.alg);
  if (!alg) throw UsageError("unknown algorithm '" + a.alg + "'");
  const auto model = parse_attacker_model(a.model);
  if (!model) throw UsageError("unknown model '" + a.model + "'");

  Problem problem = prepare(load_instance(a.instance));
  SolverConfig cfg;
  cfg.seed = a.seed;
  cfg.model = *model;
  if (a.budget_s || a.budget_evals) cfg.budget = Budget{a.budget_s, a.budget_evals};
  const int delta = a.delta.value_or(problem.instance.detectors);

  const RunRecord rec = solve(problem, *alg, delta, cfg);

  // The emitted placement must stand on its own against the instance.
  for (const CellIndex& c : rec.best.cells)
    if (!problem.instance.map.contains(c) || problem.instance.map.blocked(c))
      throw std::logic_error("solver produced a detector on a blocked cell");

  if (!a.out.empty()) save_placement(rec.best, a.out);

  BenchRow row;
  row.instance = std::filesystem::path(a.instance).filename().string();
  row.map_class = a.map_class.empty() ? infer_class(a.instance) : a.map_class;
  row.algorithm = *alg;
  row.model = *model;
  row.delta = delta;
  row.seed = a.seed;
  row.value = rec.best_value;
  row.evaluations = rec.evaluations;
  row.seconds = rec.seconds;

  if (a.csv.empty()) {
    std::cout << kCsvHeader << '\n';
    write_csv_row(std::cout, row, false);
  } else {
    const bool fresh = !std::filesystem::exists(a.csv) || std::filesystem::file_size(a.csv) == 0;
    std::ofstream csv(a.csv, std::ios::app | std::ios::binary);
    if (!csv) throw IoError("cannot append to " + a.csv);
    if (fresh) csv << kCsvHeader << '\n';
    write_csv_row(csv, row, false);
  }
  return 0;
}

int cmd_bench(const BenchArgs& a) {
  ExperimentSpec spec = load_experiment_spec(a.spec);
  if (a.threads) spec.threads = *a.threads;
  if (!a.out.empty()) spec.output_dir = a.out;
  const BenchOutcome outcome = run_bench(spec);
  std::printf("%zu runs, %d failed; results in %s\n", outcome.rows.size(), outcome.failures,
              spec.output_dir.string().c_str());
  return outcome.failures > 0 ? kExitPartial : 0;
}

int cmd_render(const RenderArgs& a) {
  const Instance inst = load_instance(a.instance);
  require_valid(inst);
  RenderOptions opts;
  opts.pixels_per_cell = a.pixels;

  std::ofstream out(a.out, std::ios::binary);
  if (!out) throw IoError("cannot write " + a.out);
  if (a.placement.empty()) {
    render_svg(out, inst, opts);
    return 0;
  }

  const Placement placement = load_placement(a.placement);
  for (const CellIndex& c : placement.cells)
    if (!inst.map.contains(c) || inst.map.blocked(c))
      throw std::invalid_argument("placement cell " + std::to_string(c.row) + " " + std::to_string(c.col) +
                                  " is outside the map or blocked");
  const PathMatrix paths = all_paths(inst);
  std::optional<EvalResult> result;
  if (!a.model.empty()) {
    const auto model = parse_attacker_model(a.model);
    if (!model) throw UsageError("unknown model '" + a.model + "'");
    result = evaluate_direct(placement, inst, paths, *model);
  }
  render_svg(out, inst, paths, placement, result, opts);
  return 0;
}

int cmd_paths(const PathsArgs& a) {
  const Instance inst = load_instance(a.instance);
  require_valid(inst);
  const PathMatrix paths = all_paths(inst);
  if (a.out.empty()) {
    write_path_dump(std::cout, paths);
  } else {
    std::ofstream out(a.out, std::ios::binary);
    if (!out) throw IoError("cannot write " + a.out);
    write_path_dump(out, paths);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Explosive-trace detector placement"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Generate benchmark instances and a manifest");
  g->add_option("--class", gen.map_class, "harbour, newtown or oldtown")->required();
  g->add_option("--count", gen.count, "Number of instances");
  g->add_option("--seed", gen.seed, "Seed of the first instance");
  g->add_option("--out", gen.out, "Output directory")->required();

  SolveArgs sol;
  auto* s = app.add_subcommand("solve", "Place detectors on one instance");
  s->add_option("--instance", sol.instance)->required()->check(CLI::ExistingFile);
  s->add_option("--alg", sol.alg, "greedy, hc, ts or ea");
  s->add_option("--model", sol.model, "uniform, prop or worst");
  s->add_option("--delta", sol.delta, "Detector count (default: from the instance)");
  s->add_option("--budget-s", sol.budget_s, "Wall-clock budget in seconds");
  s->add_option("--budget-evals", sol.budget_evals, "Evaluation-count budget");
  s->add_option("--seed", sol.seed);
  s->add_option("--out", sol.out, "Placement file to write");
  s->add_option("--csv", sol.csv, "Append the run row here instead of stdout");
  s->add_option("--class", sol.map_class, "Class label for the CSV row");

  BenchArgs ben;
  auto* b = app.add_subcommand("bench", "Run an experiment spec");
  b->add_option("--spec", ben.spec)->required()->check(CLI::ExistingFile);
  b->add_option("--threads", ben.threads, "Override the spec's thread count");
  b->add_option("--out", ben.out, "Override the spec's output directory");

  RenderArgs ren;
  auto* r = app.add_subcommand("render", "Draw an instance, optionally with a placement, as SVG");
  r->add_option("--instance", ren.instance)->required()->check(CLI::ExistingFile);
  r->add_option("--placement", ren.placement)->check(CLI::ExistingFile);
  r->add_option("--model", ren.model, "Evaluate under this model (worst highlights the critical path)");
  r->add_option("--out", ren.out)->required();
  r->add_option("--pixels", ren.pixels, "Pixels per cell");

  PathsArgs pa;
  auto* p = app.add_subcommand("paths", "Dump all shortest paths of an instance");
  p->add_option("--instance", pa.instance)->required()->check(CLI::ExistingFile);
  p->add_option("--out", pa.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*g) return cmd_generate(gen);
    if (*s) return cmd_solve(sol);
    if (*b) return cmd_bench(ben);
    if (*r) return cmd_render(ren);
    if (*p) return cmd_paths(pa);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
