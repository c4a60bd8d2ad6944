#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "detplace/generators.hpp"
#include "detplace/solvers.hpp"

namespace detplace {

/// Column order of every results CSV this tool writes.
inline constexpr const char* kCsvHeader = "instance,class,alg,model,delta,seed,W,evals,seconds,deviation_pct";

struct InstanceRef {
  std::filesystem::path path;
  std::string map_class;  // "unknown" when neither the manifest nor the file name says
};

/// One bench configuration. Read from a flat "key = value" text file:
///
///   instances  = a.map b.map       (paths relative to the spec file)
///   manifest   = out/manifest.csv  (adds every instance it lists, with class)
///   algorithms = greedy hc ts ea
///   models     = prop worst
///   deltas     = 2 5 10 15 20 25 30
///   seeds      = 1 2 3
///   budget_s   = 30                (and/or budget_evals = 50000)
///   out        = results
///   threads    = 0                 (0 = OpenMP default)
///
/// Blank lines and lines starting with '#' are ignored.
struct ExperimentSpec {
  std::vector<InstanceRef> instances;
  std::vector<Algorithm> algorithms{Algorithm::greedy, Algorithm::hill_climbing, Algorithm::tabu_search,
                                    Algorithm::evolutionary};
  std::vector<AttackerModel> models{AttackerModel::proportional, AttackerModel::worst_case};
  std::vector<int> deltas{2, 5, 10, 15, 20, 25, 30};
  std::vector<std::uint64_t> seeds{1};
  Budget budget = Budget::wall(30.0);
  std::filesystem::path output_dir = "results";
  int threads = 0;
  SolverConfig solver;  // population size, rates, tabu iterations
};

/// Throws ParseError on malformed lines or unknown keys.
ExperimentSpec read_experiment_spec(std::istream& in, const std::filesystem::path& base_dir);
ExperimentSpec load_experiment_spec(const std::filesystem::path& path);

/// Class label from a file name such as "newtown_007.map".
std::string infer_class(const std::filesystem::path& path);

struct ManifestEntry {
  std::uint64_t seed = 0;
  std::string map_class;
  std::filesystem::path path;  // as written (relative to the manifest)
};

/// "seed,class,path" CSV with a header row.
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const std::vector<ManifestEntry>& entries);

/// Generates `count` instances with seeds seed, seed+1, ... into `out_dir`
/// as "<class>_<k>.map" plus "manifest.csv".
std::vector<ManifestEntry> generate_batch(MapClass map_class, int count, std::uint64_t seed,
                                          const std::filesystem::path& out_dir,
                                          const GenParams* base_params = nullptr);

struct BenchRow {
  std::string instance;
  std::string map_class;
  Algorithm algorithm = Algorithm::greedy;
  AttackerModel model = AttackerModel::proportional;
  int delta = 0;
  std::uint64_t seed = 0;
  double value = 0.0;
  std::int64_t evaluations = 0;
  double seconds = 0.0;
  double deviation_pct = 0.0;
  std::string error;  // empty on success
};

/// 100 * (w - best) / best, with 0/0 taken as 0.
double deviation_pct(double w, double best);

/// Fills deviation_pct of successful rows against the best value of their
/// (instance, delta, model) group.
void compute_deviations(std::vector<BenchRow>& rows);

struct SummaryRow {
  std::string map_class;
  AttackerModel model = AttackerModel::proportional;
  int delta = 0;
  Algorithm algorithm = Algorithm::greedy;
  double mean_deviation = 0.0;
  int runs = 0;
};

std::vector<SummaryRow> summarize(const std::vector<BenchRow>& rows);

void write_csv_row(std::ostream& out, const BenchRow& row, bool with_deviation = true);
void write_results_csv(std::ostream& out, const std::vector<BenchRow>& rows);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);

struct BenchOutcome {
  std::vector<BenchRow> rows;  // sorted by instance, model, delta, alg, seed
  std::vector<SummaryRow> summary;
  int failures = 0;
};

/// Runs every (instance, model, delta, algorithm, seed) cell. Greedy ignores
/// seeds and runs once per (instance, model, delta). Failed cells are
/// recorded with an error message and the rest continue. Writes
/// results.csv, summary.csv and (if any) failures.csv to the output dir
/// when `write_files` is set.
BenchOutcome run_bench(const ExperimentSpec& spec, bool write_files = true);

}  // namespace detplace
