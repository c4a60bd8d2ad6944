#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "detplace/evaluation.hpp"
#include "detplace/rng.hpp"

namespace detplace {

enum class Algorithm { greedy, hill_climbing, tabu_search, evolutionary };

const char* to_string(Algorithm alg);
/// Accepts "greedy", "hc", "ts", "ea".
std::optional<Algorithm> parse_algorithm(std::string_view text);

/// Stop condition. Wall-clock budgets match the original experiments;
/// evaluation budgets make runs reproducible bit for bit.
struct Budget {
  std::optional<double> seconds;
  std::optional<std::int64_t> evaluations;

  static Budget wall(double s) { return {s, std::nullopt}; }
  static Budget evals(std::int64_t n) { return {std::nullopt, n}; }
};

struct SolverConfig {
  Budget budget = Budget::wall(30.0);
  std::uint64_t seed = 1;
  AttackerModel model = AttackerModel::proportional;
  int population_size = 100;
  double crossover_prob = 0.9;
  std::optional<double> mutation_prob;  // defaults to 1 / delta
  int tabu_max_iters = 100;             // consecutive non-improving iterations
  CandidateOptions candidates;
};

/// Throws std::invalid_argument on out-of-range settings.
void validate_config(const SolverConfig& config);

/// Preprocessed instance: paths, detection cache over every unblocked cell,
/// and dominance counts. Immutable and shareable between solver runs.
struct Problem {
  Instance instance;
  PathMatrix paths;
  DetectionCache cache;
  DominanceCounts dominance;
};

/// Validates `inst` and runs all preprocessing.
Problem prepare(Instance inst);

/// Solver state shared by the algorithms: the candidate slots, the evaluator,
/// the budget and the best placement seen by any evaluation.
class SearchContext {
 public:
  SearchContext(const Problem& problem, AttackerModel model, int delta, Budget budget,
                CandidateOptions options = {});

  const Problem& problem() const { return *problem_; }
  const Evaluator& evaluator() const { return evaluator_; }
  int delta() const { return delta_; }
  /// Candidate cache slots in row-major cell order.
  const std::vector<int>& candidates() const { return candidates_; }

  /// Evaluates and counts; records the placement if it is the best so far.
  double evaluate(std::span<const int> slots);
  /// Value of base + slot via the incremental path; counted like evaluate().
  double evaluate_with(std::span<const int> base_slots, std::span<const FixedLength> base_coverage,
                       std::span<const double> base_values, int slot, std::vector<double>& scratch);
  /// True once the budget is used up.
  bool exhausted();

  std::int64_t evaluations() const { return evaluations_; }
  double elapsed_seconds() const;
  bool has_best() const { return !best_slots_.empty(); }
  double best_value() const { return best_value_; }
  const std::vector<int>& best_slots() const { return best_slots_; }
  Placement to_placement(std::span<const int> slots) const;

 private:
  void record(std::span<const int> slots, double value);
  void record_with(std::span<const int> base, int slot, double value);

  const Problem* problem_;
  Evaluator evaluator_;
  int delta_;
  Budget budget_;
  std::vector<int> candidates_;
  std::chrono::steady_clock::time_point start_;
  std::int64_t evaluations_ = 0;
  double best_value_ = 0.0;
  std::vector<int> best_slots_;
};

/// Builds delta detectors one at a time, each the candidate minimizing the
/// partial value (first in row-major order on ties). Ignores the budget.
std::vector<int> greedy(SearchContext& ctx);

/// First-improvement single-detector replacement until no replacement
/// strictly improves. Returns early, with the current solution, on budget.
std::vector<int> hill_climb(SearchContext& ctx, std::vector<int> start);

struct TabuParams {
  int max_iters = 100;
};

/// Best-admissible relocation moves with a cell tabu list and aspiration.
/// Returns the best solution of the run.
std::vector<int> tabu_search(SearchContext& ctx, std::vector<int> start, const TabuParams& params, Rng& rng);

struct EvolutionParams {
  int population_size = 100;
  double crossover_prob = 0.9;
  double mutation_prob = 0.0;
};

/// Steady-state EA with binary tournaments, union-sampling recombination,
/// per-gene mutation and replace-worst. Runs until the budget is exhausted
/// and returns the best individual found.
std::vector<int> evolutionary(SearchContext& ctx, const EvolutionParams& params, Rng& rng);

/// Union-sampling recombination: delta distinct slots drawn uniformly from
/// the union of the two parents.
std::vector<int> recombine(std::span<const int> a, std::span<const int> b, int delta, Rng& rng);

/// Uniform random set of delta distinct candidate slots.
std::vector<int> random_placement(const SearchContext& ctx, Rng& rng);

using LocalSolver = std::function<std::vector<int>(SearchContext&, std::vector<int>, Rng&)>;

struct RestartStats {
  int completed = 0;
  double best_completed = 0.0;
};

/// Repeats random start + local solver until the budget runs out. Each
/// restart draws from its own stream derived from (seed, name, restart).
RestartStats run_with_restarts(const LocalSolver& solver, SearchContext& ctx, std::uint64_t seed,
                               std::string_view name);

struct RunRecord {
  Placement best;
  double best_value = 0.0;
  double seconds = 0.0;
  std::int64_t evaluations = 0;
  Algorithm algorithm = Algorithm::greedy;
  std::uint64_t seed = 0;
};

/// Runs one algorithm on a prepared problem with `delta` detectors.
/// Throws std::invalid_argument when there are fewer candidates than delta.
RunRecord solve(const Problem& problem, Algorithm alg, int delta, const SolverConfig& config);

}  // namespace detplace
