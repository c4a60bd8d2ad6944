#include "detplace/solvers.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <stdexcept>

namespace detplace {

const char* to_string(Algorithm alg) {
  switch (alg) {
    case Algorithm::greedy: return "greedy";
    case Algorithm::hill_climbing: return "hc";
    case Algorithm::tabu_search: return "ts";
    case Algorithm::evolutionary: return "ea";
  }
  return "unknown";
}

std::optional<Algorithm> parse_algorithm(std::string_view text) {
  if (text == "greedy") return Algorithm::greedy;
  if (text == "hc") return Algorithm::hill_climbing;
  if (text == "ts") return Algorithm::tabu_search;
  if (text == "ea") return Algorithm::evolutionary;
  return std::nullopt;
}

void validate_config(const SolverConfig& config) {
  const Budget& b = config.budget;
  if (!b.seconds && !b.evaluations) throw std::invalid_argument("budget: need seconds or evaluations");
  if (b.seconds && !(*b.seconds > 0.0)) throw std::invalid_argument("budget: seconds must be > 0");
  if (b.evaluations && *b.evaluations < 1) throw std::invalid_argument("budget: evaluations must be >= 1");
  if (config.population_size < 2) throw std::invalid_argument("population size must be >= 2");
  if (!(config.crossover_prob >= 0.0 && config.crossover_prob <= 1.0))
    throw std::invalid_argument("crossover probability must lie in [0, 1]");
  if (config.mutation_prob && !(*config.mutation_prob >= 0.0 && *config.mutation_prob <= 1.0))
    throw std::invalid_argument("mutation probability must lie in [0, 1]");
  if (config.tabu_max_iters < 1) throw std::invalid_argument("tabu max iterations must be >= 1");
}

Problem prepare(Instance inst) {
  require_valid(inst);
  Problem p;
  p.instance = std::move(inst);
  p.paths = all_paths(p.instance);
  const auto cells = p.instance.map.unblocked_cells();
  p.cache = build_cache(p.instance, p.paths, cells);
  p.dominance = build_dominance(p.cache, p.instance.map.rows(), p.instance.map.cols());
  return p;
}

// ---------------------------------------------------------------------------

SearchContext::SearchContext(const Problem& problem, AttackerModel model, int delta, Budget budget,
                             CandidateOptions options)
    : problem_(&problem),
      evaluator_(problem.instance, problem.cache, model),
      delta_(delta),
      budget_(budget),
      start_(std::chrono::steady_clock::now()),
      best_value_(std::numeric_limits<double>::infinity()) {
  if (delta < 1) throw std::invalid_argument("delta must be >= 1");
  for (const CellIndex& c : candidate_cells(problem.instance, &problem.dominance, delta, options)) {
    const int s = problem.cache.slot_of(c);
    if (s < 0) throw std::logic_error("candidate cell missing from cache");
    candidates_.push_back(s);
  }
}

double SearchContext::elapsed_seconds() const {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
}

bool SearchContext::exhausted() {
  if (budget_.evaluations && evaluations_ >= *budget_.evaluations) return true;
  if (budget_.seconds && elapsed_seconds() >= *budget_.seconds) return true;
  return false;
}

void SearchContext::record(std::span<const int> slots, double value) {
  if (static_cast<int>(slots.size()) != delta_ || !(value < best_value_)) return;
  best_value_ = value;
  best_slots_.assign(slots.begin(), slots.end());
}

void SearchContext::record_with(std::span<const int> base, int slot, double value) {
  if (static_cast<int>(base.size()) + 1 != delta_ || !(value < best_value_)) return;
  best_value_ = value;
  best_slots_.assign(base.begin(), base.end());
  best_slots_.push_back(slot);
}

double SearchContext::evaluate(std::span<const int> slots) {
  ++evaluations_;
  const double v = evaluator_.value(slots);
  record(slots, v);
  return v;
}

double SearchContext::evaluate_with(std::span<const int> base_slots, std::span<const FixedLength> base_coverage,
                                    std::span<const double> base_values, int slot,
                                    std::vector<double>& scratch) {
  ++evaluations_;
  const double v = evaluator_.value_with(base_coverage, base_values, slot, scratch);
  record_with(base_slots, slot, v);
  return v;
}

Placement SearchContext::to_placement(std::span<const int> slots) const {
  Placement p;
  for (int s : slots) p.cells.push_back(problem_->cache.cell(s));
  std::sort(p.cells.begin(), p.cells.end());
  return p;
}

// ---------------------------------------------------------------------------

namespace {

// Coverage and per-path values of `slots` with one position left out.
struct PartialState {
  std::vector<int> slots;
  std::vector<FixedLength> coverage;
  std::vector<double> values;

  void build(const Evaluator& ev, std::span<const int> all, int skip) {
    slots.clear();
    for (int k = 0; k < static_cast<int>(all.size()); ++k)
      if (k != skip) slots.push_back(all[k]);
    ev.coverage(slots, coverage);
    ev.path_values(coverage, values);
  }
};

}  // namespace

std::vector<int> greedy(SearchContext& ctx) {
  const Evaluator& ev = ctx.evaluator();
  std::vector<int> remaining = ctx.candidates();
  if (static_cast<int>(remaining.size()) < ctx.delta())
    throw std::invalid_argument("greedy: fewer candidates than detectors");

  PartialState state;
  state.build(ev, {}, -1);
  std::vector<double> scratch(ev.path_count());
  while (static_cast<int>(state.slots.size()) < ctx.delta()) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_pos = 0;
    for (std::size_t k = 0; k < remaining.size(); ++k) {
      const double v = ctx.evaluate_with(state.slots, state.coverage, state.values, remaining[k], scratch);
      if (v < best) {
        best = v;
        best_pos = k;
      }
    }
    const int chosen = remaining[best_pos];
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best_pos));
    state.slots.push_back(chosen);
    for (const auto& e : ev.cache().entries(chosen)) {
      state.coverage[e.path] += e.length;
      state.values[e.path] = ev.path_value(e.path, state.coverage[e.path]);
    }
  }
  return state.slots;
}

std::vector<int> hill_climb(SearchContext& ctx, std::vector<int> sol) {
  const Evaluator& ev = ctx.evaluator();
  const int delta = static_cast<int>(sol.size());
  std::vector<char> used(ev.cache().slot_count(), 0);
  for (int s : sol) used[s] = 1;

  if (ctx.exhausted()) return sol;
  double value = ctx.evaluate(sol);
  PartialState base;
  std::vector<double> scratch(ev.path_count());

  bool improvement = true;
  while (improvement) {
    improvement = false;
    for (int i = 0; i < delta; ++i) {
      // The base excludes position i, so it stays valid while sol[i] changes.
      base.build(ev, sol, i);
      for (int d : ctx.candidates()) {
        if (used[d]) continue;
        if (ctx.exhausted()) return sol;
        const double v = ctx.evaluate_with(base.slots, base.coverage, base.values, d, scratch);
        if (v < value) {
          used[sol[i]] = 0;
          used[d] = 1;
          sol[i] = d;
          value = v;
          improvement = true;
        }
      }
    }
  }
  return sol;
}

std::vector<int> tabu_search(SearchContext& ctx, std::vector<int> sol, const TabuParams& params, Rng& rng) {
  const Evaluator& ev = ctx.evaluator();
  const int delta = static_cast<int>(sol.size());
  std::vector<char> used(ev.cache().slot_count(), 0);
  for (int s : sol) used[s] = 1;
  // Iteration index until which (exclusive) placing a detector on a slot is tabu.
  std::vector<std::int64_t> tabu_until(ev.cache().slot_count(), 0);

  if (ctx.exhausted()) return sol;
  std::vector<int> best = sol;
  double best_value = ctx.evaluate(sol);

  struct Move {
    int position;
    int slot;
  };
  std::vector<Move> best_moves;
  PartialState base;
  std::vector<double> scratch(ev.path_count());

  int no_improvement = 0;
  for (std::int64_t iter = 0; no_improvement < params.max_iters; ++iter) {
    best_moves.clear();
    double best_moves_value = std::numeric_limits<double>::infinity();
    for (int i = 0; i < delta; ++i) {
      base.build(ev, sol, i);
      for (int d : ctx.candidates()) {
        if (used[d]) continue;
        if (ctx.exhausted()) return best;
        const double v = ctx.evaluate_with(base.slots, base.coverage, base.values, d, scratch);
        const bool tabu = tabu_until[d] > iter;
        if (tabu && !(v < best_value)) continue;
        if (v == best_moves_value) {
          best_moves.push_back({i, d});
        } else if (v < best_moves_value) {
          best_moves.assign(1, {i, d});
          best_moves_value = v;
        }
      }
    }
    if (best_moves.empty()) {
      ++no_improvement;
      continue;
    }
    const Move m = best_moves[rng.index(best_moves.size())];
    used[sol[m.position]] = 0;
    used[m.slot] = 1;
    sol[m.position] = m.slot;
    tabu_until[m.slot] = iter + 1 + rng.uniform_int(delta, 2 * delta);
    if (best_moves_value < best_value) {
      best = sol;
      best_value = best_moves_value;
      no_improvement = 0;
    } else {
      ++no_improvement;
    }
  }
  return best;
}

std::vector<int> random_placement(const SearchContext& ctx, Rng& rng) {
  std::vector<int> pool = ctx.candidates();
  const int delta = ctx.delta();
  if (static_cast<int>(pool.size()) < delta) throw std::invalid_argument("fewer candidates than detectors");
  for (int k = 0; k < delta; ++k) {
    const std::size_t j = k + rng.index(pool.size() - k);
    std::swap(pool[k], pool[j]);
  }
  pool.resize(delta);
  return pool;
}

std::vector<int> recombine(std::span<const int> a, std::span<const int> b, int delta, Rng& rng) {
  std::vector<int> pool(a.begin(), a.end());
  pool.insert(pool.end(), b.begin(), b.end());
  std::sort(pool.begin(), pool.end());
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
  if (static_cast<int>(pool.size()) < delta) throw std::invalid_argument("recombine: parents too small");
  for (int k = 0; k < delta; ++k) {
    const std::size_t j = k + rng.index(pool.size() - k);
    std::swap(pool[k], pool[j]);
  }
  pool.resize(delta);
  return pool;
}

std::vector<int> evolutionary(SearchContext& ctx, const EvolutionParams& params, Rng& rng) {
  struct Individual {
    std::vector<int> genes;  // sorted
    double value;
  };
  std::vector<Individual> pop;
  std::set<std::vector<int>> members;
  std::vector<int> best;
  double best_value = std::numeric_limits<double>::infinity();

  auto consider_best = [&](const std::vector<int>& genes, double v) {
    if (v < best_value) {
      best_value = v;
      best = genes;
    }
  };

  // The population holds distinct sets; tiny search spaces may not have
  // population_size of them, so give up after a bounded number of draws.
  const int max_draws = 50 * params.population_size;
  for (int draws = 0; static_cast<int>(pop.size()) < params.population_size && draws < max_draws; ++draws) {
    if (ctx.exhausted()) break;
    std::vector<int> genes = random_placement(ctx, rng);
    std::sort(genes.begin(), genes.end());
    if (members.count(genes)) continue;
    const double v = ctx.evaluate(genes);
    consider_best(genes, v);
    members.insert(genes);
    pop.push_back({std::move(genes), v});
  }
  if (pop.empty()) return random_placement(ctx, rng);

  auto tournament = [&]() -> const Individual& {
    const std::size_t a = rng.index(pop.size());
    const std::size_t b = rng.index(pop.size());
    return pop[b].value < pop[a].value ? pop[b] : pop[a];
  };

  const auto& candidates = ctx.candidates();
  const int delta = ctx.delta();
  const bool can_mutate = static_cast<int>(candidates.size()) > delta;

  while (!ctx.exhausted()) {
    std::vector<int> child;
    if (rng.bernoulli(params.crossover_prob)) {
      const Individual& p1 = tournament();
      const Individual& p2 = tournament();
      child = recombine(p1.genes, p2.genes, delta, rng);
    } else {
      child = pop[rng.index(pop.size())].genes;
    }
    if (can_mutate) {
      for (int g = 0; g < delta; ++g) {
        if (!rng.bernoulli(params.mutation_prob)) continue;
        int replacement;
        do {
          replacement = candidates[rng.index(candidates.size())];
        } while (std::find(child.begin(), child.end(), replacement) != child.end());
        child[g] = replacement;
      }
    }
    std::sort(child.begin(), child.end());
    const double v = ctx.evaluate(child);
    consider_best(child, v);
    if (members.count(child)) continue;

    std::size_t worst = 0;
    for (std::size_t k = 1; k < pop.size(); ++k)
      if (pop[k].value > pop[worst].value) worst = k;
    members.erase(pop[worst].genes);
    members.insert(child);
    pop[worst] = {std::move(child), v};
  }
  return best;
}

RestartStats run_with_restarts(const LocalSolver& solver, SearchContext& ctx, std::uint64_t seed,
                               std::string_view name) {
  RestartStats stats;
  stats.best_completed = std::numeric_limits<double>::infinity();
  for (std::uint64_t restart = 0; !ctx.exhausted(); ++restart) {
    Rng rng(derive_seed(seed, name, restart));
    std::vector<int> start = random_placement(ctx, rng);
    std::vector<int> out = solver(ctx, std::move(start), rng);
    if (ctx.exhausted()) break;  // descent may have been cut short
    ++stats.completed;
    stats.best_completed = std::min(stats.best_completed, ctx.evaluator().value(out));
  }
  return stats;
}

RunRecord solve(const Problem& problem, Algorithm alg, int delta, const SolverConfig& config) {
  validate_config(config);
  SearchContext ctx(problem, config.model, delta, config.budget, config.candidates);
  if (static_cast<int>(ctx.candidates().size()) < delta)
    throw std::invalid_argument("delta " + std::to_string(delta) + " exceeds the " +
                                std::to_string(ctx.candidates().size()) + " candidate cells");

  switch (alg) {
    case Algorithm::greedy:
      greedy(ctx);
      break;
    case Algorithm::hill_climbing:
      run_with_restarts([](SearchContext& c, std::vector<int> s, Rng&) { return hill_climb(c, std::move(s)); },
                        ctx, config.seed, "hc");
      break;
    case Algorithm::tabu_search: {
      const TabuParams params{config.tabu_max_iters};
      run_with_restarts(
          [&params](SearchContext& c, std::vector<int> s, Rng& rng) {
            return tabu_search(c, std::move(s), params, rng);
          },
          ctx, config.seed, "ts");
      break;
    }
    case Algorithm::evolutionary: {
      const EvolutionParams params{config.population_size, config.crossover_prob,
                                   config.mutation_prob.value_or(1.0 / delta)};
      Rng rng(derive_seed(config.seed, "ea", 0));
      evolutionary(ctx, params, rng);
      break;
    }
  }

  RunRecord rec;
  rec.algorithm = alg;
  rec.seed = config.seed;
  rec.evaluations = ctx.evaluations();
  rec.seconds = ctx.elapsed_seconds();
  if (!ctx.has_best()) throw std::runtime_error("solve: budget too small to evaluate a single placement");
  rec.best = ctx.to_placement(ctx.best_slots());
  rec.best_value = ctx.best_value();
  return rec;
}

}  // namespace detplace
