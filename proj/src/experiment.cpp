#include "detplace/experiment.hpp"

#include <omp.h>

#include <algorithm>
#include <charconv>
#include <exception>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <tuple>

#include "detplace/io.hpp"

namespace detplace {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ' ' || ch == '\t' || ch == ',') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

template <class T>
T parse_number(const std::string& text, int line) {
  T value{};
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw ParseError(line, 0, "bad number '" + text + "'");
  return value;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

}  // namespace

std::string infer_class(const fs::path& path) {
  const std::string stem = path.stem().string();
  for (const char* name : {"harbour", "newtown", "oldtown"})
    if (stem.rfind(name, 0) == 0) return name;
  return "unknown";
}

std::vector<ManifestEntry> read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path.string());
  std::vector<ManifestEntry> out;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    line = trim(line);
    if (line.empty()) continue;
    if (number == 1 && line == "seed,class,path") continue;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
      throw ParseError(number, 0, "manifest rows must be 'seed,class,path'");
    ManifestEntry e;
    e.seed = parse_number<std::uint64_t>(line.substr(0, c1), number);
    e.map_class = line.substr(c1 + 1, c2 - c1 - 1);
    e.path = line.substr(c2 + 1);
    out.push_back(std::move(e));
  }
  return out;
}

void write_manifest(const fs::path& path, const std::vector<ManifestEntry>& entries) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write manifest " + path.string());
  out << "seed,class,path\n";
  for (const auto& e : entries) out << e.seed << ',' << e.map_class << ',' << e.path.generic_string() << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

ExperimentSpec read_experiment_spec(std::istream& in, const fs::path& base_dir) {
  ExperimentSpec spec;
  bool have_seconds = false;
  bool have_evals = false;
  spec.budget = {};
  std::string line;
  int number = 0;
  auto resolve = [&base_dir](const std::string& p) {
    const fs::path q(p);
    return q.is_absolute() ? q : base_dir / q;
  };
  while (std::getline(in, line)) {
    ++number;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(number, 0, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string raw = trim(line.substr(eq + 1));
    const auto values = split_list(raw);
    if (values.empty()) throw ParseError(number, static_cast<int>(eq) + 2, "missing value for '" + key + "'");

    if (key == "instances") {
      for (const auto& v : values) spec.instances.push_back({resolve(v), infer_class(v)});
    } else if (key == "manifest") {
      for (const auto& v : values) {
        const fs::path mpath = resolve(v);
        for (const auto& e : read_manifest(mpath))
          spec.instances.push_back({e.path.is_absolute() ? e.path : mpath.parent_path() / e.path, e.map_class});
      }
    } else if (key == "algorithms") {
      spec.algorithms.clear();
      for (const auto& v : values) {
        const auto alg = parse_algorithm(v);
        if (!alg) throw ParseError(number, 0, "unknown algorithm '" + v + "'");
        spec.algorithms.push_back(*alg);
      }
    } else if (key == "models") {
      spec.models.clear();
      for (const auto& v : values) {
        const auto m = parse_attacker_model(v);
        if (!m) throw ParseError(number, 0, "unknown model '" + v + "'");
        spec.models.push_back(*m);
      }
    } else if (key == "deltas") {
      spec.deltas.clear();
      for (const auto& v : values) spec.deltas.push_back(parse_number<int>(v, number));
    } else if (key == "seeds") {
      spec.seeds.clear();
      for (const auto& v : values) spec.seeds.push_back(parse_number<std::uint64_t>(v, number));
    } else if (key == "budget_s") {
      spec.budget.seconds = parse_number<double>(values[0], number);
      have_seconds = true;
    } else if (key == "budget_evals") {
      spec.budget.evaluations = parse_number<std::int64_t>(values[0], number);
      have_evals = true;
    } else if (key == "out") {
      spec.output_dir = resolve(raw);
    } else if (key == "threads") {
      spec.threads = parse_number<int>(values[0], number);
    } else if (key == "pop_size") {
      spec.solver.population_size = parse_number<int>(values[0], number);
    } else if (key == "p_x") {
      spec.solver.crossover_prob = parse_number<double>(values[0], number);
    } else if (key == "p_m") {
      spec.solver.mutation_prob = parse_number<double>(values[0], number);
    } else if (key == "tabu_max_iters") {
      spec.solver.tabu_max_iters = parse_number<int>(values[0], number);
    } else {
      throw ParseError(number, 1, "unknown key '" + key + "'");
    }
  }
  if (!have_seconds && !have_evals) spec.budget = Budget::wall(30.0);
  if (spec.instances.empty()) throw ParseError(number, 0, "experiment lists no instances");
  if (spec.algorithms.empty() || spec.models.empty() || spec.deltas.empty() || spec.seeds.empty())
    throw ParseError(number, 0, "algorithms, models, deltas and seeds must be non-empty");
  return spec;
}

ExperimentSpec load_experiment_spec(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open experiment spec " + path.string());
  return read_experiment_spec(in, path.parent_path());
}

std::vector<ManifestEntry> generate_batch(MapClass map_class, int count, std::uint64_t seed, const fs::path& out_dir,
                                          const GenParams* base_params) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) throw IoError("cannot create output directory " + out_dir.string());
  std::vector<Instance> made(static_cast<std::size_t>(std::max(count, 0)));
  std::vector<std::exception_ptr> errors(made.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (int k = 0; k < count; ++k) {
    try {
      GenParams params = base_params ? *base_params : GenParams::defaults(map_class);
      params.map_class = map_class;
      params.seed = seed + static_cast<std::uint64_t>(k);
      made[k] = generate(params).instance;
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<ManifestEntry> entries;
  for (int k = 0; k < count; ++k) {
    char name[64];
    std::snprintf(name, sizeof name, "%s_%03d.map", to_string(map_class), k);
    save_instance(made[k], out_dir / name);
    entries.push_back({seed + static_cast<std::uint64_t>(k), to_string(map_class), name});
  }
  write_manifest(out_dir / "manifest.csv", entries);
  return entries;
}

double deviation_pct(double w, double best) {
  if (w == best) return 0.0;
  return 100.0 * (w - best) / best;
}

void compute_deviations(std::vector<BenchRow>& rows) {
  std::map<std::tuple<std::string, int, int>, double> best;
  for (const auto& r : rows) {
    if (!r.error.empty()) continue;
    const auto key = std::make_tuple(r.instance, r.delta, static_cast<int>(r.model));
    const auto it = best.find(key);
    if (it == best.end() || r.value < it->second) best[key] = r.value;
  }
  for (auto& r : rows) {
    if (!r.error.empty()) continue;
    r.deviation_pct = deviation_pct(r.value, best.at(std::make_tuple(r.instance, r.delta, static_cast<int>(r.model))));
  }
}

std::vector<SummaryRow> summarize(const std::vector<BenchRow>& rows) {
  std::map<std::tuple<std::string, int, int, int>, std::pair<double, int>> acc;
  for (const auto& r : rows) {
    if (!r.error.empty()) continue;
    auto& a = acc[std::make_tuple(r.map_class, static_cast<int>(r.model), r.delta, static_cast<int>(r.algorithm))];
    a.first += r.deviation_pct;
    a.second += 1;
  }
  std::vector<SummaryRow> out;
  for (const auto& [key, a] : acc) {
    SummaryRow s;
    s.map_class = std::get<0>(key);
    s.model = static_cast<AttackerModel>(std::get<1>(key));
    s.delta = std::get<2>(key);
    s.algorithm = static_cast<Algorithm>(std::get<3>(key));
    s.mean_deviation = a.first / a.second;
    s.runs = a.second;
    out.push_back(s);
  }
  return out;
}

void write_csv_row(std::ostream& out, const BenchRow& r, bool with_deviation) {
  out << csv_field(r.instance) << ',' << csv_field(r.map_class) << ',' << to_string(r.algorithm) << ','
      << to_string(r.model) << ',' << r.delta << ',' << r.seed << ',' << format_double(r.value) << ','
      << r.evaluations << ',' << format_double(r.seconds) << ',';
  if (with_deviation) out << format_double(r.deviation_pct);
  out << '\n';
}

void write_results_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << kCsvHeader << '\n';
  for (const auto& r : rows)
    if (r.error.empty()) write_csv_row(out, r);
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "class,model,delta,alg,mean_deviation_pct,runs\n";
  for (const auto& s : rows)
    out << csv_field(s.map_class) << ',' << to_string(s.model) << ',' << s.delta << ',' << to_string(s.algorithm)
        << ',' << format_double(s.mean_deviation) << ',' << s.runs << '\n';
}

BenchOutcome run_bench(const ExperimentSpec& spec, bool write_files) {
  struct Loaded {
    std::unique_ptr<Problem> problem;
    std::string error;
  };
  std::vector<Loaded> loaded(spec.instances.size());
  for (std::size_t k = 0; k < spec.instances.size(); ++k) {
    try {
      loaded[k].problem = std::make_unique<Problem>(prepare(load_instance(spec.instances[k].path)));
    } catch (const std::exception& e) {
      loaded[k].error = e.what();
    }
  }

  std::vector<BenchRow> rows;
  for (std::size_t k = 0; k < spec.instances.size(); ++k)
    for (AttackerModel model : spec.models)
      for (int delta : spec.deltas)
        for (Algorithm alg : spec.algorithms)
          for (std::size_t s = 0; s < spec.seeds.size(); ++s) {
            if (alg == Algorithm::greedy && s > 0) break;
            BenchRow r;
            r.instance = spec.instances[k].path.filename().string();
            r.map_class = spec.instances[k].map_class;
            r.algorithm = alg;
            r.model = model;
            r.delta = delta;
            r.seed = spec.seeds[s];
            r.error = loaded[k].error;
            r.evaluations = static_cast<std::int64_t>(k);  // instance slot until the run fills it
            rows.push_back(std::move(r));
          }

  const int n = static_cast<int>(rows.size());
  const int threads = spec.threads > 0 ? spec.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (int c = 0; c < n; ++c) {
    BenchRow& r = rows[c];
    if (!r.error.empty()) continue;
    const Problem& problem = *loaded[static_cast<std::size_t>(r.evaluations)].problem;
    try {
      SolverConfig cfg = spec.solver;
      cfg.budget = spec.budget;
      cfg.seed = r.seed;
      cfg.model = r.model;
      const RunRecord rec = solve(problem, r.algorithm, r.delta, cfg);
      r.value = rec.best_value;
      r.evaluations = rec.evaluations;
      r.seconds = rec.seconds;
    } catch (const std::exception& e) {
      r.error = e.what();
    }
  }

  BenchOutcome outcome;
  for (auto& r : rows)
    if (!r.error.empty()) {
      ++outcome.failures;
      r.evaluations = 0;
    }
  compute_deviations(rows);
  std::stable_sort(rows.begin(), rows.end(), [](const BenchRow& a, const BenchRow& b) {
    return std::make_tuple(a.instance, static_cast<int>(a.model), a.delta, static_cast<int>(a.algorithm), a.seed) <
           std::make_tuple(b.instance, static_cast<int>(b.model), b.delta, static_cast<int>(b.algorithm), b.seed);
  });
  outcome.summary = summarize(rows);
  outcome.rows = std::move(rows);

  if (write_files) {
    std::error_code ec;
    fs::create_directories(spec.output_dir, ec);
    std::ofstream results(spec.output_dir / "results.csv", std::ios::binary);
    std::ofstream summary(spec.output_dir / "summary.csv", std::ios::binary);
    if (!results || !summary) throw IoError("cannot write bench output to " + spec.output_dir.string());
    write_results_csv(results, outcome.rows);
    write_summary_csv(summary, outcome.summary);
    if (outcome.failures > 0) {
      std::ofstream failures(spec.output_dir / "failures.csv", std::ios::binary);
      failures << "instance,class,alg,model,delta,seed,error\n";
      for (const auto& r : outcome.rows)
        if (!r.error.empty())
          failures << csv_field(r.instance) << ',' << csv_field(r.map_class) << ',' << to_string(r.algorithm) << ','
                   << to_string(r.model) << ',' << r.delta << ',' << r.seed << ',' << csv_field(r.error) << '\n';
    }
  }
  return outcome;
}

}  // namespace detplace
