#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "algorithms.hpp"
#include "errors.hpp"
#include "harness.hpp"
#include "problems.hpp"
#include "random.hpp"
#include "stats.hpp"

namespace noisyopt {

struct ProblemEntry {
  std::string id;
  ProblemSpec spec;

  friend bool operator==(const ProblemEntry&, const ProblemEntry&) = default;
};

struct AlgorithmEntry {
  std::string id;
  AlgorithmSpec spec;

  friend bool operator==(const AlgorithmEntry&, const AlgorithmEntry&) = default;
};

/// Full experimental grid: problems x algorithms x rules x r_values, each
/// cell run for `trials` independent trials with budget `budget`.
struct ExperimentConfig {
  std::vector<ProblemEntry> problems;
  std::vector<AlgorithmEntry> algorithms;
  std::vector<StoppingRule> rules;
  std::vector<std::uint32_t> r_values;
  std::uint64_t trials = 10000;
  std::uint64_t budget = 500;
  std::uint64_t master_seed = 1;
  /// Confidence level of the reported Wilson intervals.
  double confidence = 0.95;
  /// When set, the rules of a (problem, algorithm, r) triple share their
  /// random streams trial by trial.
  bool paired_rules = false;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

inline constexpr std::size_t kDefaultDimension = 10;
inline constexpr std::uint32_t kDefaultMaxResampling = 50;

/// n = 10 Noisy OneMax (N(0,1)) and Noisy PMax, RMHC and (1+1)-EA with
/// p = 1/n, both stopping rules, r = 1..50, T = 500, 10,000 trials.
inline ExperimentConfig default_config() {
  ExperimentConfig cfg;
  cfg.problems = {{"onemax", OneMaxGaussian(kDefaultDimension)}, {"pmax", PMax(kDefaultDimension)}};
  cfg.algorithms = {{"opo-ea", OnePlusOneEa{}}, {"rmhc", Rmhc{}}};
  cfg.rules = {StoppingRule::FirstHittingTime, StoppingRule::FixedBudget};
  for (std::uint32_t r = 1; r <= kDefaultMaxResampling; ++r) cfg.r_values.push_back(r);
  return cfg;
}

/// Throws ConfigError naming the first offending key.
inline void validate(const ExperimentConfig& cfg) {
  const auto check_ids = [](const auto& entries, const char* key) {
    if (entries.empty()) throw ConfigError(key, "must not be empty");
    std::set<std::string> seen;
    for (const auto& e : entries) {
      if (e.id.empty()) throw ConfigError(key, "entry id must not be empty");
      if (!seen.insert(e.id).second) throw ConfigError(key, "duplicate id '" + e.id + "'");
    }
  };
  check_ids(cfg.problems, "problems");
  check_ids(cfg.algorithms, "algorithms");
  for (const auto& a : cfg.algorithms) {
    if (const auto* ea = std::get_if<OnePlusOneEa>(&a.spec); ea && ea->mutation_prob) {
      const double p = *ea->mutation_prob;
      if (!(p > 0.0 && p <= 1.0)) throw ConfigError("mutation_prob", "must be in (0, 1]");
    }
  }
  if (cfg.rules.empty()) throw ConfigError("rules", "must not be empty");
  if (std::set<StoppingRule>(cfg.rules.begin(), cfg.rules.end()).size() != cfg.rules.size()) {
    throw ConfigError("rules", "duplicate value");
  }
  if (cfg.r_values.empty()) throw ConfigError("r_values", "must not be empty");
  for (std::size_t i = 0; i < cfg.r_values.size(); ++i) {
    if (cfg.r_values[i] < 1) throw ConfigError("r_values", "values must be at least 1");
    if (i > 0 && cfg.r_values[i] == cfg.r_values[i - 1]) {
      throw ConfigError("r_values", "duplicate value " + std::to_string(cfg.r_values[i]));
    }
    if (i > 0 && cfg.r_values[i] < cfg.r_values[i - 1]) {
      throw ConfigError("r_values", "values must be sorted ascending");
    }
  }
  if (cfg.trials < 1) throw ConfigError("trials", "must be at least 1");
  if (cfg.trials > 0xffffffffULL) throw ConfigError("trials", "must be below 2^32");
  if (cfg.budget < 1) throw ConfigError("budget", "must be at least 1");
  if (!(cfg.confidence > 0.0 && cfg.confidence < 1.0)) {
    throw ConfigError("confidence", "must be in (0, 1)");
  }
}

/// One grid cell. Cells are enumerated problem-major, then algorithm, rule
/// and r; `ordinal` is the position in that order.
struct Cell {
  std::size_t ordinal;
  std::size_t problem;
  std::size_t algorithm;
  std::size_t rule;
  std::size_t r_index;
};

inline std::vector<Cell> enumerate_cells(const ExperimentConfig& cfg) {
  std::vector<Cell> cells;
  cells.reserve(cfg.problems.size() * cfg.algorithms.size() * cfg.rules.size() *
                cfg.r_values.size());
  for (std::size_t p = 0; p < cfg.problems.size(); ++p)
    for (std::size_t a = 0; a < cfg.algorithms.size(); ++a)
      for (std::size_t k = 0; k < cfg.rules.size(); ++k)
        for (std::size_t i = 0; i < cfg.r_values.size(); ++i)
          cells.push_back({cells.size(), p, a, k, i});
  return cells;
}

/// Ordinal used to key a cell's random streams. In paired mode every rule of
/// a (problem, algorithm, r) triple maps to the ordinal of its first rule.
inline std::uint64_t stream_ordinal(const ExperimentConfig& cfg, const Cell& cell) {
  if (!cfg.paired_rules) return cell.ordinal;
  const std::size_t rules = cfg.rules.size();
  const std::size_t rs = cfg.r_values.size();
  return ((cell.problem * cfg.algorithms.size() + cell.algorithm) * rules) * rs + cell.r_index;
}

inline RandomStream trial_stream(const ExperimentConfig& cfg, const Cell& cell,
                                 std::uint64_t trial) {
  return RandomStream(trial_seed(cfg.master_seed, stream_ordinal(cfg, cell), trial));
}

/// Replays trial `trial` of `cell` exactly as `run_cells` runs it.
inline TrialResult run_cell_trial(const ExperimentConfig& cfg, const Cell& cell,
                                  std::uint64_t trial) {
  RandomStream rng = trial_stream(cfg, cell, trial);
  return run_trial(cfg.algorithms[cell.algorithm].spec, cfg.problems[cell.problem].spec,
                   cfg.rules[cell.rule], ResamplingRate(cfg.r_values[cell.r_index]), cfg.budget,
                   rng);
}

/// Integer aggregate of a set of trials. Merging is exact, so the total does
/// not depend on the order in which partial tallies are combined.
struct CellTally {
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
  std::uint64_t evals_sum = 0;
  std::uint64_t evals_min = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t evals_max = 0;
  std::uint64_t hits = 0;
  std::uint64_t hit_evals_sum = 0;

  void add(const TrialResult& t) {
    ++trials;
    successes += t.success ? 1 : 0;
    evals_sum += t.evals_used;
    evals_min = std::min(evals_min, t.evals_used);
    evals_max = std::max(evals_max, t.evals_used);
    if (t.first_hit_evals) {
      ++hits;
      hit_evals_sum += *t.first_hit_evals;
    }
  }

  void merge(const CellTally& o) {
    trials += o.trials;
    successes += o.successes;
    evals_sum += o.evals_sum;
    evals_min = std::min(evals_min, o.evals_min);
    evals_max = std::max(evals_max, o.evals_max);
    hits += o.hits;
    hit_evals_sum += o.hit_evals_sum;
  }

  friend bool operator==(const CellTally&, const CellTally&) = default;
};

/// Runs every trial of every cell on `threads` workers (0 = one per hardware
/// thread) and returns one tally per cell, indexed by cell ordinal.
inline std::vector<CellTally> run_cells(const ExperimentConfig& cfg, unsigned threads = 1) {
  validate(cfg);
  const std::vector<Cell> cells = enumerate_cells(cfg);
  constexpr std::uint64_t kBlock = 256;
  const std::uint64_t blocks_per_cell = (cfg.trials + kBlock - 1) / kBlock;
  const std::uint64_t units = cells.size() * blocks_per_cell;

  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, units));

  std::vector<CellTally> tallies(cells.size());
  std::mutex merge_mutex;
  std::atomic<std::uint64_t> next_unit{0};
  std::exception_ptr failure;

  const auto worker = [&] {
    try {
      for (std::uint64_t u = next_unit++; u < units; u = next_unit++) {
        const Cell& cell = cells[u / blocks_per_cell];
        const std::uint64_t first = (u % blocks_per_cell) * kBlock;
        const std::uint64_t last = std::min(cfg.trials, first + kBlock);
        CellTally partial;
        for (std::uint64_t t = first; t < last; ++t) partial.add(run_cell_trial(cfg, cell, t));
        std::lock_guard lock(merge_mutex);
        tallies[cell.ordinal].merge(partial);
      }
    } catch (...) {
      std::lock_guard lock(merge_mutex);
      if (!failure) failure = std::current_exception();
      next_unit = units;
    }
  };

  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return tallies;
}

/// Aggregated outcome of one grid cell.
struct ResultRow {
  std::string problem;
  std::string algorithm;
  std::string rule;
  std::uint32_t r = 1;
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
  double success_rate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double mean_evals_used = 0.0;
  std::optional<double> mean_first_hit_evals;

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

inline std::vector<ResultRow> make_rows(const ExperimentConfig& cfg,
                                        const std::vector<CellTally>& tallies) {
  const std::vector<Cell> cells = enumerate_cells(cfg);
  detail::require(tallies.size() == cells.size(), "make_rows: tally count does not match grid");
  std::vector<ResultRow> rows;
  rows.reserve(cells.size());
  for (const Cell& cell : cells) {
    const CellTally& t = tallies[cell.ordinal];
    ResultRow row;
    row.problem = cfg.problems[cell.problem].id;
    row.algorithm = cfg.algorithms[cell.algorithm].id;
    row.rule = std::string(to_string(cfg.rules[cell.rule]));
    row.r = cfg.r_values[cell.r_index];
    row.trials = t.trials;
    row.successes = t.successes;
    const double n = static_cast<double>(t.trials);
    row.success_rate = static_cast<double>(t.successes) / n;
    const Interval ci = wilson_interval(t.successes, t.trials, cfg.confidence);
    row.ci_low = ci.low;
    row.ci_high = ci.high;
    row.mean_evals_used = static_cast<double>(t.evals_sum) / n;
    if (t.hits > 0) {
      row.mean_first_hit_evals = static_cast<double>(t.hit_evals_sum) / static_cast<double>(t.hits);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Runs the whole grid. Output is a deterministic function of `cfg`; the
/// worker count only affects speed.
inline std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg, unsigned threads = 1) {
  return make_rows(cfg, run_cells(cfg, threads));
}

/// Best success rate of one (problem, algorithm, rule) group and the smallest
/// r that attains it.
struct BestRSummary {
  std::string problem;
  std::string algorithm;
  std::string rule;
  double best_rate = 0.0;
  std::uint32_t best_r = 1;

  friend bool operator==(const BestRSummary&, const BestRSummary&) = default;
};

/// Groups rows by (problem, algorithm, rule) in order of first appearance.
inline std::vector<BestRSummary> best_r_summary(const std::vector<ResultRow>& rows) {
  detail::require(!rows.empty(), "best_r_summary: no rows");
  std::vector<BestRSummary> out;
  for (const ResultRow& row : rows) {
    auto it = std::find_if(out.begin(), out.end(), [&](const BestRSummary& s) {
      return s.problem == row.problem && s.algorithm == row.algorithm && s.rule == row.rule;
    });
    if (it == out.end()) {
      out.push_back({row.problem, row.algorithm, row.rule, row.success_rate, row.r});
    } else if (row.success_rate > it->best_rate ||
               (row.success_rate == it->best_rate && row.r < it->best_r)) {
      it->best_rate = row.success_rate;
      it->best_r = row.r;
    }
  }
  return out;
}

}  // namespace noisyopt
