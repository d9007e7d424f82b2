#pragma once

// Experiment suites behind the `bench` command: bandit regret/complexity,
// control-episode returns and single-decision planning time. Trials run on
// worker threads; records always come back in (algo, n, trial) order.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ldhoo/bandit.hpp"
#include "ldhoo/envs.hpp"
#include "ldhoo/io.hpp"
#include "ldhoo/objectives.hpp"
#include "ldhoo/planner.hpp"

namespace ldhoo {

enum class Algo { ldhoo, hoo };

Algo parse_algo(std::string_view name);
std::string_view algo_name(Algo algo);
SamplingMode parse_sampling(std::string_view name);

/// Trial k of a suite seeded with `base` uses seed base + k.
inline std::uint64_t trial_seed(std::uint64_t base, int trial) {
  return base + static_cast<std::uint64_t>(trial);
}

// ------------------------------------------------------------------ bandit

struct BanditSuiteSpec {
  std::vector<Algo> algos{Algo::ldhoo, Algo::hoo};
  std::vector<std::int64_t> horizons{10, 50, 100, 500, 1000};
  int trials = 10;
  double nu1 = 1.0;
  double rho = 0.25;
  double sigma = 0.05;
  SamplingMode sampling = SamplingMode::center;
  std::uint64_t base_seed = 0;
  unsigned threads = 1;
  bool keep_traces = false;

  void validate() const;
};

struct BanditRecord {
  Algo algo = Algo::ldhoo;
  std::int64_t n = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  std::optional<int> max_depth;
  double final_regret = 0.0;
  std::size_t node_count = 0;
  std::int64_t wall_time_ns = 0;
  std::vector<double> regret_curve;     // R_1..R_n
  std::vector<TraceRow<double>> trace;  // only with keep_traces
};

BanditConfig<double> bandit_config(Algo algo, std::int64_t n, double nu1, double rho,
                                   SamplingMode mode, std::uint64_t seed);

/// Runs one bandit on `obj` with noise seeded from `seed`; times only the run.
BanditRecord run_bandit_trial(const NoisyObjective& obj, Algo algo, std::int64_t n, int trial,
                              std::uint64_t seed, double nu1, double rho, SamplingMode mode,
                              bool keep_trace);

std::vector<BanditRecord> run_bandit_suite(const BanditSuiteSpec& spec);
std::vector<BanditRecord> run_bandit_suite(const BanditSuiteSpec& spec, const NoisyObjective& obj);

/// `algo,n,trial,seed,max_depth,final_regret,node_count,wall_time_ns`.
CsvTable bandit_table(const std::vector<BanditRecord>& records, bool include_timing = true);

// ----------------------------------------------------------------- control

using Environment = std::variant<CartPole, Pendulum>;

/// "cartpole", "cartpole-ig" or "pendulum".
Environment make_environment(std::string_view id,
                             double gravity_factor = kDefaultGravityFactor);

struct ControlSuiteSpec {
  std::string env = "cartpole";
  std::vector<std::int64_t> iterations{100};
  int trials = 10;
  double nu1 = 4.0;
  double rho = 0.25;
  double gamma = 0.99;
  int lookahead = 50;
  double gravity_factor = kDefaultGravityFactor;
  SamplingMode sampling = SamplingMode::center;
  std::uint64_t base_seed = 0;
  unsigned threads = 1;
  bool keep_episodes = false;

  void validate() const;
};

struct EpisodeRecord {
  std::string env;
  std::int64_t n = 0;
  int max_depth = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  double episode_return = 0.0;
  std::size_t steps = 0;
  double mean_plan_time_ns = 0.0;
  EpisodeResult episode;  // only with keep_episodes
};

std::vector<EpisodeRecord> run_control_suite(const ControlSuiteSpec& spec);

/// `algo,env,n,max_depth,trial,seed,episode_return,steps,mean_plan_time_ns`.
CsvTable control_table(const std::vector<EpisodeRecord>& records, bool include_timing = true);

struct TimingRecord {
  std::string env;
  std::int64_t n = 0;
  int max_depth = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  std::int64_t plan_time_ns = 0;
};

/// Times planning a single action from reset(seed) for every (n, trial).
/// Always sequential so that timings do not contend for cores.
std::vector<TimingRecord> run_timing_suite(const ControlSuiteSpec& spec);

/// `algo,env,n,max_depth,trial,seed,plan_time_ns`.
CsvTable timing_table(const std::vector<TimingRecord>& records, bool include_timing = true);

// --------------------------------------------------------------- summarize

struct SummaryRow {
  std::vector<std::string> group;  // values of the group-by columns
  std::string metric;
  std::size_t count = 0;
  double mean = 0.0;
  double std = 0.0;  // sample (n - 1) convention; 0 when undefined
  bool std_defined = false;
};

struct Summary {
  std::vector<std::string> group_by;
  std::vector<SummaryRow> rows;
};

/// Concatenates tables that share one header. A mismatch raises DataError
/// naming the columns missing from and extra to each table.
CsvTable concat_tables(const std::vector<CsvTable>& tables, const std::vector<std::string>& names);

/// Groups rows by `group_by` (default: whichever of algo, env, n, max_depth
/// exist) and aggregates every metric column (default: numeric columns other
/// than the group keys, trial and seed). Groups appear in first-seen order.
Summary summarize(const CsvTable& table, std::vector<std::string> group_by = {},
                  std::vector<std::string> metrics = {});

/// group columns..., metric, count, mean, std, std_defined.
CsvTable summary_table(const Summary& summary);

/// Long format for plotting: group columns..., metric, value (one row per
/// input value).
CsvTable long_table(const CsvTable& table, const Summary& summary);

std::string summary_json(const Summary& summary);

/// Runs fn(k) for k in [0, count) on up to `threads` workers.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace ldhoo
