#include "ldhoo/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "ldhoo/errors.hpp"

namespace ldhoo {

Algo parse_algo(std::string_view name) {
  if (name == "ldhoo") return Algo::ldhoo;
  if (name == "hoo") return Algo::hoo;
  throw UsageError("unknown algorithm '" + std::string(name) + "' (expected ldhoo or hoo)");
}

std::string_view algo_name(Algo algo) { return algo == Algo::ldhoo ? "ldhoo" : "hoo"; }

SamplingMode parse_sampling(std::string_view name) {
  if (name == "center") return SamplingMode::center;
  if (name == "uniform") return SamplingMode::uniform;
  throw UsageError("unknown sampling mode '" + std::string(name) + "' (expected center or uniform)");
}

void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& fn) {
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  if (workers <= 1) {
    for (std::size_t k = 0; k < count; ++k) fn(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < count; k = next++) {
        try {
          fn(k);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

// ------------------------------------------------------------------ bandit

void BanditSuiteSpec::validate() const {
  if (algos.empty()) throw UsageError("bandit suite: no algorithms");
  if (horizons.empty()) throw UsageError("bandit suite: no horizons");
  if (trials < 1) throw UsageError("bandit suite: trials must be >= 1");
  for (auto n : horizons) {
    if (n < 1) throw UsageError("bandit suite: horizons must be >= 1");
  }
}

BanditConfig<double> bandit_config(Algo algo, std::int64_t n, double nu1, double rho,
                                   SamplingMode mode, std::uint64_t seed) {
  return algo == Algo::ldhoo ? BanditConfig<double>::limited(n, nu1, rho, mode, seed)
                             : BanditConfig<double>::unlimited(n, nu1, rho, mode, seed);
}

BanditRecord run_bandit_trial(const NoisyObjective& obj, Algo algo, std::int64_t n, int trial,
                              std::uint64_t seed, double nu1, double rho, SamplingMode mode,
                              bool keep_trace) {
  const auto cfg = bandit_config(algo, n, nu1, rho, mode, seed);
  NoisyReward reward(obj, seed);
  const ActionSpace<double> space = obj.action_space();

  const auto start = std::chrono::steady_clock::now();
  auto result = run(space, cfg, reward);
  const auto elapsed = std::chrono::steady_clock::now() - start;

  BanditRecord rec;
  rec.algo = algo;
  rec.n = n;
  rec.trial = trial;
  rec.seed = seed;
  rec.max_depth = cfg.max_depth;
  rec.node_count = result.state.tree().size();
  rec.wall_time_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(elapsed).count();
  rec.regret_curve = pseudo_regret(result.state.trace(), obj);
  rec.final_regret = rec.regret_curve.back();
  if (keep_trace) rec.trace = result.state.trace();
  return rec;
}

std::vector<BanditRecord> run_bandit_suite(const BanditSuiteSpec& spec, const NoisyObjective& obj) {
  spec.validate();
  struct Job {
    Algo algo;
    std::int64_t n;
    int trial;
  };
  std::vector<Job> jobs;
  for (Algo a : spec.algos) {
    for (auto n : spec.horizons) {
      for (int k = 0; k < spec.trials; ++k) jobs.push_back({a, n, k});
    }
  }
  std::vector<BanditRecord> out(jobs.size());
  parallel_for(jobs.size(), spec.threads, [&](std::size_t j) {
    const Job& job = jobs[j];
    out[j] = run_bandit_trial(obj, job.algo, job.n, job.trial, trial_seed(spec.base_seed, job.trial),
                              spec.nu1, spec.rho, spec.sampling, spec.keep_traces);
  });
  return out;
}

std::vector<BanditRecord> run_bandit_suite(const BanditSuiteSpec& spec) {
  const NoisyObjective obj = sine_product_objective(spec.sigma);
  return run_bandit_suite(spec, obj);
}

CsvTable bandit_table(const std::vector<BanditRecord>& records, bool include_timing) {
  CsvTable t;
  t.header = {"algo", "n", "trial", "seed", "max_depth", "final_regret", "node_count", "wall_time_ns"};
  for (const auto& r : records) {
    t.rows.push_back({std::string(algo_name(r.algo)), std::to_string(r.n), std::to_string(r.trial),
                      std::to_string(r.seed),
                      r.max_depth ? std::to_string(*r.max_depth) : std::string("unlimited"),
                      format_double(r.final_regret), std::to_string(r.node_count),
                      std::to_string(include_timing ? r.wall_time_ns : 0)});
  }
  return t;
}

// ----------------------------------------------------------------- control

Environment make_environment(std::string_view id, double gravity_factor) {
  if (id == "cartpole") return CartPole{};
  if (id == "cartpole-ig") {
    if (!(gravity_factor > 0.0)) throw UsageError("gravity factor must be > 0");
    return CartPole{CartPoleParams::increased_gravity(gravity_factor)};
  }
  if (id == "pendulum") return Pendulum{};
  throw UsageError("unknown environment '" + std::string(id) +
                   "' (expected cartpole, cartpole-ig or pendulum)");
}

void ControlSuiteSpec::validate() const {
  make_environment(env, gravity_factor);
  if (iterations.empty()) throw UsageError("control suite: no iteration counts");
  if (trials < 1) throw UsageError("control suite: trials must be >= 1");
  for (auto n : iterations) {
    if (n < 1) throw UsageError("control suite: iterations must be >= 1");
  }
}

namespace {

PlannerConfig planner_config(const ControlSuiteSpec& spec, std::int64_t n, std::uint64_t seed) {
  PlannerConfig cfg =
      PlannerConfig::standard(n, spec.lookahead, spec.gamma, spec.nu1, spec.rho, seed, spec.sampling);
  cfg.validate();
  return cfg;
}

}  // namespace

std::vector<EpisodeRecord> run_control_suite(const ControlSuiteSpec& spec) {
  spec.validate();
  const Environment env = make_environment(spec.env, spec.gravity_factor);
  struct Job {
    std::int64_t n;
    int trial;
  };
  std::vector<Job> jobs;
  for (auto n : spec.iterations) {
    for (int k = 0; k < spec.trials; ++k) jobs.push_back({n, k});
  }
  std::vector<EpisodeRecord> out(jobs.size());
  parallel_for(jobs.size(), spec.threads, [&](std::size_t j) {
    const Job& job = jobs[j];
    const std::uint64_t seed = trial_seed(spec.base_seed, job.trial);
    const PlannerConfig cfg = planner_config(spec, job.n, seed);
    EpisodeResult episode =
        std::visit([&](const auto& model) { return run_episode(model, cfg, seed); }, env);
    EpisodeRecord& rec = out[j];
    rec.env = spec.env;
    rec.n = job.n;
    rec.max_depth = *cfg.bandit.max_depth;
    rec.trial = job.trial;
    rec.seed = seed;
    rec.episode_return = episode.total_reward;
    rec.steps = episode.steps.size();
    rec.mean_plan_time_ns = episode.mean_plan_time_ns();
    if (spec.keep_episodes) rec.episode = std::move(episode);
  });
  return out;
}

CsvTable control_table(const std::vector<EpisodeRecord>& records, bool include_timing) {
  CsvTable t;
  t.header = {"algo", "env", "n", "max_depth", "trial", "seed", "episode_return", "steps",
              "mean_plan_time_ns"};
  for (const auto& r : records) {
    t.rows.push_back({"ldhoot", r.env, std::to_string(r.n), std::to_string(r.max_depth),
                      std::to_string(r.trial), std::to_string(r.seed),
                      format_double(r.episode_return), std::to_string(r.steps),
                      format_double(include_timing ? r.mean_plan_time_ns : 0.0)});
  }
  return t;
}

std::vector<TimingRecord> run_timing_suite(const ControlSuiteSpec& spec) {
  spec.validate();
  const Environment env = make_environment(spec.env, spec.gravity_factor);
  std::vector<TimingRecord> out;
  for (auto n : spec.iterations) {
    for (int k = 0; k < spec.trials; ++k) {
      const std::uint64_t seed = trial_seed(spec.base_seed, k);
      const PlannerConfig cfg = planner_config(spec, n, seed);
      const std::int64_t ns = std::visit(
          [&](const auto& model) {
            const auto state = model.reset(seed);
            const auto start = std::chrono::steady_clock::now();
            auto plan = plan_action(model, state, cfg);
            const auto elapsed = std::chrono::steady_clock::now() - start;
            // Tree teardown stays outside the timed region.
            plan.root.reset();
            return std::chrono::duration_cast<std::chrono::nanoseconds>(elapsed).count();
          },
          env);
      out.push_back({spec.env, n, *cfg.bandit.max_depth, k, seed, ns});
    }
  }
  return out;
}

CsvTable timing_table(const std::vector<TimingRecord>& records, bool include_timing) {
  CsvTable t;
  t.header = {"algo", "env", "n", "max_depth", "trial", "seed", "plan_time_ns"};
  for (const auto& r : records) {
    t.rows.push_back({"ldhoot", r.env, std::to_string(r.n), std::to_string(r.max_depth),
                      std::to_string(r.trial), std::to_string(r.seed),
                      std::to_string(include_timing ? r.plan_time_ns : 0)});
  }
  return t;
}

// --------------------------------------------------------------- summarize

namespace {

std::optional<double> parse_number(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : ", ") + s;
  return out.empty() ? "(none)" : out;
}

}  // namespace

CsvTable concat_tables(const std::vector<CsvTable>& tables, const std::vector<std::string>& names) {
  if (tables.empty()) throw UsageError("summarize: no input tables");
  CsvTable out;
  out.header = tables.front().header;
  for (std::size_t k = 0; k < tables.size(); ++k) {
    const CsvTable& t = tables[k];
    if (t.header != out.header) {
      std::vector<std::string> missing;
      std::vector<std::string> extra;
      for (const auto& c : out.header) {
        if (t.column(c) < 0) missing.push_back(c);
      }
      for (const auto& c : t.header) {
        if (out.column(c) < 0) extra.push_back(c);
      }
      std::ostringstream msg;
      msg << "schema mismatch in " << (k < names.size() ? names[k] : "table " + std::to_string(k))
          << ": missing columns [" << join(missing) << "], extra columns [" << join(extra) << "]";
      if (missing.empty() && extra.empty()) msg << ", columns in a different order";
      throw DataError(msg.str());
    }
    out.rows.insert(out.rows.end(), t.rows.begin(), t.rows.end());
  }
  return out;
}

Summary summarize(const CsvTable& table, std::vector<std::string> group_by,
                  std::vector<std::string> metrics) {
  if (group_by.empty()) {
    for (const char* c : {"algo", "env", "n", "max_depth"}) {
      if (table.column(c) >= 0) group_by.emplace_back(c);
    }
  }
  std::vector<int> group_cols;
  for (const auto& g : group_by) {
    const int c = table.column(g);
    if (c < 0) throw DataError("summarize: no column named '" + g + "'");
    group_cols.push_back(c);
  }
  if (metrics.empty()) {
    for (std::size_t c = 0; c < table.header.size(); ++c) {
      const std::string& name = table.header[c];
      if (name == "trial" || name == "seed") continue;
      if (std::find(group_by.begin(), group_by.end(), name) != group_by.end()) continue;
      const bool numeric = std::all_of(table.rows.begin(), table.rows.end(), [&](const auto& row) {
        return parse_number(row[c]).has_value();
      });
      if (numeric && !table.rows.empty()) metrics.push_back(name);
    }
  }
  std::vector<int> metric_cols;
  for (const auto& m : metrics) {
    const int c = table.column(m);
    if (c < 0) throw DataError("summarize: no column named '" + m + "'");
    metric_cols.push_back(c);
  }

  std::vector<std::vector<std::string>> keys;
  std::map<std::vector<std::string>, std::vector<std::vector<double>>> values;
  for (const auto& row : table.rows) {
    std::vector<std::string> key;
    for (int c : group_cols) key.push_back(row[static_cast<std::size_t>(c)]);
    auto [it, inserted] = values.try_emplace(key, metric_cols.size());
    if (inserted) keys.push_back(key);
    for (std::size_t m = 0; m < metric_cols.size(); ++m) {
      const auto& cell = row[static_cast<std::size_t>(metric_cols[m])];
      const auto v = parse_number(cell);
      if (!v) throw DataError("summarize: non-numeric value '" + cell + "' in column " + metrics[m]);
      it->second[m].push_back(*v);
    }
  }

  Summary out;
  out.group_by = group_by;
  for (const auto& key : keys) {
    const auto& per_metric = values.at(key);
    for (std::size_t m = 0; m < metrics.size(); ++m) {
      const auto& xs = per_metric[m];
      SummaryRow row;
      row.group = key;
      row.metric = metrics[m];
      row.count = xs.size();
      double sum = 0.0;
      for (double x : xs) sum += x;
      row.mean = sum / static_cast<double>(xs.size());
      if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - row.mean) * (x - row.mean);
        row.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
        row.std_defined = true;
      }
      out.rows.push_back(std::move(row));
    }
  }
  return out;
}

CsvTable summary_table(const Summary& summary) {
  CsvTable t;
  t.header = summary.group_by;
  for (const char* c : {"metric", "count", "mean", "std", "std_defined"}) t.header.emplace_back(c);
  for (const auto& r : summary.rows) {
    std::vector<std::string> row = r.group;
    row.push_back(r.metric);
    row.push_back(std::to_string(r.count));
    row.push_back(format_double(r.mean));
    row.push_back(format_double(r.std));
    row.push_back(r.std_defined ? "1" : "0");
    t.rows.push_back(std::move(row));
  }
  return t;
}

CsvTable long_table(const CsvTable& table, const Summary& summary) {
  CsvTable t;
  t.header = summary.group_by;
  t.header.emplace_back("metric");
  t.header.emplace_back("value");
  std::vector<std::string> metrics;
  for (const auto& r : summary.rows) {
    if (std::find(metrics.begin(), metrics.end(), r.metric) == metrics.end()) metrics.push_back(r.metric);
  }
  for (const auto& row : table.rows) {
    std::vector<std::string> key;
    for (const auto& g : summary.group_by) key.push_back(row[static_cast<std::size_t>(table.column(g))]);
    for (const auto& m : metrics) {
      std::vector<std::string> out = key;
      out.push_back(m);
      out.push_back(row[static_cast<std::size_t>(table.column(m))]);
      t.rows.push_back(std::move(out));
    }
  }
  return t;
}

std::string summary_json(const Summary& summary) {
  nlohmann::ordered_json doc;
  doc["group_by"] = summary.group_by;
  doc["groups"] = nlohmann::ordered_json::array();
  for (const auto& r : summary.rows) {
    nlohmann::ordered_json g;
    for (std::size_t k = 0; k < summary.group_by.size(); ++k) g[summary.group_by[k]] = r.group[k];
    g["metric"] = r.metric;
    g["count"] = r.count;
    g["mean"] = r.mean;
    g["std"] = r.std_defined ? nlohmann::ordered_json(r.std) : nlohmann::ordered_json(nullptr);
    doc["groups"].push_back(std::move(g));
  }
  return doc.dump(2) + "\n";
}

}  // namespace ldhoo
