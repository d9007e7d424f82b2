// bench: experiment runner for LD-HOO / HOO bandits and the LD-HOOT planner.
//
//   bench bandit  --algo ldhoo,hoo --n 10,50,100,500,1000 --trials 10 --out regret.csv
//   bench control --env pendulum --iters 100,400 --trials 10 --out pendulum.csv
//   bench timing  --env pendulum --n 100,400,1000 --out timing.csv
//   bench summarize regret.csv --out summary.csv
//
// Any option may also come from a key=value file given with --config; options
// on the command line take precedence over the file.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "ldhoo/experiments.hpp"
#include "ldhoo/io.hpp"

namespace fs = std::filesystem;
using namespace ldhoo;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

/// Pulls `--config FILE` out of `args` and appends `--key=value` for every
/// entry of FILE whose option was not given explicitly.
void apply_config_file(std::vector<std::string>& args) {
  std::string path;
  for (std::size_t k = 1; k < args.size(); ++k) {
    if (args[k] == "--config" && k + 1 < args.size()) {
      path = args[k + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(k),
                 args.begin() + static_cast<std::ptrdiff_t>(k) + 2);
      break;
    }
    if (args[k].rfind("--config=", 0) == 0) {
      path = args[k].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(k));
      break;
    }
  }
  if (path.empty()) return;

  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  std::string line;
  int lineno = 0;
  std::vector<std::string> extra;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected key=value");
    }
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.rfind("--", 0) == 0) key = key.substr(2);
    const std::string flag = "--" + key;
    bool given = false;
    for (const auto& a : args) {
      if (a == flag || a.rfind(flag + "=", 0) == 0) given = true;
    }
    if (!given) extra.push_back(flag + "=" + value);
  }
  args.insert(args.end(), extra.begin(), extra.end());
}

void emit(const CsvTable& table, const std::string& out) {
  std::ostringstream buf;
  write_csv(buf, table);
  if (out.empty() || out == "-") {
    std::cout << buf.str();
  } else {
    write_file(out, buf.str());
  }
}

/// Writes <out>.summary.json next to a results file.
void emit_summary(const CsvTable& table, const std::string& out) {
  if (out.empty() || out == "-") return;
  fs::path p(out);
  p.replace_extension(".summary.json");
  write_file(p, summary_json(summarize(table)));
}

struct PlannerFlags {
  double nu1 = 4.0;
  double rho = 0.25;
  double gamma = 0.99;
  int depth = 50;
  double gravity_factor = kDefaultGravityFactor;
  std::string sampling = "center";
};

void add_planner_flags(CLI::App* cmd, PlannerFlags& f) {
  cmd->add_option("--nu1", f.nu1, "Smoothness constant nu1")->capture_default_str();
  cmd->add_option("--rho", f.rho, "Cell shrink rate rho in (0,1)")->capture_default_str();
  cmd->add_option("--gamma", f.gamma, "Discount factor in (0,1]")->capture_default_str();
  cmd->add_option("--depth", f.depth, "Lookahead D in actions")->capture_default_str();
  cmd->add_option("--gravity-factor", f.gravity_factor, "Gravity multiplier for cartpole-ig")
      ->capture_default_str();
  cmd->add_option("--sampling", f.sampling, "In-cell sampling: center or uniform")
      ->capture_default_str();
}

ControlSuiteSpec control_spec(const PlannerFlags& f, const std::string& env,
                              const std::vector<std::int64_t>& iters, int trials,
                              std::uint64_t seed, unsigned threads) {
  ControlSuiteSpec spec;
  spec.env = env;
  spec.iterations = iters;
  spec.trials = trials;
  spec.nu1 = f.nu1;
  spec.rho = f.rho;
  spec.gamma = f.gamma;
  spec.lookahead = f.depth;
  spec.gravity_factor = f.gravity_factor;
  spec.sampling = parse_sampling(f.sampling);
  spec.base_seed = seed;
  spec.threads = threads;
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  try {
    apply_config_file(args);
  } catch (const std::exception& e) {
    std::cerr << "bench: " << e.what() << "\n";
    return 2;
  }

  CLI::App app{"LD-HOO / LD-HOOT experiment runner"};
  app.require_subcommand(1);
  app.add_option("--config", "key=value file supplying option defaults");

  const unsigned default_threads = std::max(1u, std::thread::hardware_concurrency());
  std::uint64_t seed = 0;
  unsigned threads = default_threads;
  bool no_timing = false;
  std::string out;

  // bandit
  auto* bandit = app.add_subcommand("bandit", "Regret, node count and runtime of LD-HOO vs HOO");
  std::vector<std::string> algos{"ldhoo", "hoo"};
  std::vector<std::int64_t> horizons{10, 50, 100, 500, 1000};
  int bandit_trials = 10;
  double nu1 = 1.0, rho = 0.25, sigma = 0.05;
  std::string bandit_sampling = "center";
  std::string trace_dir;
  bandit->add_option("--algo", algos, "Algorithms (ldhoo,hoo)")->delimiter(',')->capture_default_str();
  bandit->add_option("--n", horizons, "Horizons")->delimiter(',')->capture_default_str();
  bandit->add_option("--trials", bandit_trials, "Trials per (algo, n)")->capture_default_str();
  bandit->add_option("--nu1", nu1, "Smoothness constant nu1")->capture_default_str();
  bandit->add_option("--rho", rho, "Cell shrink rate rho")->capture_default_str();
  bandit->add_option("--sigma", sigma, "Reward noise standard deviation")->capture_default_str();
  bandit->add_option("--sampling", bandit_sampling, "center or uniform")->capture_default_str();
  bandit->add_option("--trace-dir", trace_dir, "Write one per-round trace CSV per run here");

  // control
  auto* control = app.add_subcommand("control", "Episode returns of LD-HOOT on a control task");
  PlannerFlags control_flags;
  std::string env = "cartpole";
  std::vector<std::int64_t> iters{100};
  int control_trials = 10;
  std::string episode_dir;
  control->add_option("--env", env, "cartpole, cartpole-ig or pendulum")->capture_default_str();
  control->add_option("--iters", iters, "Planner iterations per action")->delimiter(',')
      ->capture_default_str();
  control->add_option("--trials", control_trials, "Episodes per iteration count")->capture_default_str();
  control->add_option("--episode-dir", episode_dir, "Write one per-step episode CSV per trial here");
  add_planner_flags(control, control_flags);

  // timing
  auto* timing = app.add_subcommand("timing", "Time to plan a single action");
  PlannerFlags timing_flags;
  std::string timing_env = "pendulum";
  std::vector<std::int64_t> timing_n{100, 400, 1000};
  int timing_trials = 10;
  timing->add_option("--env", timing_env, "cartpole, cartpole-ig or pendulum")->capture_default_str();
  timing->add_option("--n", timing_n, "Planner iterations")->delimiter(',')->capture_default_str();
  timing->add_option("--trials", timing_trials, "Repetitions per n")->capture_default_str();
  add_planner_flags(timing, timing_flags);

  for (auto* cmd : {bandit, control, timing}) {
    cmd->add_option("--seed", seed, "Base seed; trial k uses seed + k")->capture_default_str();
    cmd->add_option("--out", out, "Output CSV (stdout when omitted)");
    cmd->add_flag("--no-timing", no_timing, "Write 0 in timing columns (byte-reproducible output)");
  }
  for (auto* cmd : {bandit, control}) {
    cmd->add_option("--threads", threads, "Worker threads")->capture_default_str();
  }

  // summarize
  auto* summarize_cmd = app.add_subcommand("summarize", "Mean and sample std per group");
  std::vector<std::string> inputs;
  std::vector<std::string> group_by;
  std::vector<std::string> metrics;
  std::string json_out;
  std::string long_out;
  summarize_cmd->add_option("inputs", inputs, "Result CSVs sharing one schema")->required();
  summarize_cmd->add_option("--by", group_by, "Group-by columns")->delimiter(',');
  summarize_cmd->add_option("--metrics", metrics, "Metric columns")->delimiter(',');
  summarize_cmd->add_option("--out", out, "Summary CSV (stdout when omitted)");
  summarize_cmd->add_option("--json", json_out, "Also write the summary as JSON");
  summarize_cmd->add_option("--long", long_out, "Also write plot-ready long-format CSV");

  std::vector<const char*> cargs;
  for (const auto& a : args) cargs.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    const bool with_timing = !no_timing;
    if (bandit->parsed()) {
      BanditSuiteSpec spec;
      spec.algos.clear();
      for (const auto& a : algos) spec.algos.push_back(parse_algo(a));
      spec.horizons = horizons;
      spec.trials = bandit_trials;
      spec.nu1 = nu1;
      spec.rho = rho;
      spec.sigma = sigma;
      spec.sampling = parse_sampling(bandit_sampling);
      spec.base_seed = seed;
      spec.threads = threads;
      spec.keep_traces = !trace_dir.empty();
      const auto records = run_bandit_suite(spec);
      const CsvTable table = bandit_table(records, with_timing);
      emit(table, out);
      emit_summary(table, out);
      for (const auto& r : records) {
        if (!spec.keep_traces) break;
        std::ostringstream name;
        name << "trace_" << algo_name(r.algo) << "_n" << r.n << "_trial" << r.trial << ".csv";
        std::ostringstream buf;
        write_csv(buf, trace_table(r.trace, with_timing));
        write_file(fs::path(trace_dir) / name.str(), buf.str());
      }
    } else if (control->parsed()) {
      ControlSuiteSpec spec =
          control_spec(control_flags, env, iters, control_trials, seed, threads);
      spec.keep_episodes = !episode_dir.empty();
      const auto records = run_control_suite(spec);
      const CsvTable table = control_table(records, with_timing);
      emit(table, out);
      emit_summary(table, out);
      for (const auto& r : records) {
        if (!spec.keep_episodes) break;
        std::ostringstream name;
        name << "episode_" << r.env << "_n" << r.n << "_trial" << r.trial << ".csv";
        std::ostringstream buf;
        write_csv(buf, episode_table(r.episode, with_timing));
        write_file(fs::path(episode_dir) / name.str(), buf.str());
      }
    } else if (timing->parsed()) {
      const ControlSuiteSpec spec =
          control_spec(timing_flags, timing_env, timing_n, timing_trials, seed, 1);
      const CsvTable table = timing_table(run_timing_suite(spec), with_timing);
      emit(table, out);
      emit_summary(table, out);
    } else if (summarize_cmd->parsed()) {
      std::vector<CsvTable> tables;
      for (const auto& path : inputs) tables.push_back(read_csv(path));
      const CsvTable all = concat_tables(tables, inputs);
      const Summary summary = summarize(all, group_by, metrics);
      emit(summary_table(summary), out);
      if (!json_out.empty()) write_file(json_out, summary_json(summary));
      if (!long_out.empty()) {
        std::ostringstream buf;
        write_csv(buf, long_table(all, summary));
        write_file(long_out, buf.str());
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "bench: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
