#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <map>
#include <random>
#include <sstream>

#include "json.hpp"
#include "ldhoo/experiments.hpp"

using namespace ldhoo;

namespace {

std::string to_csv(const CsvTable& t) {
  std::ostringstream out;
  write_csv(out, t);
  return out.str();
}

CsvTable table(std::vector<std::string> header, std::vector<std::vector<std::string>> rows) {
  return {std::move(header), std::move(rows)};
}

std::filesystem::path scratch(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("ldhoo_test_experiments_" + name);
}

}  // namespace

TEST_CASE("bandit suite shape") {
  BanditSuiteSpec spec;
  spec.horizons = {10};
  spec.trials = 1;
  CHECK(run_bandit_suite(spec).size() == 2);

  spec.horizons = {5, 20, 40};
  spec.trials = 3;
  const auto records = run_bandit_suite(spec);
  REQUIRE(records.size() == 2 * 3 * 3);
  std::size_t k = 0;
  for (Algo algo : spec.algos) {
    for (auto n : spec.horizons) {
      for (int trial = 0; trial < spec.trials; ++trial, ++k) {
        CHECK(records[k].algo == algo);
        CHECK(records[k].n == n);
        CHECK(records[k].trial == trial);
        CHECK(records[k].seed == trial_seed(spec.base_seed, trial));
        CHECK(records[k].regret_curve.size() == std::size_t(n));
      }
    }
  }
  const auto t = bandit_table(records);
  CHECK(t.rows.size() == records.size());
  CHECK(t.header == std::vector<std::string>{"algo", "n", "trial", "seed", "max_depth", "final_regret",
                                             "node_count", "wall_time_ns"});
}

TEST_CASE("tree sizes at n = 1000") {
  BanditSuiteSpec spec;
  spec.horizons = {1000};
  spec.trials = 2;
  for (const auto& r : run_bandit_suite(spec)) {
    if (r.algo == Algo::ldhoo) {
      CHECK(r.max_depth == 7);
      CHECK(r.node_count <= 255);
    } else {
      CHECK_FALSE(r.max_depth.has_value());
      CHECK(r.node_count == 2001);
    }
  }
}

TEST_CASE("suite output is reproducible across thread counts") {
  BanditSuiteSpec spec;
  spec.horizons = {10, 100};
  spec.trials = 4;
  spec.threads = 1;
  const auto a = to_csv(bandit_table(run_bandit_suite(spec), false));
  spec.threads = 3;
  const auto b = to_csv(bandit_table(run_bandit_suite(spec), false));
  CHECK(a == b);
  spec.base_seed = 1;
  CHECK(to_csv(bandit_table(run_bandit_suite(spec), false)) != a);
}

TEST_CASE("suite specs are validated") {
  BanditSuiteSpec spec;
  spec.trials = 0;
  CHECK_THROWS_AS(run_bandit_suite(spec), UsageError);
  spec = {};
  spec.horizons = {0};
  CHECK_THROWS_AS(run_bandit_suite(spec), UsageError);
  ControlSuiteSpec control;
  control.env = "acrobot";
  CHECK_THROWS_AS(run_control_suite(control), UsageError);
  CHECK_THROWS_AS(parse_algo("ucb"), UsageError);
  CHECK_THROWS_AS(parse_sampling("corner"), UsageError);
  CHECK(parse_algo("hoo") == Algo::hoo);
  CHECK(algo_name(Algo::ldhoo) == "ldhoo");
}

TEST_CASE("summary statistics") {
  SUBCASE("single row has undefined spread") {
    const auto s = summarize(table({"algo", "n", "trial", "final_regret"}, {{"hoo", "10", "0", "3.5"}}));
    REQUIRE(s.rows.size() == 1);
    CHECK(s.rows[0].mean == 3.5);
    CHECK(s.rows[0].std == 0.0);
    CHECK_FALSE(s.rows[0].std_defined);
    const auto j = nlohmann::json::parse(summary_json(s));
    CHECK(j.dump().find("null") != std::string::npos);
  }
  SUBCASE("two rows") {
    const auto s = summarize(table({"algo", "n", "trial", "final_regret"},
                                   {{"hoo", "10", "0", "1"}, {"hoo", "10", "1", "3"}}));
    REQUIRE(s.rows.size() == 1);
    CHECK(s.group_by == std::vector<std::string>{"algo", "n"});
    CHECK(s.rows[0].count == 2);
    CHECK(s.rows[0].mean == 2.0);
    CHECK(s.rows[0].std == doctest::Approx(std::sqrt(2.0)));
    CHECK(s.rows[0].std_defined);
  }
}

TEST_CASE("summary agrees with a direct recomputation") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  CsvTable t{{"algo", "n", "trial", "seed", "x", "y"}, {}};
  std::map<std::pair<std::string, std::string>, std::vector<double>> xs;
  for (int k = 0; k < 200; ++k) {
    const std::string algo = k % 3 == 0 ? "hoo" : "ldhoo";
    const std::string n = std::to_string(10 * (k % 4));
    const double x = u(rng);
    t.rows.push_back({algo, n, std::to_string(k), std::to_string(k), format_double(x), format_double(u(rng))});
    xs[{algo, n}].push_back(x);
  }
  const auto s = summarize(t);
  CHECK(s.rows.size() == xs.size() * 2);
  for (const auto& row : s.rows) {
    CHECK(row.metric != "trial");
    CHECK(row.metric != "seed");
    if (row.metric != "x") continue;
    const auto& v = xs.at({row.group[0], row.group[1]});
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= double(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    CHECK(row.count == v.size());
    CHECK(row.mean == doctest::Approx(mean).epsilon(1e-12));
    CHECK(row.std == doctest::Approx(std::sqrt(ss / double(v.size() - 1))).epsilon(1e-12));
  }

  const auto only = summarize(t, {"algo"}, {"y"});
  CHECK(only.rows.size() == 2);
  CHECK_THROWS_AS(summarize(t, {"missing"}), DataError);

  const auto lt = long_table(t, s);
  CHECK(lt.rows.size() == 2 * t.rows.size());
  CHECK(summary_table(s).rows.size() == s.rows.size());
}

TEST_CASE("concatenation checks schemas") {
  const auto a = table({"algo", "n", "x"}, {{"hoo", "1", "2"}});
  const auto b = table({"algo", "n", "y"}, {{"hoo", "1", "3"}});
  CHECK(concat_tables({a, a}, {"a.csv", "a2.csv"}).rows.size() == 2);
  try {
    concat_tables({a, b}, {"a.csv", "b.csv"});
    FAIL("expected a schema error");
  } catch (const DataError& e) {
    const std::string what = e.what();
    CHECK(what.find("b.csv") != std::string::npos);
    CHECK(what.find("x") != std::string::npos);
    CHECK(what.find("y") != std::string::npos);
  }
}

TEST_CASE("csv round trip") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  CsvTable t{{"a", "b", "c"}, {}};
  for (int k = 0; k < 100; ++k) {
    t.rows.push_back({format_double(u(rng)), format_double(u(rng) * 1e-12), std::to_string(k)});
  }
  const auto path = scratch("roundtrip.csv");
  write_file(path, to_csv(t));
  const auto back = read_csv(path);
  CHECK(back.header == t.header);
  CHECK(back.rows == t.rows);
  for (const auto& row : t.rows) {
    const double x = std::stod(row[0]);
    CHECK(format_double(x) == row[0]);
  }
  std::filesystem::remove(path);
  CHECK_THROWS_AS(read_csv(scratch("does_not_exist.csv")), std::runtime_error);

  const auto bad = scratch("ragged.csv");
  write_file(bad, "a,b\n1,2\n3\n");
  CHECK_THROWS_AS(read_csv(bad), DataError);
  std::filesystem::remove(bad);
}

TEST_CASE("small control suite") {
  ControlSuiteSpec spec;
  spec.env = "pendulum";
  spec.iterations = {20};
  spec.trials = 2;
  spec.lookahead = 5;
  const auto records = run_control_suite(spec);
  REQUIRE(records.size() == 2);
  for (const auto& r : records) {
    CHECK(r.env == "pendulum");
    CHECK(r.steps == 100);
    CHECK(r.max_depth == 3);
    CHECK(r.episode_return >= 0.0);
    CHECK(r.episode_return <= 100.0);
  }
  CHECK(control_table(records).rows.size() == 2);

  spec.threads = 2;
  CHECK(to_csv(control_table(run_control_suite(spec), false)) == to_csv(control_table(records, false)));

  spec.env = "cartpole-ig";
  spec.trials = 1;
  const auto ig = run_control_suite(spec);
  CHECK(ig[0].env == "cartpole-ig");
  CHECK(ig[0].steps <= 150);
  CHECK(ig[0].episode_return == double(ig[0].steps));
}

TEST_CASE("planning time grows with n") {
  ControlSuiteSpec spec;
  spec.env = "pendulum";
  spec.iterations = {20, 400};
  spec.trials = 5;
  spec.lookahead = 20;
  const auto records = run_timing_suite(spec);
  REQUIRE(records.size() == 10);
  std::vector<std::int64_t> small, large;
  for (const auto& r : records) (r.n == 20 ? small : large).push_back(r.plan_time_ns);
  std::sort(small.begin(), small.end());
  std::sort(large.begin(), large.end());
  CHECK(large[2] > small[2]);
  const auto t = timing_table(records, false);
  for (const auto& row : t.rows) CHECK(row[size_t(t.column("plan_time_ns"))] == "0");
}

TEST_CASE("parallel_for visits every index once") {
  for (unsigned threads : {1u, 2u, 8u}) {
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(hits.size(), threads, [&](std::size_t k) { hits[k].fetch_add(1); });
    for (const auto& h : hits) CHECK(h.load() == 1);
  }
}
