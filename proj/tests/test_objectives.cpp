#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "ldhoo/bandit.hpp"
#include "ldhoo/objectives.hpp"

using namespace ldhoo;

namespace {

VectorXd at(double x) { return VectorXd::Constant(1, x); }

/// R_t recomputed from scratch for every t.
std::vector<double> resummed_regret(const std::vector<double>& means, double f_star) {
  std::vector<double> out;
  for (std::size_t t = 1; t <= means.size(); ++t) {
    double played = 0.0;
    for (std::size_t s = 0; s < t; ++s) played += means[s];
    out.push_back(double(t) * f_star - played);
  }
  return out;
}

}  // namespace

TEST_CASE("sine-product mean reward") {
  const auto obj = sine_product_objective(0.0);
  std::mt19937_64 rng(1);
  CHECK(sample_reward(obj, at(0.0), rng) == 0.5);
  for (int k = 0; k <= 100000; ++k) {
    const double f = sine_product(k / 100000.0);
    REQUIRE(f >= 0.0);
    REQUIRE(f <= 1.0);
  }
}

TEST_CASE("noisy rewards: reproducible, clipped, unbiased") {
  const auto obj = sine_product_objective(0.05);
  std::mt19937_64 a(42), b(42);
  for (int k = 0; k < 100; ++k) CHECK(sample_reward(obj, at(0.3), a) == sample_reward(obj, at(0.3), b));

  std::mt19937_64 rng(9);
  const int draws = 100000;
  double sum = 0.0;
  for (int k = 0; k < draws; ++k) {
    const double y = sample_reward(obj, at(0.0), rng);
    REQUIRE(y >= 0.0);
    REQUIRE(y <= 1.0);
    sum += y;
  }
  CHECK(std::abs(sum / draws - 0.5) <= 3.0 * 0.05 / std::sqrt(double(draws)));

  // Near the optimum the noise often pushes past 1; the clip holds.
  std::mt19937_64 hot(5);
  for (int k = 0; k < 10000; ++k) REQUIRE(sample_reward(obj, at(obj.optimum_x), hot) <= 1.0);
}

TEST_CASE("optimum") {
  const auto [cx, cv] = optimum([](double) { return 0.3; }, 0.0, 1.0);
  CHECK(cv == 0.3);
  CHECK(cx >= 0.0);
  CHECK(cx <= 1.0);

  const auto [lx, lv] = optimum([](double x) { return x; }, 0.0, 1.0);
  CHECK(lx == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(lv == doctest::Approx(1.0).epsilon(1e-12));

  // Frozen from an independent 1e-6 grid scan plus bounded scalar refinement.
  const auto obj = sine_product_objective();
  CHECK(obj.optimum_x == doctest::Approx(0.8675262082514454).epsilon(1e-9));
  CHECK(obj.optimum_value == doctest::Approx(0.9755991438115748).epsilon(1e-12));
  for (int k = 0; k <= 200000; ++k) REQUIRE(sine_product(k / 200000.0) <= obj.optimum_value);
}

TEST_CASE("pseudo-regret") {
  const std::vector<double> optimal(50, 0.9);
  for (double r : pseudo_regret(optimal, 0.9)) CHECK(r == 0.0);

  const std::vector<double> gap(40, 0.8);
  const auto rg = pseudo_regret(gap, 0.9);
  for (std::size_t t = 0; t < rg.size(); ++t) CHECK(rg[t] == doctest::Approx(0.1 * double(t + 1)));

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> mixed(300);
  for (auto& m : mixed) m = u(rng);
  const auto fast = pseudo_regret(mixed, 1.0);
  const auto slow = resummed_regret(mixed, 1.0);
  for (std::size_t t = 0; t < fast.size(); ++t) CHECK(fast[t] == doctest::Approx(slow[t]).epsilon(1e-12));
}

TEST_CASE("pseudo-regret of bandit traces is monotone and bounded") {
  const auto obj = sine_product_objective(0.05);
  double min_f = 1.0;
  for (int k = 0; k <= 100000; ++k) min_f = std::min(min_f, sine_product(k / 100000.0));
  for (auto mode : {SamplingMode::center, SamplingMode::uniform}) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      NoisyReward reward(obj, seed);
      auto result = run(obj.action_space(), BanditConfig<double>::limited(400, 1.0, 0.25, mode, seed), reward);
      const auto regret = pseudo_regret(result.state.trace(), obj);
      for (std::size_t t = 1; t < regret.size(); ++t) CHECK(regret[t] >= regret[t - 1]);
      for (std::size_t t = 0; t < regret.size(); ++t) {
        CHECK(regret[t] <= double(t + 1) * (obj.optimum_value - min_f) + 1e-9);
      }
    }
  }
  CHECK_THROWS_AS(pseudo_regret(std::span<const TraceRow<double>>{}, obj), UsageError);
}

TEST_CASE("noiseless LD-HOO regret flattens out") {
  const auto obj = sine_product_objective(0.0);
  NoisyReward reward(obj, 0);
  auto result = run(obj.action_space(), BanditConfig<double>::limited(1000, 1.0, 0.25), reward);
  const auto regret = pseudo_regret(result.state.trace(), obj);
  const double early = regret[99] / 100.0;
  const double late = (regret[999] - regret[899]) / 100.0;
  CHECK(late < early);
}
