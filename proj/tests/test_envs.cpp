#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "ldhoo/envs.hpp"

using namespace ldhoo;

namespace {

constexpr double kPi = std::numbers::pi;

int steps_to_terminal(CartPoleState s, double factor, int limit) {
  for (int t = 1; t <= limit; ++t) {
    const auto tr = cartpole_ig_step(s, 0.0, CartPoleParams{}, factor);
    if (tr.terminal) return t;
    s = tr.next;
  }
  return limit + 1;
}

}  // namespace

TEST_CASE("cart-pole equilibrium is a fixed point") {
  const CartPoleParams params;
  const auto tr = cartpole_step({}, 0.0, params);
  CHECK(tr.next == CartPoleState{});
  CHECK(tr.reward == 1.0);
  CHECK_FALSE(tr.terminal);
  for (double factor : {1.0, 2.5, 10.0, 50.0}) CHECK(cartpole_ig_step({}, 0.0, params, factor).next == CartPoleState{});
}

TEST_CASE("constant push eventually terminates") {
  const CartPoleParams params;
  CartPoleState s;
  int t = 0;
  bool done = false;
  while (!done && t < 1000) {
    const auto tr = cartpole_step(s, params.max_force, params);
    s = tr.next;
    done = tr.terminal;
    ++t;
  }
  CHECK(done);
  // Stepping from a terminal state earns nothing.
  const auto after = cartpole_step(s, 0.0, params);
  CHECK(after.reward == 0.0);
  CHECK(after.terminal);
}

TEST_CASE("cart-pole single step matches a hand-stepped oracle") {
  const CartPoleState s{0.1, -0.2, 0.05, 0.3};
  const auto tr = cartpole_step(s, 3.7, CartPoleParams{});
  CHECK(tr.next.x == doctest::Approx(0.09742941137453266).epsilon(1e-13));
  CHECK(tr.next.x_dot == doctest::Approx(-0.1285294312733673).epsilon(1e-13));
  CHECK(tr.next.theta == doctest::Approx(0.054152440041522566).epsilon(1e-13));
  CHECK(tr.next.theta_dot == doctest::Approx(0.2076220020761283).epsilon(1e-13));
  CHECK(tr.reward == 1.0);

  const auto heavy = cartpole_ig_step(s, 3.7, CartPoleParams{}, 10.0);
  CHECK(heavy.next.x == doctest::Approx(0.09730057676589038).epsilon(1e-13));
  CHECK(heavy.next.x_dot == doctest::Approx(-0.13497116170548104).epsilon(1e-13));
  CHECK(heavy.next.theta == doctest::Approx(0.0569903480777209).epsilon(1e-13));
  CHECK(heavy.next.theta_dot == doctest::Approx(0.34951740388604485).epsilon(1e-13));
}

TEST_CASE("gravity factor 1 is plain cart-pole") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-0.1, 0.1), f(-10.0, 10.0);
  for (int k = 0; k < 1000; ++k) {
    const CartPoleState s{u(rng), u(rng), u(rng), u(rng)};
    const double force = f(rng);
    const auto a = cartpole_step(s, force, CartPoleParams{});
    const auto b = cartpole_ig_step(s, force, CartPoleParams{}, 1.0);
    CHECK(a.next == b.next);
    CHECK(a.reward == b.reward);
    CHECK(a.terminal == b.terminal);
  }
}

TEST_CASE("heavier gravity falls no slower") {
  for (double tilt : {0.01, 0.05, -0.03}) {
    const CartPoleState s{0.0, 0.0, tilt, 0.0};
    int previous = 1 << 30;
    for (double factor : {1.0, 2.0, 4.0, 10.0, 20.0}) {
      const int t = steps_to_terminal(s, factor, 5000);
      CHECK(t <= previous);
      previous = t;
    }
  }
}

TEST_CASE("cart-pole rejects bad input") {
  const CartPoleParams params;
  CHECK_THROWS_AS(cartpole_step({std::nan(""), 0, 0, 0}, 0.0, params), IntegrationError);
  CHECK_THROWS_AS(cartpole_step({}, std::nan(""), params), IntegrationError);
  CHECK_THROWS_AS(cartpole_step({}, 10.5, params), UsageError);
}

TEST_CASE("cart-pole environment surface") {
  const CartPole env;
  CHECK(env.horizon() == 150);
  CHECK(env.action_space().lower()[0] == -10.0);
  CHECK(env.action_space().upper()[0] == 10.0);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto s = env.reset(seed);
    CHECK(std::abs(s.x) <= 0.05);
    CHECK(std::abs(s.theta) <= 0.05);
    CHECK_FALSE(env.is_terminal(s));
    CHECK(env.reset(seed) == s);
  }
  const CartPole heavy(CartPoleParams::increased_gravity());
  CHECK(heavy.params().effective_gravity() == doctest::Approx(98.0));
}

TEST_CASE("angle wrapping") {
  CHECK(wrap_angle(0.0) == 0.0);
  CHECK(wrap_angle(kPi) == kPi);
  CHECK(wrap_angle(-kPi) == kPi);
  CHECK(wrap_angle(3.0 * kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(2.0 * kPi + 0.25) == doctest::Approx(0.25));
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int k = 0; k < 10000; ++k) {
    const double w = wrap_angle(u(rng));
    REQUIRE(w > -kPi);
    REQUIRE(w <= kPi);
  }
}

TEST_CASE("pendulum rewards") {
  const PendulumParams params;
  CHECK(params.max_cost() == doctest::Approx(16.27360440108936));
  CHECK(pendulum_step({0.0, 0.0}, 0.0, params).reward == 1.0);
  CHECK(pendulum_step({kPi, 0.0}, 0.0, params).reward == doctest::Approx(0.39352068799038253).epsilon(1e-14));
  CHECK_FALSE(pendulum_step({kPi, 0.0}, 0.0, params).terminal);
}

TEST_CASE("pendulum single step matches a hand-stepped oracle") {
  const auto tr = pendulum_step({0.7, -1.3}, 1.1, PendulumParams{});
  CHECK(tr.next.theta == doctest::Approx(0.6674081632714134).epsilon(1e-13));
  CHECK(tr.next.theta_dot == doctest::Approx(-0.6518367345717317).epsilon(1e-13));
  CHECK(tr.reward == doctest::Approx(0.9594306225143456).epsilon(1e-13));
}

TEST_CASE("pendulum rewards stay in [0, 1] and angles stay wrapped") {
  const PendulumParams params;
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> th(-4.0 * kPi, 4.0 * kPi), vel(-params.max_speed, params.max_speed),
      u(-params.max_torque, params.max_torque);
  for (int k = 0; k < 1000000; ++k) {
    const auto tr = pendulum_step({th(rng), vel(rng)}, u(rng), params);
    if (!(tr.reward >= 0.0 && tr.reward <= 1.0 && tr.next.theta > -kPi && tr.next.theta <= kPi &&
          std::abs(tr.next.theta_dot) <= params.max_speed)) {
      FAIL("pendulum step out of range at draw " << k);
    }
  }
}

TEST_CASE("cart-pole rewards stay in [0, 1]") {
  const CartPoleParams params;
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> x(-3.0, 3.0), v(-5.0, 5.0), th(-0.5, 0.5), f(-10.0, 10.0);
  for (int k = 0; k < 1000000; ++k) {
    const auto tr = cartpole_step({x(rng), v(rng), th(rng), v(rng)}, f(rng), params);
    if (!(tr.reward == 0.0 || tr.reward == 1.0)) FAIL("cart-pole reward out of range at draw " << k);
  }
}

TEST_CASE("pendulum energy stays bounded without torque") {
  const PendulumParams params;
  // Released one radian from hanging; peak speed stays below the cap.
  PendulumState s{kPi - 1.0, 0.0};
  const double e0 = pendulum_energy(s, params);
  const double k = 3.0 * params.gravity / (2.0 * params.length);
  double max_speed = 0.0;
  double max_dev = 0.0;
  for (int t = 0; t < 1000; ++t) {
    s = pendulum_step(s, 0.0, params).next;
    max_speed = std::max(max_speed, std::abs(s.theta_dot));
    max_dev = std::max(max_dev, std::abs(pendulum_energy(s, params) - e0));
  }
  REQUIRE(max_speed < params.max_speed);
  // Symplectic Euler conserves a modified energy within (dt / 2) |theta_dot| k |sin theta|
  // of the true one, with no secular drift.
  CHECK(max_dev <= 0.5 * params.dt * max_speed * k);
}

TEST_CASE("pendulum environment surface") {
  const Pendulum env;
  CHECK(env.horizon() == 100);
  CHECK(env.action_space().upper()[0] == 2.0);
  CHECK_THROWS_AS(pendulum_step({0.0, 0.0}, 2.5, env.params()), UsageError);
  CHECK_THROWS_AS(pendulum_step({std::nan(""), 0.0}, 0.0, env.params()), IntegrationError);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto s = env.reset(seed);
    CHECK(std::abs(s.theta) <= kPi / 2.0);
    CHECK(std::abs(s.theta_dot) <= 1.0);
    CHECK(env.reset(seed) == s);
  }
}

TEST_CASE("steps are deterministic") {
  const CartPoleState c{0.2, 0.1, -0.04, 0.3};
  CHECK(cartpole_step(c, 2.0, CartPoleParams{}).next == cartpole_step(c, 2.0, CartPoleParams{}).next);
  const PendulumState p{1.0, -2.0};
  CHECK(pendulum_step(p, -1.0, PendulumParams{}).next == pendulum_step(p, -1.0, PendulumParams{}).next);
}
