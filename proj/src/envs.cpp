#include "ldhoo/envs.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "ldhoo/errors.hpp"

namespace ldhoo {

namespace {

void check_finite(const CartPoleState& s, const char* where) {
  if (!std::isfinite(s.x) || !std::isfinite(s.x_dot) || !std::isfinite(s.theta) ||
      !std::isfinite(s.theta_dot)) {
    throw IntegrationError(std::string(where) + ": non-finite cart-pole state");
  }
}

void check_action(double a, double limit, const char* where) {
  if (std::isnan(a)) throw IntegrationError(std::string(where) + ": NaN action");
  if (std::abs(a) > limit) {
    std::ostringstream msg;
    msg << where << ": action " << a << " outside [" << -limit << ", " << limit << "]";
    throw UsageError(msg.str());
  }
}

}  // namespace

bool cartpole_terminal(const CartPoleState& s, const CartPoleParams& params) {
  return std::abs(s.x) > params.x_limit || std::abs(s.theta) > params.theta_limit;
}

Transition<CartPoleState> cartpole_step(const CartPoleState& s, double force,
                                        const CartPoleParams& params) {
  check_finite(s, "cartpole_step");
  check_action(force, params.max_force, "cartpole_step");
  if (cartpole_terminal(s, params)) return {s, 0.0, true};

  const double total_mass = params.cart_mass + params.pole_mass;
  const double pole_moment = params.pole_mass * params.half_length;
  const double sin_t = std::sin(s.theta);
  const double cos_t = std::cos(s.theta);

  const double temp = (force + pole_moment * s.theta_dot * s.theta_dot * sin_t) / total_mass;
  const double theta_acc =
      (params.effective_gravity() * sin_t - cos_t * temp) /
      (params.half_length * (4.0 / 3.0 - params.pole_mass * cos_t * cos_t / total_mass));
  const double x_acc = temp - pole_moment * theta_acc * cos_t / total_mass;

  CartPoleState next;
  next.x_dot = s.x_dot + params.tau * x_acc;
  next.x = s.x + params.tau * next.x_dot;
  next.theta_dot = s.theta_dot + params.tau * theta_acc;
  next.theta = s.theta + params.tau * next.theta_dot;
  check_finite(next, "cartpole_step");

  return {next, 1.0, cartpole_terminal(next, params)};
}

Transition<CartPoleState> cartpole_ig_step(const CartPoleState& s, double force,
                                           CartPoleParams params, double factor) {
  params.gravity_factor = factor;
  return cartpole_step(s, force, params);
}

CartPoleState CartPole::reset(std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-params_.init_range, params_.init_range);
  CartPoleState s;
  s.x = u(rng);
  s.x_dot = u(rng);
  s.theta = u(rng);
  s.theta_dot = u(rng);
  return s;
}

double wrap_angle(double theta) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(theta + std::numbers::pi, two_pi);
  if (r < 0.0) r += two_pi;
  const double wrapped = r - std::numbers::pi;
  return wrapped <= -std::numbers::pi ? std::numbers::pi : wrapped;
}

double pendulum_cost(const PendulumState& s, double torque) {
  const double th = wrap_angle(s.theta);
  return th * th + 0.1 * s.theta_dot * s.theta_dot + 0.001 * torque * torque;
}

Transition<PendulumState> pendulum_step(const PendulumState& s, double torque,
                                        const PendulumParams& params) {
  if (!std::isfinite(s.theta) || !std::isfinite(s.theta_dot)) {
    throw IntegrationError("pendulum_step: non-finite pendulum state");
  }
  check_action(torque, params.max_torque, "pendulum_step");

  const double cost = pendulum_cost(s, torque);
  const double angular_acc =
      3.0 * params.gravity / (2.0 * params.length) * std::sin(s.theta) +
      3.0 / (params.mass * params.length * params.length) * torque;

  PendulumState next;
  next.theta_dot =
      std::clamp(s.theta_dot + angular_acc * params.dt, -params.max_speed, params.max_speed);
  next.theta = wrap_angle(s.theta + next.theta_dot * params.dt);

  // The cost box assumes |theta_dot| <= max_speed, which the clamp maintains.
  const double reward = std::clamp(1.0 - cost / params.max_cost(), 0.0, 1.0);
  return {next, reward, false};
}

double pendulum_energy(const PendulumState& s, const PendulumParams& params) {
  return 0.5 * s.theta_dot * s.theta_dot +
         3.0 * params.gravity / (2.0 * params.length) * std::cos(s.theta);
}

PendulumState Pendulum::reset(std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(-std::numbers::pi / 2.0, std::numbers::pi / 2.0);
  std::uniform_real_distribution<double> velocity(-1.0, 1.0);
  PendulumState s;
  s.theta = angle(rng);
  s.theta_dot = velocity(rng);
  return s;
}

}  // namespace ldhoo
