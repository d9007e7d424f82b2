#pragma once

// Deterministic control environments with rewards normalized to [0, 1].
// Each exposes the generative-model surface used by the planner:
// action_space(), reset(seed), step(state, action), is_terminal(state) and
// horizon().

#include <cstdint>
#include <numbers>

#include "ldhoo/partition.hpp"

namespace ldhoo {

template <typename State>
struct Transition {
  State next;
  double reward = 0.0;
  bool terminal = false;
};

// ---------------------------------------------------------------- cart-pole

inline constexpr double kDefaultGravityFactor = 10.0;

struct CartPoleParams {
  double gravity = 9.8;         // m/s^2
  double gravity_factor = 1.0;  // multiplies gravity
  double cart_mass = 1.0;       // kg
  double pole_mass = 0.1;       // kg
  double half_length = 0.5;     // m, pivot to pole center of mass
  double max_force = 10.0;      // N
  double tau = 0.02;            // s
  double theta_limit = 12.0 * 2.0 * std::numbers::pi / 360.0;
  double x_limit = 2.4;
  int horizon = 150;
  double init_range = 0.05;  // reset draws every state component from U(-r, r)

  double effective_gravity() const { return gravity * gravity_factor; }

  static CartPoleParams increased_gravity(double factor = kDefaultGravityFactor) {
    CartPoleParams p;
    p.gravity_factor = factor;
    return p;
  }
};

struct CartPoleState {
  double x = 0.0;
  double x_dot = 0.0;
  double theta = 0.0;
  double theta_dot = 0.0;

  friend bool operator==(const CartPoleState&, const CartPoleState&) = default;
};

bool cartpole_terminal(const CartPoleState& s, const CartPoleParams& params);

/// One semi-implicit Euler step. Reward is 1 for a step taken from a
/// non-terminal state and 0 otherwise.
Transition<CartPoleState> cartpole_step(const CartPoleState& s, double force,
                                        const CartPoleParams& params);

/// cartpole_step with gravity scaled by `factor`.
Transition<CartPoleState> cartpole_ig_step(const CartPoleState& s, double force,
                                           CartPoleParams params,
                                           double factor = kDefaultGravityFactor);

class CartPole {
 public:
  using State = CartPoleState;

  explicit CartPole(CartPoleParams params = {}) : params_(params) {}

  const CartPoleParams& params() const { return params_; }
  ActionSpace<double> action_space() const {
    return ActionSpace<double>::interval(-params_.max_force, params_.max_force);
  }
  State reset(std::uint64_t seed) const;
  Transition<State> step(const State& s, const VectorXd& action) const {
    return cartpole_step(s, action[0], params_);
  }
  bool is_terminal(const State& s) const { return cartpole_terminal(s, params_); }
  int horizon() const { return params_.horizon; }

 private:
  CartPoleParams params_;
};

// ---------------------------------------------------------------- pendulum

struct PendulumParams {
  double gravity = 10.0;
  double mass = 1.0;
  double length = 1.0;
  double dt = 0.05;
  double max_speed = 8.0;
  double max_torque = 2.0;
  int horizon = 100;

  /// Largest raw cost over the admissible state-action box.
  double max_cost() const {
    return std::numbers::pi * std::numbers::pi + 0.1 * max_speed * max_speed +
           0.001 * max_torque * max_torque;
  }
};

/// theta = 0 is upright.
struct PendulumState {
  double theta = 0.0;
  double theta_dot = 0.0;

  friend bool operator==(const PendulumState&, const PendulumState&) = default;
};

/// Maps an angle to (-pi, pi].
double wrap_angle(double theta);

/// theta^2 + 0.1 theta_dot^2 + 0.001 torque^2 on the wrapped angle.
double pendulum_cost(const PendulumState& s, double torque);

/// One semi-implicit Euler step; reward 1 - cost / max_cost, never terminal.
Transition<PendulumState> pendulum_step(const PendulumState& s, double torque,
                                        const PendulumParams& params);

/// Mechanical energy per unit inertia, 0.5 theta_dot^2 + (3g / 2l) cos(theta).
double pendulum_energy(const PendulumState& s, const PendulumParams& params);

class Pendulum {
 public:
  using State = PendulumState;

  explicit Pendulum(PendulumParams params = {}) : params_(params) {}

  const PendulumParams& params() const { return params_; }
  ActionSpace<double> action_space() const {
    return ActionSpace<double>::interval(-params_.max_torque, params_.max_torque);
  }
  /// Angle above the horizontal, U(-pi/2, pi/2); velocity U(-1, 1).
  State reset(std::uint64_t seed) const;
  Transition<State> step(const State& s, const VectorXd& action) const {
    return pendulum_step(s, action[0], params_);
  }
  bool is_terminal(const State&) const { return false; }
  int horizon() const { return params_.horizon; }

 private:
  PendulumParams params_;
};

}  // namespace ldhoo
