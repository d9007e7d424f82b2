#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "ldhoo/bandit.hpp"
#include "ldhoo/partition.hpp"

namespace ldhoo {

/// A one-dimensional mean-reward function observed through Gaussian noise.
struct NoisyObjective {
  std::function<double(double)> mean_fn;
  double noise_sigma = 0.0;
  double lower = 0.0;
  double upper = 1.0;
  double optimum_x = 0.0;
  double optimum_value = 0.0;

  double mean(const VectorXd& x) const { return mean_fn(x[0]); }
  ActionSpace<double> action_space() const { return ActionSpace<double>::interval(lower, upper); }
};

/// f(x) = (sin(13x) sin(27x) + 1) / 2 on [0, 1].
double sine_product(double x);

/// The sine-product benchmark with noise level `sigma` and its optimum
/// located by `optimum`.
NoisyObjective sine_product_objective(double sigma = 0.05);

/// Builds an objective over [lower, upper] and locates its optimum.
NoisyObjective make_objective(std::function<double(double)> mean_fn, double sigma, double lower,
                              double upper);

/// Grid maximizer of f on [lower, upper] at spacing `resolution`, refined by
/// ternary search within one grid step of the best point.
std::pair<double, double> optimum(const std::function<double(double)>& f, double lower,
                                  double upper, double resolution = 1e-6);

/// f(x) + eps, eps ~ N(0, sigma^2), clipped to [0, 1].
double sample_reward(const NoisyObjective& obj, const VectorXd& x, std::mt19937_64& rng);

/// Reward callable for a bandit: owns its noise stream.
class NoisyReward {
 public:
  NoisyReward(const NoisyObjective& obj, std::uint64_t seed) : obj_(&obj), rng_(seed) {}
  double operator()(const VectorXd& x) { return sample_reward(*obj_, x, rng_); }

 private:
  const NoisyObjective* obj_;
  std::mt19937_64 rng_;
};

/// Running cumulative pseudo-regret R_t = t f* - sum_{s<=t} f(x_s).
std::vector<double> pseudo_regret(std::span<const double> mean_values, double f_star);

/// Pseudo-regret of a bandit trace, evaluating the objective's mean at each
/// played action.
std::vector<double> pseudo_regret(std::span<const TraceRow<double>> trace,
                                  const NoisyObjective& obj);

}  // namespace ldhoo
