#include "ldhoo/objectives.hpp"

#include <algorithm>
#include <cmath>

#include "ldhoo/errors.hpp"

namespace ldhoo {

double sine_product(double x) { return 0.5 * (std::sin(13.0 * x) * std::sin(27.0 * x) + 1.0); }

NoisyObjective make_objective(std::function<double(double)> mean_fn, double sigma, double lower,
                              double upper) {
  if (!(sigma >= 0.0)) throw UsageError("make_objective: noise sigma must be >= 0");
  if (!(lower < upper)) throw UsageError("make_objective: lower must be < upper");
  NoisyObjective obj;
  obj.mean_fn = std::move(mean_fn);
  obj.noise_sigma = sigma;
  obj.lower = lower;
  obj.upper = upper;
  std::tie(obj.optimum_x, obj.optimum_value) = optimum(obj.mean_fn, lower, upper);
  return obj;
}

NoisyObjective sine_product_objective(double sigma) {
  return make_objective(sine_product, sigma, 0.0, 1.0);
}

std::pair<double, double> optimum(const std::function<double(double)>& f, double lower,
                                  double upper, double resolution) {
  if (!(lower <= upper) || !(resolution > 0.0)) throw UsageError("optimum: invalid interval");
  const auto steps = static_cast<std::int64_t>(std::ceil((upper - lower) / resolution));
  double best_x = lower;
  double best_f = f(lower);
  for (std::int64_t k = 1; k <= steps; ++k) {
    const double x = std::min(upper, lower + static_cast<double>(k) * resolution);
    const double v = f(x);
    if (v > best_f) {
      best_f = v;
      best_x = x;
    }
  }

  double a = std::max(lower, best_x - resolution);
  double b = std::min(upper, best_x + resolution);
  for (int iter = 0; iter < 100 && b - a > 1e-15; ++iter) {
    const double m1 = a + (b - a) / 3.0;
    const double m2 = b - (b - a) / 3.0;
    if (f(m1) < f(m2)) {
      a = m1;
    } else {
      b = m2;
    }
  }
  const double refined = 0.5 * (a + b);
  const double refined_f = f(refined);
  if (refined_f > best_f) return {refined, refined_f};
  return {best_x, best_f};
}

double sample_reward(const NoisyObjective& obj, const VectorXd& x, std::mt19937_64& rng) {
  double y = obj.mean(x);
  if (obj.noise_sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, obj.noise_sigma);
    y += noise(rng);
  }
  return std::clamp(y, 0.0, 1.0);
}

std::vector<double> pseudo_regret(std::span<const double> mean_values, double f_star) {
  std::vector<double> out;
  out.reserve(mean_values.size());
  double total = 0.0;
  for (const double v : mean_values) {
    total += f_star - v;
    out.push_back(total);
  }
  return out;
}

std::vector<double> pseudo_regret(std::span<const TraceRow<double>> trace,
                                  const NoisyObjective& obj) {
  if (trace.empty()) throw UsageError("pseudo_regret: empty trace");
  std::vector<double> means;
  means.reserve(trace.size());
  for (const auto& row : trace) means.push_back(obj.mean(row.action));
  return pseudo_regret(means, obj.optimum_value);
}

}  // namespace ldhoo
