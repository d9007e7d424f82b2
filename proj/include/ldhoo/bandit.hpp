#pragma once

// LD-HOO: hierarchical optimistic optimization over a binary partition tree
// whose depth is capped at max_depth. Leaving max_depth unset gives the
// classic unlimited-depth HOO, which uses identical formulas.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <utility>
#include <vector>

#include "ldhoo/errors.hpp"
#include "ldhoo/partition.hpp"

namespace ldhoo {

/// ceil(ln n), the default depth schedule.
inline int default_max_depth(std::int64_t horizon) {
  if (horizon < 1) throw UsageError("default_max_depth: horizon must be >= 1");
  return static_cast<int>(std::ceil(std::log(static_cast<double>(horizon))));
}

template <typename Scalar>
struct BanditConfig {
  Scalar nu1 = Scalar(1);
  Scalar rho = Scalar(0.25);
  std::optional<int> max_depth;  // unset: unlimited depth (HOO)
  std::int64_t horizon = 1;
  SamplingMode sampling = SamplingMode::center;
  std::uint64_t seed = 0;

  /// LD-HOO with the ceil(ln n) depth schedule.
  static BanditConfig limited(std::int64_t n, Scalar nu1, Scalar rho,
                              SamplingMode mode = SamplingMode::center, std::uint64_t seed = 0) {
    return {nu1, rho, default_max_depth(n), n, mode, seed};
  }

  static BanditConfig unlimited(std::int64_t n, Scalar nu1, Scalar rho,
                                SamplingMode mode = SamplingMode::center,
                                std::uint64_t seed = 0) {
    return {nu1, rho, std::nullopt, n, mode, seed};
  }

  void validate() const {
    if (!(nu1 > Scalar(0))) throw UsageError("BanditConfig: nu1 must be > 0");
    if (!(rho > Scalar(0) && rho < Scalar(1))) throw UsageError("BanditConfig: rho must lie in (0, 1)");
    if (horizon < 1) throw UsageError("BanditConfig: horizon must be >= 1");
    if (max_depth && *max_depth < 0) throw UsageError("BanditConfig: max_depth must be >= 0");
  }
};

/// mu_hat + sqrt(2 ln t / T) + nu1 rho^h; +inf for an unvisited cell.
template <typename Scalar>
Scalar u_value(const Cell<Scalar>& cell, std::int64_t t, Scalar nu1, Scalar rho) {
  if (cell.visits == 0) return std::numeric_limits<Scalar>::infinity();
  const Scalar visits = static_cast<Scalar>(cell.visits);
  const Scalar radius = std::sqrt(Scalar(2) * std::log(static_cast<Scalar>(t)) / visits);
  return cell.reward_sum / visits + radius + nu1 * std::pow(rho, cell.id.depth);
}

/// b-value of `node`, reading the already-current b-values of its children.
template <typename Scalar>
Scalar b_value(const PartitionTree<Scalar>& tree, int node, std::int64_t t, Scalar nu1, Scalar rho) {
  const Cell<Scalar>& cell = tree[node];
  const Scalar u = u_value(cell, t, nu1, rho);
  if (cell.visits == 0 || cell.is_leaf()) return u;
  const Scalar best_child = std::max(tree[cell.children[0]].b_value, tree[cell.children[1]].b_value);
  return std::min(u, best_child);
}

/// Recomputes u- and b-values of every node for round t, leaves first.
template <typename Scalar>
void refresh_b_values(PartitionTree<Scalar>& tree, std::int64_t t, Scalar nu1, Scalar rho) {
  for (int node = static_cast<int>(tree.size()) - 1; node >= 0; --node) {
    tree[node].u_value = u_value(tree[node], t, nu1, rho);
    tree[node].b_value = b_value(tree, node, t, nu1, rho);
  }
}

/// Arena id of the visited cell with the highest empirical mean; ties go to
/// the deeper cell, then to the lower index.
template <typename Scalar>
int best_empirical_cell(const PartitionTree<Scalar>& tree) {
  int best = kNoNode;
  for (int node = 0; node < static_cast<int>(tree.size()); ++node) {
    const Cell<Scalar>& c = tree[node];
    if (c.visits == 0) continue;
    if (best == kNoNode) {
      best = node;
      continue;
    }
    const Cell<Scalar>& b = tree[best];
    const Scalar mc = c.mean();
    const Scalar mb = b.mean();
    if (mc > mb || (mc == mb && (c.id.depth > b.id.depth ||
                                 (c.id.depth == b.id.depth && c.id.index < b.id.index)))) {
      best = node;
    }
  }
  if (best == kNoNode) throw UsageError("recommend: no visited cell");
  return best;
}

template <typename Scalar>
struct TraceRow {
  std::int64_t t = 0;
  CellIndex cell;
  Vector<Scalar> action;
  Scalar reward = Scalar(0);
  Scalar cumulative_reward = Scalar(0);
  std::size_t node_count = 0;
  std::int64_t elapsed_ns = 0;
};

/// One LD-HOO (or HOO) instance. Each round is either a single `step`, or a
/// `select` followed by the matching `update` once the reward is known.
template <typename Scalar>
class HooBandit {
 public:
  using Rng = std::mt19937_64;

  struct Pull {
    int node = kNoNode;
    Vector<Scalar> action;
  };

  HooBandit(const ActionSpace<Scalar>& space, BanditConfig<Scalar> config)
      : config_(std::move(config)),
        tree_(space),
        rng_(config_.seed),
        start_(std::chrono::steady_clock::now()) {
    config_.validate();
  }

  const BanditConfig<Scalar>& config() const { return config_; }
  const PartitionTree<Scalar>& tree() const { return tree_; }
  std::int64_t round() const { return rounds_; }
  const std::vector<TraceRow<Scalar>>& trace() const { return trace_; }
  Scalar cumulative_reward() const { return cumulative_reward_; }

  /// Refreshes b-values, walks the optimistic path to a leaf and samples an
  /// action from it.
  Pull select() {
    if (pending_) throw UsageError("HooBandit::select: previous pull has not been updated");
    if (rounds_ >= config_.horizon) {
      std::ostringstream msg;
      msg << "HooBandit::select: horizon " << config_.horizon << " exhausted";
      throw UsageError(msg.str());
    }
    const std::int64_t t = rounds_ + 1;
    refresh_b_values(tree_, t, config_.nu1, config_.rho);

    int node = 0;
    while (!tree_[node].is_leaf()) {
      const auto& kids = tree_[node].children;
      // Ties go to the lower-index child.
      const int next = tree_[kids[1]].b_value > tree_[kids[0]].b_value ? kids[1] : kids[0];
      if (tree_[node].b_value > tree_[next].b_value) {
        throw AccountingError("HooBandit::select: b-value of selected child is below its parent");
      }
      node = next;
    }
    pending_ = true;
    return {node, sample_in(tree_[node], config_.sampling, rng_)};
  }

  /// Records the reward of `pull`: updates the leaf and all its ancestors and
  /// expands the leaf if it lies above the depth cap.
  void update(const Pull& pull, Scalar reward) {
    if (!pending_) throw UsageError("HooBandit::update: no pending pull");
    pending_ = false;
    if (!(reward >= Scalar(0) && reward <= Scalar(1))) {
      std::ostringstream msg;
      msg << "HooBandit::update: reward " << reward << " outside [0, 1]";
      throw DataError(msg.str());
    }
    for (int node = pull.node; node != kNoNode; node = tree_[node].parent) {
      tree_[node].visits += 1;
      tree_[node].reward_sum += reward;
    }
    if (!config_.max_depth || tree_[pull.node].id.depth < *config_.max_depth) {
      tree_.expand(pull.node);
    }
    ++rounds_;
    cumulative_reward_ += reward;
    const auto now = std::chrono::steady_clock::now();
    trace_.push_back({rounds_, tree_[pull.node].id, pull.action, reward, cumulative_reward_,
                      tree_.size(),
                      std::chrono::duration_cast<std::chrono::nanoseconds>(now - start_).count()});
  }

  /// One full round against `reward_fn(action) -> reward`.
  template <typename RewardFn>
  std::pair<Vector<Scalar>, Scalar> step(RewardFn&& reward_fn) {
    Pull pull = select();
    Scalar reward;
    try {
      reward = static_cast<Scalar>(reward_fn(pull.action));
    } catch (...) {
      pending_ = false;
      throw;
    }
    update(pull, reward);
    return {std::move(pull.action), reward};
  }

  int recommended_node() const { return best_empirical_cell(tree_); }

  Vector<Scalar> recommend() { return sample_in(tree_[recommended_node()], config_.sampling, rng_); }

 private:
  BanditConfig<Scalar> config_;
  PartitionTree<Scalar> tree_;
  Rng rng_;
  std::chrono::steady_clock::time_point start_;
  std::int64_t rounds_ = 0;
  Scalar cumulative_reward_ = Scalar(0);
  bool pending_ = false;
  std::vector<TraceRow<Scalar>> trace_;
};

template <typename Scalar>
struct BanditRun {
  HooBandit<Scalar> state;
  Vector<Scalar> recommendation;
};

/// Plays `config.horizon` rounds and returns the final state and recommendation.
template <typename Scalar, typename RewardFn>
BanditRun<Scalar> run(const ActionSpace<Scalar>& space, const BanditConfig<Scalar>& config,
                      RewardFn&& reward_fn) {
  HooBandit<Scalar> bandit(space, config);
  for (std::int64_t t = 0; t < config.horizon; ++t) bandit.step(reward_fn);
  Vector<Scalar> x = bandit.recommend();
  return {std::move(bandit), std::move(x)};
}

}  // namespace ldhoo
