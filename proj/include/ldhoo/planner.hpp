#pragma once

// LD-HOOT: Monte Carlo tree search in which every state node chooses its
// action with its own LD-HOO bandit over the environment's action space.

#include <chrono>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <map>
#include <memory>
#include <random>
#include <sstream>
#include <utility>
#include <vector>

#include "ldhoo/bandit.hpp"
#include "ldhoo/envs.hpp"
#include "ldhoo/errors.hpp"
#include "ldhoo/partition.hpp"

namespace ldhoo {

template <typename M>
concept GenerativeModel = requires(const M& m, const typename M::State& s, const VectorXd& a,
                                   std::uint64_t seed) {
  typename M::State;
  { m.action_space() } -> std::convertible_to<ActionSpace<double>>;
  { m.reset(seed) } -> std::same_as<typename M::State>;
  { m.step(s, a) } -> std::same_as<Transition<typename M::State>>;
  { m.is_terminal(s) } -> std::convertible_to<bool>;
  { m.horizon() } -> std::convertible_to<int>;
};

struct PlannerConfig {
  std::int64_t iterations = 100;
  int lookahead = 50;
  double gamma = 0.99;
  /// Template for every node's bandit; its horizon must equal `iterations`.
  BanditConfig<double> bandit = BanditConfig<double>::limited(100, 4.0, 0.25);
  std::uint64_t seed = 0;

  /// n iterations per decision with the ceil(ln n) depth schedule.
  static PlannerConfig standard(std::int64_t n, int lookahead = 50, double gamma = 0.99,
                                double nu1 = 4.0, double rho = 0.25, std::uint64_t seed = 0,
                                SamplingMode mode = SamplingMode::center) {
    PlannerConfig c;
    c.iterations = n;
    c.lookahead = lookahead;
    c.gamma = gamma;
    c.bandit = BanditConfig<double>::limited(n, nu1, rho, mode, seed);
    c.seed = seed;
    return c;
  }

  /// Upper bound on a discounted return over the lookahead with rewards in
  /// [0, 1]: sum_{k < D} gamma^k.
  double return_bound() const {
    double total = 0.0;
    double discount = 1.0;
    for (int k = 0; k < lookahead; ++k) {
      total += discount;
      discount *= gamma;
    }
    return total;
  }

  void validate() const {
    if (iterations < 1) throw UsageError("PlannerConfig: iterations must be >= 1");
    if (lookahead < 1) throw UsageError("PlannerConfig: lookahead must be >= 1");
    if (!(gamma > 0.0 && gamma <= 1.0)) throw UsageError("PlannerConfig: gamma must lie in (0, 1]");
    if (bandit.horizon != iterations) {
      throw UsageError("PlannerConfig: bandit horizon must equal iterations");
    }
    bandit.validate();
  }
};

/// Identity of a search-tree child: the bandit cell it was drawn from and the
/// exact action. Dynamics are deterministic, so the action fixes the successor.
struct ChildKey {
  CellIndex cell;
  std::vector<double> action;

  friend auto operator<=>(const ChildKey&, const ChildKey&) = default;
};

template <typename State>
struct SearchNode {
  SearchNode(State s, int d, const ActionSpace<double>& space, const BanditConfig<double>& cfg)
      : state(std::move(s)), depth(d), bandit(space, cfg) {}

  State state;
  int depth = 0;
  HooBandit<double> bandit;
  std::map<ChildKey, std::unique_ptr<SearchNode>> children;

  std::size_t subtree_size() const {
    std::size_t n = 1;
    for (const auto& [key, child] : children) n += child->subtree_size();
    return n;
  }

  int subtree_depth() const {
    int d = depth;
    for (const auto& [key, child] : children) d = std::max(d, child->subtree_depth());
    return d;
  }
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30u)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27u)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31u);
}

}  // namespace detail

template <GenerativeModel Model>
struct PlanResult {
  VectorXd action;
  std::unique_ptr<SearchNode<typename Model::State>> root;
};

/// Builds one search tree from `root_state` and picks an action. Holds the
/// random streams for a single decision.
template <GenerativeModel Model>
class Planner {
 public:
  using State = typename Model::State;
  using Node = SearchNode<State>;

  Planner(const Model& model, PlannerConfig config)
      : model_(&model),
        config_(std::move(config)),
        space_(model.action_space()),
        bound_(config_.return_bound()),
        seed_state_(config_.seed),
        rollout_rng_(detail::splitmix64(seed_state_)) {
    config_.validate();
  }

  const PlannerConfig& config() const { return config_; }

  /// Runs `iterations` simulations from a fresh root and returns the root
  /// bandit's recommendation.
  PlanResult<Model> plan(const State& root_state) {
    if (model_->is_terminal(root_state)) throw UsageError("plan_action: root state is terminal");
    // The root bandit uses the configured seed unchanged so that a one-step
    // search reproduces a bare bandit run.
    auto root = std::make_unique<Node>(root_state, 0, space_, config_.bandit);
    for (std::int64_t k = 0; k < config_.iterations; ++k) simulate(*root);
    VectorXd action = root->bandit.recommend();
    return {std::move(action), std::move(root)};
  }

  /// One descent: the node's bandit picks an action, the child (or a fresh
  /// rollout) supplies the continuation, and the rescaled return is fed back.
  /// Returns the unscaled discounted return from `node`.
  double simulate(Node& node) {
    auto pull = node.bandit.select();
    const Transition<State> tr = model_->step(node.state, pull.action);

    double future = 0.0;
    if (!tr.terminal && node.depth + 1 < config_.lookahead) {
      ChildKey key{node.bandit.tree()[pull.node].id,
                   std::vector<double>(pull.action.data(), pull.action.data() + pull.action.size())};
      auto it = node.children.find(key);
      if (it != node.children.end()) {
        future = simulate(*it->second);
      } else {
        BanditConfig<double> cfg = config_.bandit;
        cfg.seed = detail::splitmix64(seed_state_);
        node.children.emplace(std::move(key),
                              std::make_unique<Node>(tr.next, node.depth + 1, space_, cfg));
        future = rollout(tr.next, node.depth + 1);
      }
    }

    const double value = tr.reward + config_.gamma * future;
    node.bandit.update(pull, scale(value));
    return value;
  }

  /// Uniformly random actions from `depth` until termination or the
  /// lookahead; returns the discounted sum of rewards.
  double rollout(State state, int depth) {
    double total = 0.0;
    double discount = 1.0;
    for (int d = depth; d < config_.lookahead; ++d) {
      const VectorXd a = sample_in(space_.bounds(), SamplingMode::uniform, rollout_rng_);
      const Transition<State> tr = model_->step(state, a);
      total += discount * tr.reward;
      discount *= config_.gamma;
      if (tr.terminal) break;
      state = tr.next;
    }
    return total;
  }

  /// Maps a discounted return into [0, 1] by the lookahead bound.
  double scale(double value) const {
    constexpr double slack = 1e-9;
    const double y = value / bound_;
    if (!(y >= -slack && y <= 1.0 + slack)) {
      std::ostringstream msg;
      msg << "Planner: discounted return " << value << " outside [0, " << bound_ << "]";
      throw AccountingError(msg.str());
    }
    return std::clamp(y, 0.0, 1.0);
  }

 private:
  const Model* model_;
  PlannerConfig config_;
  ActionSpace<double> space_;
  double bound_;
  std::uint64_t seed_state_;
  std::mt19937_64 rollout_rng_;
};

template <GenerativeModel Model>
PlanResult<Model> plan_action(const Model& model, const typename Model::State& root_state,
                              const PlannerConfig& config) {
  Planner<Model> planner(model, config);
  return planner.plan(root_state);
}

struct EpisodeStep {
  int step = 0;
  VectorXd action;
  double reward = 0.0;
  double cumulative_reward = 0.0;
  std::int64_t plan_time_ns = 0;
};

struct EpisodeResult {
  double total_reward = 0.0;
  std::vector<EpisodeStep> steps;

  double mean_plan_time_ns() const {
    if (steps.empty()) return 0.0;
    double total = 0.0;
    for (const auto& s : steps) total += static_cast<double>(s.plan_time_ns);
    return total / static_cast<double>(steps.size());
  }
};

/// Seed used for the planner at decision `step` of an episode seeded with
/// `episode_seed`.
inline std::uint64_t decision_seed(std::uint64_t episode_seed, int step) {
  std::uint64_t s = episode_seed ^ (0xa0761d6478bd642full * static_cast<std::uint64_t>(step + 1));
  return detail::splitmix64(s);
}

/// Plays one episode from reset(episode_seed), planning every action with a
/// fresh tree, for at most model.horizon() steps.
template <GenerativeModel Model>
EpisodeResult run_episode(const Model& model, const PlannerConfig& config,
                          std::uint64_t episode_seed) {
  EpisodeResult result;
  typename Model::State state = model.reset(episode_seed);
  for (int t = 1; t <= model.horizon(); ++t) {
    if (model.is_terminal(state)) break;
    PlannerConfig cfg = config;
    cfg.seed = decision_seed(episode_seed, t);
    cfg.bandit.seed = cfg.seed;

    const auto start = std::chrono::steady_clock::now();
    VectorXd action = plan_action(model, state, cfg).action;
    const auto elapsed = std::chrono::duration_cast<std::chrono::nanoseconds>(
                             std::chrono::steady_clock::now() - start)
                             .count();

    const Transition<typename Model::State> tr = model.step(state, action);
    result.total_reward += tr.reward;
    result.steps.push_back({t, std::move(action), tr.reward, result.total_reward, elapsed});
    state = tr.next;
    if (tr.terminal) break;
  }
  return result;
}

}  // namespace ldhoo
