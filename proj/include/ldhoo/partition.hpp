#pragma once

// Binary hierarchical partitioning of a hyperrectangular action space.
//
// Cells are addressed by (depth, index) with 0-based child indices: the
// children of (h, i) are (h+1, 2i) and (h+1, 2i+1), the lower half taking the
// even index. A cell is split at the midpoint of its longest side, ties going
// to the lowest dimension.

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <random>
#include <sstream>
#include <utility>
#include <vector>

#include "ldhoo/errors.hpp"

namespace ldhoo {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using VectorXd = Vector<double>;

enum class SamplingMode { center, uniform };

/// Axis-aligned closed box [lower, upper].
template <typename Scalar>
struct Box {
  Vector<Scalar> lower;
  Vector<Scalar> upper;

  Eigen::Index dim() const { return lower.size(); }
  Vector<Scalar> side_lengths() const { return upper - lower; }
  Vector<Scalar> center() const { return (lower + upper) / Scalar(2); }

  bool contains(const Vector<Scalar>& x) const {
    return x.size() == dim() && (x.array() >= lower.array()).all() &&
           (x.array() <= upper.array()).all();
  }

  /// Membership with half-open sides [lower, upper), except that a side lying
  /// on the upper face of `root` is closed. With this rule the leaves of a
  /// partition of `root` cover every point of `root` exactly once.
  bool contains_half_open(const Vector<Scalar>& x, const Box& root) const {
    if (x.size() != dim()) return false;
    for (Eigen::Index p = 0; p < dim(); ++p) {
      if (x[p] < lower[p]) return false;
      if (upper[p] == root.upper[p] ? x[p] > upper[p] : x[p] >= upper[p]) return false;
    }
    return true;
  }
};

/// The action space X = prod_p [a_p, b_p].
template <typename Scalar>
class ActionSpace {
 public:
  ActionSpace(Vector<Scalar> lower, Vector<Scalar> upper)
      : box_{std::move(lower), std::move(upper)} {
    if (box_.lower.size() < 1 || box_.lower.size() != box_.upper.size()) {
      throw UsageError("ActionSpace: bounds must be non-empty and of equal dimension");
    }
    for (Eigen::Index p = 0; p < box_.dim(); ++p) {
      if (!(box_.lower[p] < box_.upper[p])) {
        std::ostringstream msg;
        msg << "ActionSpace: lower[" << p << "] must be < upper[" << p << "]";
        throw UsageError(msg.str());
      }
    }
  }

  /// One-dimensional interval [lower, upper].
  static ActionSpace interval(Scalar lower, Scalar upper) {
    return ActionSpace(Vector<Scalar>::Constant(1, lower), Vector<Scalar>::Constant(1, upper));
  }

  static ActionSpace unit_cube(Eigen::Index dim) {
    return ActionSpace(Vector<Scalar>::Zero(dim), Vector<Scalar>::Ones(dim));
  }

  const Box<Scalar>& bounds() const { return box_; }
  Eigen::Index dim() const { return box_.dim(); }
  const Vector<Scalar>& lower() const { return box_.lower; }
  const Vector<Scalar>& upper() const { return box_.upper; }

 private:
  Box<Scalar> box_;
};

struct CellIndex {
  int depth = 0;
  std::uint64_t index = 0;

  CellIndex parent() const { return {depth - 1, index / 2}; }
  std::array<CellIndex, 2> children() const {
    return {CellIndex{depth + 1, 2 * index}, CellIndex{depth + 1, 2 * index + 1}};
  }
  friend bool operator==(const CellIndex&, const CellIndex&) = default;
  friend auto operator<=>(const CellIndex&, const CellIndex&) = default;
};

inline constexpr int kNoNode = -1;

/// A node X_{h,i} of the partition tree together with its bandit statistics.
template <typename Scalar>
struct Cell {
  CellIndex id;
  Box<Scalar> bounds;
  std::int64_t visits = 0;
  Scalar reward_sum = Scalar(0);
  Scalar u_value = std::numeric_limits<Scalar>::infinity();
  Scalar b_value = std::numeric_limits<Scalar>::infinity();
  int parent = kNoNode;
  std::array<int, 2> children{kNoNode, kNoNode};

  bool is_leaf() const { return children[0] == kNoNode; }
  Scalar mean() const { return visits > 0 ? reward_sum / Scalar(visits) : Scalar(0); }
};

/// Index of the dimension that gets halved: longest side, lowest index on ties.
template <typename Scalar>
Eigen::Index split_dimension(const Box<Scalar>& box) {
  const Vector<Scalar> sides = box.side_lengths();
  Eigen::Index best = 0;
  for (Eigen::Index p = 1; p < sides.size(); ++p) {
    if (sides[p] > sides[best]) best = p;
  }
  return best;
}

/// Halves `cell` along its longest side. The returned children carry fresh
/// statistics and are not linked into any tree.
template <typename Scalar>
std::pair<Cell<Scalar>, Cell<Scalar>> split(const Cell<Scalar>& cell) {
  if (!cell.is_leaf()) {
    std::ostringstream msg;
    msg << "split: cell (" << cell.id.depth << ", " << cell.id.index << ") is already split";
    throw StructuralError(msg.str());
  }
  const Eigen::Index p = split_dimension(cell.bounds);
  const Scalar mid = (cell.bounds.lower[p] + cell.bounds.upper[p]) / Scalar(2);
  const auto ids = cell.id.children();

  Cell<Scalar> low;
  low.id = ids[0];
  low.bounds = cell.bounds;
  low.bounds.upper[p] = mid;

  Cell<Scalar> high;
  high.id = ids[1];
  high.bounds = cell.bounds;
  high.bounds.lower[p] = mid;
  return {std::move(low), std::move(high)};
}

template <typename Scalar>
Vector<Scalar> center(const Cell<Scalar>& cell) {
  return cell.bounds.center();
}

/// Draws a point of the closed cell: its center, or uniformly at random.
template <typename Scalar, typename Rng>
Vector<Scalar> sample_in(const Box<Scalar>& box, SamplingMode mode, Rng& rng) {
  if (mode == SamplingMode::center) return box.center();
  std::uniform_real_distribution<Scalar> unit(Scalar(0), Scalar(1));
  Vector<Scalar> x(box.dim());
  for (Eigen::Index p = 0; p < box.dim(); ++p) {
    const Scalar v = box.lower[p] + (box.upper[p] - box.lower[p]) * unit(rng);
    x[p] = std::clamp(v, box.lower[p], box.upper[p]);
  }
  return x;
}

template <typename Scalar, typename Rng>
Vector<Scalar> sample_in(const Cell<Scalar>& cell, SamplingMode mode, Rng& rng) {
  return sample_in(cell.bounds, mode, rng);
}

/// Arena-backed binary partition tree. Node 0 is the root (0, 0); children are
/// always appended after their parent, so reverse arena order is a post-order.
template <typename Scalar>
class PartitionTree {
 public:
  explicit PartitionTree(const ActionSpace<Scalar>& space) : root_box_(space.bounds()) {
    Cell<Scalar> root;
    root.bounds = root_box_;
    nodes_.push_back(std::move(root));
  }

  const Cell<Scalar>& root() const { return nodes_.front(); }
  const Cell<Scalar>& operator[](int node) const { return nodes_[static_cast<std::size_t>(node)]; }
  Cell<Scalar>& operator[](int node) { return nodes_[static_cast<std::size_t>(node)]; }
  std::size_t size() const { return nodes_.size(); }
  const std::vector<Cell<Scalar>>& nodes() const { return nodes_; }
  const Box<Scalar>& root_bounds() const { return root_box_; }

  /// Adds both children of `node` and returns their arena ids.
  std::array<int, 2> expand(int node) {
    auto [low, high] = split(nodes_[static_cast<std::size_t>(node)]);
    const int first = static_cast<int>(nodes_.size());
    low.parent = node;
    high.parent = node;
    nodes_.push_back(std::move(low));
    nodes_.push_back(std::move(high));
    nodes_[static_cast<std::size_t>(node)].children = {first, first + 1};
    return {first, first + 1};
  }

  int max_depth() const {
    int depth = 0;
    for (const auto& c : nodes_) depth = std::max(depth, c.id.depth);
    return depth;
  }

  std::vector<int> leaves() const {
    std::vector<int> out;
    for (int k = 0; k < static_cast<int>(nodes_.size()); ++k) {
      if (nodes_[static_cast<std::size_t>(k)].is_leaf()) out.push_back(k);
    }
    return out;
  }

  /// Leaf containing `x` under the half-open membership rule, or kNoNode.
  int locate(const Vector<Scalar>& x) const {
    if (!root_box_.contains(x)) return kNoNode;
    int node = 0;
    while (!nodes_[static_cast<std::size_t>(node)].is_leaf()) {
      const auto& kids = nodes_[static_cast<std::size_t>(node)].children;
      node = nodes_[static_cast<std::size_t>(kids[0])].bounds.contains_half_open(x, root_box_)
                 ? kids[0]
                 : kids[1];
    }
    return node;
  }

 private:
  Box<Scalar> root_box_;
  std::vector<Cell<Scalar>> nodes_;
};

}  // namespace ldhoo
