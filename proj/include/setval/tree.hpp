#pragma once

// Set-valued martingale transform on a binary Rademacher tree.
//
// Nodes at level k are indexed 0..2^k-1 by their sign prefix read as a
// binary number, most significant sign first, with '+' = 1 and '-' = 0.
// The children of node s are 2s ('-') and 2s+1 ('+'). Leaves (level N) are
// the atoms of a uniform space with probability 2^-N each.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "setval/finite_space.hpp"

namespace setval {

inline constexpr std::size_t kMaxTreeDepth = 16;

class BinaryTree {
 public:
  /// Throws InvalidArgument unless 1 <= depth <= kMaxTreeDepth.
  explicit BinaryTree(std::size_t depth);

  std::size_t depth() const noexcept { return depth_; }
  std::size_t n_atoms() const noexcept { return std::size_t{1} << depth_; }
  static std::size_t nodes_at(std::size_t level) noexcept { return std::size_t{1} << level; }
  static std::size_t child(std::size_t node, bool up) noexcept { return 2 * node + (up ? 1 : 0); }
  /// Sign of the step that led into `node` (level >= 1).
  static int last_sign(std::size_t node) noexcept { return (node & 1) ? 1 : -1; }
  /// Level-k ancestor of a leaf.
  std::size_t prefix(std::size_t atom, std::size_t level) const noexcept {
    return atom >> (depth_ - level);
  }
  static std::string label(std::size_t level, std::size_t node);
  /// Inverse of label(); throws InvalidArgument on characters other than '+'/'-'.
  static std::size_t node_of(const std::string& label);

  const SpacePtr& space() const noexcept { return space_; }
  const Filtration& filtration() const noexcept { return filtration_; }

 private:
  std::size_t depth_;
  SpacePtr space_;
  Filtration filtration_;
};

/// Real-valued adapted process: one value per node at levels 0..N.
class TreePointProcess {
 public:
  TreePointProcess(const BinaryTree& tree, std::vector<std::vector<double>> levels);

  std::size_t depth() const noexcept { return levels_.size() - 1; }
  double at(std::size_t level, std::size_t node) const { return levels_.at(level).at(node); }
  const std::vector<std::vector<double>>& levels() const noexcept { return levels_; }
  /// Level-k value lifted to the atoms of the tree's space.
  PointRV rv(const BinaryTree& tree, std::size_t level) const;
  std::vector<PointRV> rvs(const BinaryTree& tree) const;

 private:
  std::vector<std::vector<double>> levels_;
};

/// Real-valued integrand: one value per node at levels 0..N-1.
class PointIntegrand {
 public:
  PointIntegrand(const BinaryTree& tree, std::vector<std::vector<double>> levels);
  static PointIntegrand constant(const BinaryTree& tree, double value);

  std::size_t depth() const noexcept { return levels_.size(); }
  double at(std::size_t level, std::size_t node) const { return levels_.at(level).at(node); }
  const std::vector<std::vector<double>>& levels() const noexcept { return levels_; }

 private:
  std::vector<std::vector<double>> levels_;
};

/// Interval-valued integrand G: one interval per node at levels 0..N-1.
class AdaptedIntervalProcess {
 public:
  AdaptedIntervalProcess(const BinaryTree& tree, std::vector<std::vector<Interval>> levels);
  static AdaptedIntervalProcess constant(const BinaryTree& tree, const Interval& value);
  /// levels[k] applied to every node at level k.
  static AdaptedIntervalProcess per_level(const BinaryTree& tree, const std::vector<Interval>& levels);
  static AdaptedIntervalProcess from_points(const PointIntegrand& g);

  std::size_t depth() const noexcept { return levels_.size(); }
  const Interval& at(std::size_t level, std::size_t node) const { return levels_.at(level).at(node); }
  const std::vector<std::vector<Interval>>& levels() const noexcept { return levels_; }
  bool is_degenerate() const noexcept;
  /// Throws InvalidArgument when some value is not a singleton.
  PointIntegrand points(const BinaryTree& tree) const;

 private:
  AdaptedIntervalProcess() = default;

  std::vector<std::vector<Interval>> levels_;
};

/// Interval-valued adapted process: one interval per node at levels 0..N.
class TreeSetProcess {
 public:
  TreeSetProcess(const BinaryTree& tree, std::vector<std::vector<Interval>> levels);

  std::size_t depth() const noexcept { return levels_.size() - 1; }
  const Interval& at(std::size_t level, std::size_t node) const { return levels_.at(level).at(node); }
  const std::vector<std::vector<Interval>>& levels() const noexcept { return levels_; }
  std::vector<SetRV> rvs(const BinaryTree& tree) const;

 private:
  std::vector<std::vector<Interval>> levels_;
};

/// I_0 = {0}, I_{k+1}(s, e) = I_k(s) + e * G_k(s) for e = +-1.
TreeSetProcess transform(const BinaryTree& tree, const AdaptedIntervalProcess& G);
/// x_0 = initial, x_{k+1}(s, e) = x_k(s) + e * g_k(s).
TreePointProcess transform(const BinaryTree& tree, const PointIntegrand& g, double initial = 0.0);

/// Exact node-level classification: E[x_{k+1} | s] = (x(s+) + x(s-)) / 2.
Classification classify_tree(const TreePointProcess& x);
ClassificationReport classify_tree(const TreeSetProcess& M);

/// Aumann expectation of each level of a tree set process.
std::vector<Interval> level_expectations(const TreeSetProcess& M);

struct Ex1Report {
  std::size_t depth = 0;
  bool degenerate_input = false;
  std::vector<Interval> expectations;               // E(I_n), n = 0..N
  std::optional<std::size_t> first_nondegenerate;  // smallest n with E(I_n) not a singleton
  ClassificationReport classification;
  bool inclusion_everywhere = false;  // E(I_{n+1}|P_n) ⊇ I_n at every cell
  std::optional<DegeneracyWitness> mean_violation;  // from I at first_nondegenerate
  bool certified = false;
};

/// Certifies that the transform of a non-degenerate G is a submartingale and
/// not a martingale. For an everywhere-degenerate G the report sets
/// degenerate_input and certifies the martingale property instead.
Ex1Report verify_ex1(const BinaryTree& tree, const AdaptedIntervalProcess& G);

struct EzzakiReport {
  std::size_t depth = 0;
  std::vector<double> castaing_weights;
  bool members_are_martingales = false;   // (2 - lambda) f_n for every weight
  bool sign_changes = false;              // f_n changes sign with positive probability, n >= 1
  ClassificationReport classification;    // of M_n = [min(f_n, 2f_n), max(f_n, 2f_n)]
  std::vector<Interval> expectations;     // E(M_n)
  std::vector<double> norm_integrals;     // int ||M_n|| dP
  std::vector<double> abs_integrals;      // int |f_n| dP
  bool bound_holds = false;               // int ||M_n|| <= 2 int |f_n| for every n
  double horizon_norm_integral = 0.0;     // values at n = N
  double horizon_abs_integral = 0.0;
  bool certified = false;
};

/// f_n = sum_{k <= n} e_k and M_n = segment(f_n, 2 f_n) on a tree of depth N.
EzzakiReport ezzaki_counterexample(std::size_t depth, std::size_t n_weights = 17);

struct SegmentReport {
  std::size_t depth = 0;
  bool identical_integrands = false;
  TreePointProcess xi;
  TreePointProcess eta;
  TreeSetProcess segment;
  Classification min_classification = Classification::None;
  Classification max_classification = Classification::None;
  ClassificationReport classification;
  std::vector<Interval> expectations;
  bool certified = false;
};

/// Transforms of two point integrands and the segment between them. Throws
/// InvalidArgument when f or g has a non-degenerate value.
SegmentReport segment_process_discrete(const BinaryTree& tree, const AdaptedIntervalProcess& f,
                                       const AdaptedIntervalProcess& g);

}  // namespace setval
