#include "setval/tree.hpp"

#include <algorithm>
#include <cmath>

namespace setval {

namespace {

constexpr std::size_t kCrossCheckDepth = 10;

template <typename T>
void require_level_sizes(const std::vector<std::vector<T>>& levels, std::size_t count,
                         const char* what) {
  if (levels.size() != count) {
    throw Error(ErrorKind::LengthMismatch, std::string(what) + " needs " + std::to_string(count) +
                                               " levels, got " + std::to_string(levels.size()));
  }
  for (std::size_t k = 0; k < levels.size(); ++k) {
    if (levels[k].size() != BinaryTree::nodes_at(k)) {
      throw Error(ErrorKind::LengthMismatch, std::string(what) + " level " + std::to_string(k) +
                                                 " needs " +
                                                 std::to_string(BinaryTree::nodes_at(k)) +
                                                 " nodes");
    }
  }
}

Filtration prefix_filtration(std::size_t depth) {
  const std::size_t n = std::size_t{1} << depth;
  std::vector<Partition> levels;
  levels.reserve(depth + 1);
  for (std::size_t k = 0; k <= depth; ++k) {
    std::vector<std::vector<std::size_t>> cells(std::size_t{1} << k);
    for (auto& c : cells) c.reserve(std::size_t{1} << (depth - k));
    for (std::size_t w = 0; w < n; ++w) cells[w >> (depth - k)].push_back(w);
    levels.emplace_back(n, std::move(cells));
  }
  return Filtration(std::move(levels));
}

std::size_t checked_depth(std::size_t depth) {
  if (depth < 1 || depth > kMaxTreeDepth) {
    throw Error(ErrorKind::InvalidArgument,
                "tree depth must be in 1.." + std::to_string(kMaxTreeDepth) + ", got " +
                    std::to_string(depth));
  }
  return depth;
}

Interval node_average(const Interval& up, const Interval& down) {
  return Interval::make(0.5 * (up.lo() + down.lo()), 0.5 * (up.hi() + down.hi()));
}

bool is_weak_super(Classification c) {
  return c == Classification::Supermartingale || c == Classification::Martingale;
}
bool is_weak_sub(Classification c) {
  return c == Classification::Submartingale || c == Classification::Martingale;
}

}  // namespace

// ---------------------------------------------------------------------------

BinaryTree::BinaryTree(std::size_t depth)
    : depth_(checked_depth(depth)),
      space_(make_space(FiniteProbSpace::uniform(std::size_t{1} << depth))),
      filtration_(prefix_filtration(depth)) {}

std::string BinaryTree::label(std::size_t level, std::size_t node) {
  std::string s(level, '-');
  for (std::size_t i = 0; i < level; ++i) {
    if ((node >> (level - 1 - i)) & 1) s[i] = '+';
  }
  return s;
}

std::size_t BinaryTree::node_of(const std::string& label) {
  std::size_t node = 0;
  for (char c : label) {
    if (c != '+' && c != '-') throw Error(ErrorKind::InvalidArgument, "bad sign label " + label);
    node = 2 * node + (c == '+' ? 1 : 0);
  }
  return node;
}

TreePointProcess::TreePointProcess(const BinaryTree& tree, std::vector<std::vector<double>> levels)
    : levels_(std::move(levels)) {
  require_level_sizes(levels_, tree.depth() + 1, "tree process");
}

PointRV TreePointProcess::rv(const BinaryTree& tree, std::size_t level) const {
  std::vector<double> vals(tree.n_atoms());
  for (std::size_t w = 0; w < vals.size(); ++w) vals[w] = levels_.at(level)[tree.prefix(w, level)];
  return PointRV(tree.space(), vals);
}

std::vector<PointRV> TreePointProcess::rvs(const BinaryTree& tree) const {
  std::vector<PointRV> out;
  out.reserve(levels_.size());
  for (std::size_t k = 0; k < levels_.size(); ++k) out.push_back(rv(tree, k));
  return out;
}

PointIntegrand::PointIntegrand(const BinaryTree& tree, std::vector<std::vector<double>> levels)
    : levels_(std::move(levels)) {
  require_level_sizes(levels_, tree.depth(), "integrand");
}

PointIntegrand PointIntegrand::constant(const BinaryTree& tree, double value) {
  std::vector<std::vector<double>> levels;
  for (std::size_t k = 0; k < tree.depth(); ++k) levels.emplace_back(BinaryTree::nodes_at(k), value);
  return PointIntegrand(tree, std::move(levels));
}

AdaptedIntervalProcess::AdaptedIntervalProcess(const BinaryTree& tree,
                                               std::vector<std::vector<Interval>> levels)
    : levels_(std::move(levels)) {
  require_level_sizes(levels_, tree.depth(), "integrand");
}

AdaptedIntervalProcess AdaptedIntervalProcess::constant(const BinaryTree& tree,
                                                        const Interval& value) {
  return per_level(tree, std::vector<Interval>(tree.depth(), value));
}

AdaptedIntervalProcess AdaptedIntervalProcess::per_level(const BinaryTree& tree,
                                                         const std::vector<Interval>& levels) {
  if (levels.size() != tree.depth()) {
    throw Error(ErrorKind::LengthMismatch, "need one interval per level");
  }
  std::vector<std::vector<Interval>> out;
  for (std::size_t k = 0; k < levels.size(); ++k) out.emplace_back(BinaryTree::nodes_at(k), levels[k]);
  return AdaptedIntervalProcess(tree, std::move(out));
}

AdaptedIntervalProcess AdaptedIntervalProcess::from_points(const PointIntegrand& g) {
  AdaptedIntervalProcess out;
  for (const auto& level : g.levels()) {
    std::vector<Interval> row;
    row.reserve(level.size());
    for (double x : level) row.push_back(Interval::point(x));
    out.levels_.push_back(std::move(row));
  }
  return out;
}

bool AdaptedIntervalProcess::is_degenerate() const noexcept {
  for (const auto& level : levels_) {
    for (const auto& iv : level) {
      if (!iv.is_degenerate()) return false;
    }
  }
  return true;
}

PointIntegrand AdaptedIntervalProcess::points(const BinaryTree& tree) const {
  std::vector<std::vector<double>> levels;
  for (const auto& level : levels_) {
    std::vector<double> row;
    row.reserve(level.size());
    for (const auto& iv : level) {
      if (!iv.is_degenerate()) throw Error(ErrorKind::InvalidArgument, "integrand is not point-valued");
      row.push_back(iv.lo());
    }
    levels.push_back(std::move(row));
  }
  return PointIntegrand(tree, std::move(levels));
}

TreeSetProcess::TreeSetProcess(const BinaryTree& tree, std::vector<std::vector<Interval>> levels)
    : levels_(std::move(levels)) {
  require_level_sizes(levels_, tree.depth() + 1, "tree set process");
}

std::vector<SetRV> TreeSetProcess::rvs(const BinaryTree& tree) const {
  std::vector<SetRV> out;
  out.reserve(levels_.size());
  for (std::size_t k = 0; k < levels_.size(); ++k) {
    std::vector<Interval> vals(tree.n_atoms());
    for (std::size_t w = 0; w < vals.size(); ++w) vals[w] = levels_[k][tree.prefix(w, k)];
    out.emplace_back(tree.space(), vals);
  }
  return out;
}

// ---------------------------------------------------------------------------

TreeSetProcess transform(const BinaryTree& tree, const AdaptedIntervalProcess& G) {
  if (G.depth() != tree.depth()) throw Error(ErrorKind::LengthMismatch, "integrand depth");
  std::vector<std::vector<Interval>> levels{{Interval::point(0.0)}};
  for (std::size_t k = 0; k < tree.depth(); ++k) {
    std::vector<Interval> next(BinaryTree::nodes_at(k + 1));
    for (std::size_t s = 0; s < BinaryTree::nodes_at(k); ++s) {
      const Interval& here = levels[k][s];
      const Interval& g = G.at(k, s);
      next[BinaryTree::child(s, true)] = here + g;
      next[BinaryTree::child(s, false)] = here + scalar_mul(-1.0, g);
    }
    levels.push_back(std::move(next));
  }
  return TreeSetProcess(tree, std::move(levels));
}

TreePointProcess transform(const BinaryTree& tree, const PointIntegrand& g, double initial) {
  if (g.depth() != tree.depth()) throw Error(ErrorKind::LengthMismatch, "integrand depth");
  std::vector<std::vector<double>> levels{{initial}};
  for (std::size_t k = 0; k < tree.depth(); ++k) {
    std::vector<double> next(BinaryTree::nodes_at(k + 1));
    for (std::size_t s = 0; s < BinaryTree::nodes_at(k); ++s) {
      next[BinaryTree::child(s, true)] = levels[k][s] + g.at(k, s);
      next[BinaryTree::child(s, false)] = levels[k][s] - g.at(k, s);
    }
    levels.push_back(std::move(next));
  }
  return TreePointProcess(tree, std::move(levels));
}

Classification classify_tree(const TreePointProcess& x) {
  bool sub = true;
  bool super = true;
  for (std::size_t k = 0; k < x.depth(); ++k) {
    for (std::size_t s = 0; s < BinaryTree::nodes_at(k); ++s) {
      const double expected =
          0.5 * (x.at(k + 1, BinaryTree::child(s, true)) + x.at(k + 1, BinaryTree::child(s, false)));
      const double gap = expected - x.at(k, s);
      if (gap < -kExactTol) sub = false;
      if (gap > kExactTol) super = false;
    }
  }
  if (sub && super) return Classification::Martingale;
  if (sub) return Classification::Submartingale;
  if (super) return Classification::Supermartingale;
  return Classification::None;
}

ClassificationReport classify_tree(const TreeSetProcess& M) {
  ClassificationReport report;
  bool all_sub = true;
  bool all_super = true;
  for (std::size_t k = 0; k < M.depth(); ++k) {
    StepComparison step;
    step.step = k;
    step.expectation_contains_current = true;
    step.current_contains_expectation = true;
    for (std::size_t s = 0; s < BinaryTree::nodes_at(k); ++s) {
      const Interval expected =
          node_average(M.at(k + 1, BinaryTree::child(s, true)), M.at(k + 1, BinaryTree::child(s, false)));
      const Interval& current = M.at(k, s);
      if (!contains(expected, current)) step.expectation_contains_current = false;
      if (!contains(current, expected)) step.current_contains_expectation = false;
      step.hausdorff_gap = std::max(step.hausdorff_gap, hausdorff_distance(expected, current));
    }
    all_sub = all_sub && step.expectation_contains_current;
    all_super = all_super && step.current_contains_expectation;
    report.steps.push_back(step);
  }
  if (all_sub && all_super) {
    report.kind = Classification::Martingale;
  } else if (all_sub) {
    report.kind = Classification::Submartingale;
  } else if (all_super) {
    report.kind = Classification::Supermartingale;
  } else {
    report.kind = Classification::None;
  }
  return report;
}

std::vector<Interval> level_expectations(const TreeSetProcess& M) {
  std::vector<Interval> out;
  out.reserve(M.depth() + 1);
  for (const auto& level : M.levels()) {
    double lo = 0.0;
    double hi = 0.0;
    for (const auto& iv : level) {
      lo += iv.lo();
      hi += iv.hi();
    }
    const double n = static_cast<double>(level.size());
    out.push_back(Interval::make(lo / n, hi / n));
  }
  return out;
}

namespace {

// Node-level classification must agree with the partition-based one; the
// lifted check is only run on small trees.
ClassificationReport classify_checked(const BinaryTree& tree, const TreeSetProcess& M) {
  ClassificationReport report = classify_tree(M);
  if (tree.depth() <= kCrossCheckDepth) {
    const auto lifted = M.rvs(tree);
    if (classify_process(lifted, tree.filtration()) != report.kind) {
      throw Error(ErrorKind::Inconsistent, "tree and partition classifications differ");
    }
  }
  return report;
}

}  // namespace

Ex1Report verify_ex1(const BinaryTree& tree, const AdaptedIntervalProcess& G) {
  Ex1Report r;
  r.depth = tree.depth();
  r.degenerate_input = G.is_degenerate();
  const TreeSetProcess I = transform(tree, G);
  r.expectations = level_expectations(I);
  for (std::size_t n = 0; n < r.expectations.size(); ++n) {
    if (!r.expectations[n].is_degenerate()) {
      r.first_nondegenerate = n;
      break;
    }
  }
  r.classification = classify_checked(tree, I);
  r.inclusion_everywhere = std::all_of(r.classification.steps.begin(), r.classification.steps.end(),
                                       [](const StepComparison& s) { return s.expectation_contains_current; });
  if (r.first_nondegenerate) {
    const SetRV level = I.rvs(tree).at(*r.first_nondegenerate);
    r.mean_violation = is_degenerate_by_expectation(level).witness;
  }

  const bool starts_at_zero = r.expectations.front() == Interval::point(0.0);
  if (r.degenerate_input) {
    r.certified = starts_at_zero && r.classification.kind == Classification::Martingale &&
                  !r.first_nondegenerate;
  } else {
    r.certified = starts_at_zero && r.first_nondegenerate.has_value() && r.inclusion_everywhere &&
                  r.classification.kind == Classification::Submartingale &&
                  r.mean_violation.has_value();
  }
  return r;
}

EzzakiReport ezzaki_counterexample(std::size_t depth, std::size_t n_weights) {
  const BinaryTree tree(depth);
  EzzakiReport r;
  r.depth = depth;
  const TreePointProcess f = transform(tree, PointIntegrand::constant(tree, 1.0));

  r.members_are_martingales = true;
  for (std::size_t k = 0; k < n_weights; ++k) {
    const double lambda = castaing_weight(k);
    r.castaing_weights.push_back(lambda);
    std::vector<std::vector<double>> member = f.levels();
    for (auto& level : member) {
      for (double& x : level) x = lambda * x + 2.0 * (1.0 - lambda) * x;
    }
    if (classify_tree(TreePointProcess(tree, std::move(member))) != Classification::Martingale) {
      r.members_are_martingales = false;
    }
  }

  r.sign_changes = true;
  std::vector<std::vector<Interval>> m_levels;
  for (std::size_t n = 0; n <= depth; ++n) {
    std::vector<Interval> row;
    bool has_pos = false;
    bool has_neg = false;
    double norm = 0.0;
    double abs = 0.0;
    for (double x : f.levels()[n]) {
      row.push_back(segment(x, 2.0 * x));
      has_pos = has_pos || x > 0.0;
      has_neg = has_neg || x < 0.0;
      norm += set_norm(row.back());
      abs += std::abs(x);
    }
    const double count = static_cast<double>(row.size());
    r.norm_integrals.push_back(norm / count);
    r.abs_integrals.push_back(abs / count);
    if (n >= 1 && !(has_pos && has_neg)) r.sign_changes = false;
    m_levels.push_back(std::move(row));
  }
  const TreeSetProcess M(tree, std::move(m_levels));
  r.expectations = level_expectations(M);
  r.classification = classify_checked(tree, M);

  r.bound_holds = true;
  for (std::size_t n = 0; n <= depth; ++n) {
    if (r.norm_integrals[n] > 2.0 * r.abs_integrals[n] + kExactTol) r.bound_holds = false;
  }
  r.horizon_norm_integral = r.norm_integrals.back();
  r.horizon_abs_integral = r.abs_integrals.back();
  r.certified = r.members_are_martingales && r.sign_changes && r.bound_holds &&
                r.classification.kind != Classification::Martingale &&
                std::isfinite(r.horizon_norm_integral);
  return r;
}

SegmentReport segment_process_discrete(const BinaryTree& tree, const AdaptedIntervalProcess& f,
                                       const AdaptedIntervalProcess& g) {
  if (!f.is_degenerate() || !g.is_degenerate()) {
    throw Error(ErrorKind::InvalidArgument, "segment process needs point-valued integrands");
  }
  const PointIntegrand fp = f.points(tree);
  const PointIntegrand gp = g.points(tree);
  TreePointProcess xi = transform(tree, fp);
  TreePointProcess eta = transform(tree, gp);

  std::vector<std::vector<double>> lo_levels;
  std::vector<std::vector<double>> hi_levels;
  std::vector<std::vector<Interval>> seg_levels;
  for (std::size_t k = 0; k <= tree.depth(); ++k) {
    std::vector<double> lo;
    std::vector<double> hi;
    std::vector<Interval> seg;
    for (std::size_t s = 0; s < BinaryTree::nodes_at(k); ++s) {
      const double a = xi.at(k, s);
      const double b = eta.at(k, s);
      lo.push_back(std::min(a, b));
      hi.push_back(std::max(a, b));
      seg.push_back(segment(a, b));
    }
    lo_levels.push_back(std::move(lo));
    hi_levels.push_back(std::move(hi));
    seg_levels.push_back(std::move(seg));
  }
  SegmentReport r{tree.depth(),
                  fp.levels() == gp.levels(),
                  std::move(xi),
                  std::move(eta),
                  TreeSetProcess(tree, std::move(seg_levels)),
                  classify_tree(TreePointProcess(tree, std::move(lo_levels))),
                  classify_tree(TreePointProcess(tree, std::move(hi_levels))),
                  {},
                  {},
                  false};
  r.classification = classify_checked(tree, r.segment);
  r.expectations = level_expectations(r.segment);

  bool spread = false;
  for (const auto& level : r.segment.levels()) {
    for (const auto& iv : level) spread = spread || !iv.is_degenerate();
  }
  if (!spread) {
    r.certified = r.classification.kind == Classification::Martingale;
  } else {
    r.certified = is_weak_super(r.min_classification) && is_weak_sub(r.max_classification) &&
                  r.classification.kind == Classification::Submartingale;
  }
  return r;
}

}  // namespace setval
