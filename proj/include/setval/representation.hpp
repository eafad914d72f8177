#pragma once

// Representability of interval martingales as C + {integral of g}.
//
// Tree form is exact. Sampled form certifies the endpoints statistically
// first and then tests width variance against an absolute tolerance.

#include <cstddef>
#include <optional>
#include <vector>

#include "setval/sim.hpp"
#include "setval/tree.hpp"

namespace setval {

struct WidthWitness {
  std::size_t level = 0;
  std::size_t node_a = 0;  // two nodes whose widths differ
  std::size_t node_b = 0;
  double width_a = 0.0;
  double width_b = 0.0;
};

struct TreeWidthReport {
  bool constant = false;
  bool constant_per_time = false;
  bool constant_across_time = false;
  std::vector<double> width_variance;  // per level, over atoms
  std::vector<double> mean_width;      // per level
  std::optional<WidthWitness> witness;
};

/// Both endpoints must be exact tree martingales, else NotMartingale.
TreeWidthReport width_constancy_test(const BinaryTree& tree, const TreeSetProcess& M);

/// Castaing members lambda a + (1 - lambda) b for the first n weights.
std::vector<TreePointProcess> castaing_family(const BinaryTree& tree, const TreeSetProcess& M, std::size_t n);

/// Pairwise differences are constant across nodes and levels. Throws
/// EmptyFamily, or NotMartingale when a member is not a tree martingale.
bool condition_iii_test(const std::vector<TreePointProcess>& family);

/// a = C.lo + transform(g), b = C.hi + transform(g).
TreeSetProcess build_representation(const BinaryTree& tree, const Interval& C, const PointIntegrand& g);
/// Throws NotInterval unless C is one-dimensional.
TreeSetProcess build_representation(const BinaryTree& tree, const ConvexBody& C, const PointIntegrand& g);

struct Recovery {
  Interval C;
  PointIntegrand g;
};

/// g(s) = (a(s+) - a(s-)) / 2 and C = M_0. Throws NotRepresentable when the
/// width varies (checked first) and NotMartingale when an endpoint is not a
/// martingale.
Recovery recover_integrand_tree(const BinaryTree& tree, const TreeSetProcess& M);

struct TreeCrosscheck {
  bool width_constant = false;
  bool condition_iii = false;
  bool representable = false;
  std::optional<Recovery> recovery;
  double roundtrip_hausdorff = 0.0;      // sup over nodes, when recovered
  std::vector<Interval> expectations;    // E(M_n)
  bool expectation_invariant = false;    // E(M_n) = E(M_0) for all n
};

/// Evaluates width constancy and the Castaing-difference condition, throws
/// Inconsistent if they disagree, and on success also rebuilds M from the
/// recovered integrand.
TreeCrosscheck theorem_main_crosscheck(const BinaryTree& tree, const TreeSetProcess& M,
                                       std::size_t n_castaing = 9);

struct SampledWidthReport {
  bool constant = false;
  std::vector<double> times;
  std::vector<McEstimate> width_variance;  // per time
  std::vector<McEstimate> mean_width;      // per time
  double tolerance = 0.0;
  double drift_critical_value = 0.0;
  bool constant_per_time = false;
  bool constant_across_time = false;
  // Power of the variance threshold against width = exp(B_t - t/2) at the
  // last time, from the lognormal moments.
  double alternative_variance = 0.0;
  double alternative_std_error = 0.0;
  double power = 0.0;
  TestReport lower_test;
  TestReport upper_test;
};

inline constexpr double kWidthVarianceTol = 1e-10;

/// Certifies both endpoints with martingale_test (NotMartingale otherwise),
/// then tests the width at every grid time. `paths` supplies B for the tests.
SampledWidthReport width_constancy_test(const SampledIntervalProcess& M, const PathBundle& paths, double alpha,
                                        double tol = kWidthVarianceTol);

/// Sampled form: pairwise differences have variance <= tol at every time and
/// their means do not move by more than sqrt(tol). Throws EmptyFamily.
bool condition_iii_test(const std::vector<SampledProcess>& family, double tol = kWidthVarianceTol);

std::vector<SampledProcess> castaing_family(const SampledIntervalProcess& M, std::size_t n);

SampledIntervalProcess build_representation(const Interval& C, const SampledProcess& g, const PathBundle& paths);

struct SampledCrosscheck {
  SampledWidthReport width;
  bool condition_iii = false;
  bool representable = false;
};

/// Throws Inconsistent if the width test and the Castaing test disagree.
SampledCrosscheck theorem_main_crosscheck(const SampledIntervalProcess& M, const PathBundle& paths, double alpha,
                                          std::size_t n_castaing = 9);

}  // namespace setval
