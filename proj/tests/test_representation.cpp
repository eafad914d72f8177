#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "setval/error.hpp"
#include "setval/representation.hpp"

using namespace setval;

namespace {

// Multiples of 1/64 keep every tree sum exact.
double dyadic(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng) / 64.0; }

PointIntegrand random_integrand(std::mt19937_64& rng, const BinaryTree& tree, int bound) {
  std::vector<std::vector<double>> levels;
  for (std::size_t k = 0; k < tree.depth(); ++k) {
    std::vector<double> row;
    for (std::size_t s = 0; s < BinaryTree::nodes_at(k); ++s) row.push_back(dyadic(rng, -bound, bound));
    levels.push_back(row);
  }
  return PointIntegrand(tree, levels);
}

Interval random_c(std::mt19937_64& rng) {
  const double a = dyadic(rng, -128, 128);
  return Interval::make(a, a + dyadic(rng, 0, 128));
}

// Upper endpoint driven by g + k: both endpoints stay martingales, the width
// moves by 2 k(s) between siblings. C is widened to keep lo <= hi.
TreeSetProcess perturbed(const BinaryTree& tree, const Interval& C, const PointIntegrand& g,
                         const PointIntegrand& k, double k_bound) {
  const double lift = k_bound * static_cast<double>(tree.depth());
  const TreePointProcess a = transform(tree, g, C.lo());
  std::vector<std::vector<double>> gk = g.levels();
  for (std::size_t l = 0; l < gk.size(); ++l) {
    for (std::size_t s = 0; s < gk[l].size(); ++s) gk[l][s] += k.at(l, s);
  }
  const TreePointProcess b = transform(tree, PointIntegrand(tree, gk), C.hi() + lift);
  std::vector<std::vector<Interval>> levels;
  for (std::size_t l = 0; l <= tree.depth(); ++l) {
    std::vector<Interval> row;
    for (std::size_t s = 0; s < BinaryTree::nodes_at(l); ++s) row.push_back(Interval::make(a.at(l, s), b.at(l, s)));
    levels.push_back(row);
  }
  return TreeSetProcess(tree, levels);
}

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::Inconsistent;
}

}  // namespace

TEST_CASE("tree round trip for a unit integrand") {
  const BinaryTree tree(3);
  const auto M = build_representation(tree, mk_interval(0, 1), PointIntegrand::constant(tree, 1.0));
  CHECK(M.at(1, BinaryTree::node_of("+")) == mk_interval(1, 2));
  CHECK(M.at(2, BinaryTree::node_of("--")) == mk_interval(-2, -1));
  const Recovery r = recover_integrand_tree(tree, M);
  CHECK(r.C == mk_interval(0, 1));
  for (const auto& row : r.g.levels()) {
    for (double v : row) CHECK(v == 1.0);
  }
  const auto cc = theorem_main_crosscheck(tree, M);
  CHECK(cc.representable);
  CHECK(cc.roundtrip_hausdorff == 0.0);
  CHECK(cc.expectation_invariant);
  CHECK(cc.expectations.back() == mk_interval(0, 1));
}

TEST_CASE("constant and degenerate representations") {
  const BinaryTree tree(4);
  const auto still = build_representation(tree, mk_interval(0, 1), PointIntegrand::constant(tree, 0.0));
  for (const auto& row : still.levels()) {
    for (const auto& v : row) CHECK(v == mk_interval(0, 1));
  }
  CHECK(classify_tree(still).kind == Classification::Martingale);
  const auto cc = theorem_main_crosscheck(tree, still);
  CHECK(cc.representable);
  for (const auto& row : cc.recovery->g.levels()) {
    for (double v : row) CHECK(v == 0.0);
  }

  std::mt19937_64 rng(5);
  const auto g = random_integrand(rng, tree, 64);
  const auto point = build_representation(tree, ConvexBody(Interval::point(0.5)), g);
  const auto x = transform(tree, g, 0.5);
  for (std::size_t k = 0; k <= 4; ++k) {
    for (std::size_t s = 0; s < BinaryTree::nodes_at(k); ++s) CHECK(point.at(k, s) == Interval::point(x.at(k, s)));
  }
  CHECK(width_constancy_test(tree, point).constant);
  CHECK(theorem_main_crosscheck(tree, point).representable);

  const ConvexBody square(2, {{0, 0}, {1, 0}, {0, 1}});
  CHECK(kind_of([&] { (void)build_representation(tree, square, g); }) == ErrorKind::NotInterval);
}

TEST_CASE("condition (iii) on tree families") {
  const BinaryTree tree(3);
  const auto walk = transform(tree, PointIntegrand::constant(tree, 1.0));
  const auto double_walk = transform(tree, PointIntegrand::constant(tree, 2.0));
  CHECK_FALSE(condition_iii_test({walk, double_walk}));
  CHECK(condition_iii_test({walk}));
  CHECK(condition_iii_test({walk, transform(tree, PointIntegrand::constant(tree, 1.0), 3.0)}));
  CHECK(kind_of([] { (void)condition_iii_test(std::vector<TreePointProcess>{}); }) == ErrorKind::EmptyFamily);
  std::vector<std::vector<double>> squares;
  for (const auto& row : walk.levels()) {
    std::vector<double> sq;
    for (double v : row) sq.push_back(v * v);
    squares.push_back(sq);
  }
  CHECK(kind_of([&] { (void)condition_iii_test({TreePointProcess(tree, squares)}); }) == ErrorKind::NotMartingale);
}

TEST_CASE("segment [f, 2f] is not representable") {
  const BinaryTree tree(4);
  const auto ez = ezzaki_counterexample(4);
  std::vector<std::vector<Interval>> levels;
  const auto f = transform(tree, PointIntegrand::constant(tree, 1.0));
  for (const auto& row : f.levels()) {
    std::vector<Interval> out;
    for (double v : row) out.push_back(segment(v, 2 * v));
    levels.push_back(out);
  }
  const TreeSetProcess M(tree, levels);
  CHECK(classify_tree(M).kind == ez.classification.kind);
  CHECK(kind_of([&] { (void)recover_integrand_tree(tree, M); }) == ErrorKind::NotRepresentable);
  CHECK(kind_of([&] { (void)width_constancy_test(tree, M); }) == ErrorKind::NotMartingale);
}

TEST_CASE("random round trips and width perturbations") {
  std::mt19937_64 rng(2024);
  const BinaryTree tree(5);
  int violations = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Interval C = random_c(rng);
    const auto g = random_integrand(rng, tree, 128);
    const auto M = build_representation(tree, C, g);
    CHECK(classify_tree(M).kind == Classification::Martingale);
    const auto cc = theorem_main_crosscheck(tree, M);
    violations += !(cc.width_constant && cc.condition_iii && cc.representable);
    CHECK(cc.roundtrip_hausdorff == 0.0);
    CHECK(cc.recovery->C == C);
    CHECK(cc.recovery->g.levels() == g.levels());
    // The expected set is C at every time.
    for (const auto& e : cc.expectations) CHECK(e == C);
  }
  for (int trial = 0; trial < 100; ++trial) {
    const Interval C = random_c(rng);
    const auto g = random_integrand(rng, tree, 128);
    auto k = random_integrand(rng, tree, 8);
    // Force at least one non-zero perturbation.
    std::vector<std::vector<double>> kl = k.levels();
    const std::size_t level = trial % 5;
    kl[level][trial % BinaryTree::nodes_at(level)] = 8.0 / 64.0;
    k = PointIntegrand(tree, kl);
    const auto M = perturbed(tree, C, g, k, 8.0 / 64.0);
    CHECK(classify_tree(M).kind == Classification::Martingale);
    const auto cc = theorem_main_crosscheck(tree, M);
    violations += cc.width_constant || cc.condition_iii || cc.representable;
    CHECK_FALSE(cc.recovery.has_value());
    CHECK(kind_of([&] { (void)recover_integrand_tree(tree, M); }) == ErrorKind::NotRepresentable);
  }
  CHECK(violations == 0);
}

TEST_CASE("singleton mean forces degeneracy for tree martingales") {
  std::mt19937_64 rng(77);
  const BinaryTree tree(4);
  for (int trial = 0; trial < 50; ++trial) {
    const auto g = random_integrand(rng, tree, 64);
    const double c = dyadic(rng, -64, 64);
    const auto M = build_representation(tree, Interval::point(c), g);
    const auto E = level_expectations(M);
    CHECK(E.front().is_degenerate());
    for (const auto& row : M.levels()) {
      for (const auto& v : row) CHECK(v.is_degenerate());
    }
    for (std::size_t n = 0; n <= tree.depth(); ++n) {
      CHECK_FALSE(is_degenerate_by_expectation(M.rvs(tree)[n]).witness.has_value());
    }
  }
}

TEST_CASE("sampled representability") {
  const PathBundle paths = gen_brownian(TimeGrid(1.0, 16), 40000, 99);
  const SampledProcess X = geometric_martingale(paths);

  SUBCASE("translate of [0,1] by the exponential martingale") {
    const auto M = interval_process(X, apply(X, [](double x) { return 1.0 + x; }));
    const auto cc = theorem_main_crosscheck(M, paths, 0.01);
    CHECK(cc.representable);
    CHECK(cc.condition_iii);
    CHECK(cc.width.constant_per_time);
    CHECK(cc.width.power > 0.999);
  }
  SUBCASE("built from C = [1,2] and g = X") {
    const auto M = build_representation(mk_interval(1, 2), X, paths);
    CHECK(theorem_main_crosscheck(M, paths, 0.01).representable);
  }
  SUBCASE("doubling is not representable") {
    const auto M = interval_process(X, apply(X, [](double x) { return 2.0 * x; }));
    const auto cc = theorem_main_crosscheck(M, paths, 0.01);
    CHECK_FALSE(cc.representable);
    CHECK_FALSE(cc.condition_iii);
    const McEstimate& v = cc.width.width_variance.back();
    CHECK(std::abs(v.mean - (std::exp(1.0) - 1.0)) <= 4 * v.std_error);
    CHECK(cc.width.alternative_variance == doctest::Approx(std::exp(1.0) - 1.0));
  }
  SUBCASE("degenerate process") {
    const auto M = interval_process(X, X);
    CHECK(theorem_main_crosscheck(M, paths, 0.01).representable);
  }
  SUBCASE("endpoints must be martingales") {
    const auto seg = segment_pair(constant_process(paths, 1.0), constant_process(paths, 2.0), paths);
    CHECK(kind_of([&] { (void)width_constancy_test(seg.M, paths, 0.01); }) == ErrorKind::NotMartingale);
  }
  CHECK(kind_of([] { (void)condition_iii_test(std::vector<SampledProcess>{}); }) == ErrorKind::EmptyFamily);
  CHECK_FALSE(condition_iii_test({brownian(paths), apply(brownian(paths), [](double b) { return 2 * b; })}));
}
