#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "setval/convex.hpp"

using namespace setval;

namespace {

// Support function of the hull of `pts`, evaluated directly on the points.
double brute_support(const std::vector<Point>& pts, const Point& u) {
  double best = -1e300;
  for (const auto& p : pts) {
    double s = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) s += p[k] * u[k];
    best = std::max(best, s);
  }
  return best;
}

std::vector<Point> direction_grid_2d(int n) {
  std::vector<Point> dirs;
  for (int i = 0; i < n; ++i) {
    const double th = 2.0 * std::numbers::pi * i / n;
    dirs.push_back({std::cos(th), std::sin(th)});
  }
  return dirs;
}

Interval random_interval(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  const double a = u(rng);
  const double b = u(rng);
  return segment(a, b);
}

ConvexBody random_body(std::mt19937_64& rng, std::size_t dim) {
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::uniform_int_distribution<int> count(1, 6);
  std::vector<Point> pts(static_cast<std::size_t>(count(rng)), Point(dim));
  for (auto& p : pts) {
    for (auto& x : p) x = u(rng);
  }
  return ConvexBody(dim, pts);
}

}  // namespace

TEST_CASE("mk_interval") {
  const Interval a = mk_interval(0, 1);
  CHECK(a.lo() == 0.0);
  CHECK(a.hi() == 1.0);
  CHECK(mk_interval(3, 3).is_degenerate());
  CHECK_THROWS_AS(mk_interval(1, 0), Error);
  try {
    mk_interval(1, 0);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::OrderViolation);
  }
  try {
    mk_interval(0, std::nan(""));
    FAIL("expected NonFinite");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonFinite);
  }
}

TEST_CASE("minkowski_add") {
  CHECK(mk_interval(1, 2) + mk_interval(3, 5) == mk_interval(4, 7));
  CHECK(mk_interval(-2.5, 4) + Interval::point(0) == mk_interval(-2.5, 4));

  SUBCASE("unit segments sum to the unit square") {
    const ConvexBody a(2, {{0, 0}, {1, 0}});
    const ConvexBody b(2, {{0, 0}, {0, 1}});
    const ConvexBody sum = a + b;
    std::vector<Point> sums;
    for (const auto& x : a.generators()) {
      for (const auto& y : b.generators()) sums.push_back({x[0] + y[0], x[1] + y[1]});
    }
    for (const auto& u : direction_grid_2d(72)) {
      CHECK(sum.support(u) == doctest::Approx(brute_support(sums, u)).epsilon(1e-14));
    }
    CHECK(sum.size() == 4);
    CHECK(approx_equal(sum, ConvexBody(2, {{0, 0}, {1, 0}, {0, 1}, {1, 1}})));
  }

  CHECK_THROWS_AS(minkowski_add(ConvexBody(2, {{0, 0}}), ConvexBody(mk_interval(0, 1))), Error);
}

TEST_CASE("scalar_mul") {
  CHECK(scalar_mul(-1, mk_interval(0, 1)) == mk_interval(-1, 0));
  CHECK(scalar_mul(0, mk_interval(-3, 7)) == Interval::point(0));
  const ConvexBody b = scalar_mul(2, ConvexBody(2, {{1, 1}, {2, 0}}));
  CHECK(approx_equal(b, ConvexBody(2, {{2, 2}, {4, 0}})));
  CHECK_THROWS_AS(scalar_mul(INFINITY, mk_interval(0, 1)), Error);
}

TEST_CASE("contains") {
  CHECK(contains(mk_interval(-1, 1), Interval::point(0)));
  CHECK_FALSE(contains(mk_interval(0, 1), mk_interval(-1, 2)));
  CHECK(contains(mk_interval(-0.5, 0.5), mk_interval(-0.5, 0.5)));

  const ConvexBody square(2, {{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  CHECK(contains(square, ConvexBody(2, {{0.25, 0.5}, {1, 1}})));
  CHECK_FALSE(contains(square, ConvexBody(2, {{0.5, 0.5}, {1.1, 0.5}})));

  const ConvexBody cube(3, {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1},
                            {1, 1, 0}, {1, 0, 1}, {0, 1, 1}, {1, 1, 1}});
  CHECK(cube.size() == 8);
  CHECK(contains(cube, ConvexBody(3, {{0.5, 0.5, 0.5}, {1, 1, 1}})));
  CHECK_FALSE(contains(cube, ConvexBody(3, {{0.5, 0.5, 1.01}})));
}

TEST_CASE("hausdorff_distance") {
  CHECK(hausdorff_distance(mk_interval(0, 1), mk_interval(0, 1)) == 0.0);
  // max(|0 - 1|, |1 - 3|)
  CHECK(hausdorff_distance(mk_interval(0, 1), mk_interval(1, 3)) == 2.0);
  CHECK(hausdorff_distance(Interval::point(0), mk_interval(-1, 1)) == 1.0);

  const ConvexBody square(2, {{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  const ConvexBody point(2, {{3, 1}});
  CHECK(hausdorff_distance(square, point) == doctest::Approx(std::sqrt(9.0 + 1.0)));
  const ConvexBody tri(3, {{0, 0, 0}, {2, 0, 0}, {0, 2, 0}});
  CHECK(distance_to(tri, Point{0.5, 0.5, 3.0}) == doctest::Approx(3.0));
  CHECK(distance_to(tri, Point{3.0, 0.0, 0.0}) == doctest::Approx(1.0));
}

TEST_CASE("set_norm") {
  CHECK(set_norm(mk_interval(-2, 1)) == 2.0);
  CHECK(set_norm(Interval::point(0)) == 0.0);
  CHECK(set_norm(ConvexBody(2, {{3, 4}, {0, 0}})) == 5.0);
}

TEST_CASE("hukuhara_diff") {
  const auto c = hukuhara_diff(mk_interval(0, 3), mk_interval(0, 1));
  REQUIRE(c.has_value());
  CHECK(*c == mk_interval(0, 2));
  CHECK(mk_interval(0, 1) + *c == mk_interval(0, 3));
  CHECK(hukuhara_diff(mk_interval(-1.5, 4), mk_interval(-1.5, 4)) == Interval::point(0));
  CHECK_FALSE(hukuhara_diff(mk_interval(0, 1), mk_interval(0, 3)).has_value());
}

TEST_CASE("segment") {
  CHECK(segment(0, 1) == mk_interval(0, 1));
  CHECK(segment(2, -1) == mk_interval(-1, 2));
  CHECK(segment(4, 4).is_degenerate());
  CHECK(segment(Point{1, 2}, Point{1, 2}).is_singleton());
  CHECK_THROWS_AS(segment(Point{1, 2}, Point{1}), Error);
}

TEST_CASE("dimension cap") {
  CHECK_THROWS_AS(ConvexBody(4, {{0, 0, 0, 0}}), Error);
  CHECK_THROWS_AS(ConvexBody(2, {}), Error);
}

TEST_CASE("distributivity fails for opposite-sign scalars") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> s(-3.0, 3.0);
  for (int trial = 0; trial < 500; ++trial) {
    const Interval a = random_interval(rng);
    const double lambda = s(rng);
    const double eta = s(rng);
    const Interval lhs = scalar_mul(lambda + eta, a);
    const Interval rhs = scalar_mul(lambda, a) + scalar_mul(eta, a);
    CHECK(contains(rhs, lhs, 1e-12));
    const bool equal = approx_equal(lhs, rhs, 1e-12);
    if (lambda * eta < 0.0 && !a.is_degenerate()) {
      CHECK_FALSE(equal);
    } else {
      CHECK(equal);
    }
  }
  CHECK(scalar_mul(1 + -1, mk_interval(0, 1)) == Interval::point(0));
  CHECK(scalar_mul(1, mk_interval(0, 1)) + scalar_mul(-1, mk_interval(0, 1)) == mk_interval(-1, 1));
}

TEST_CASE("interval algebra properties") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> s(-3.0, 3.0);
  for (int trial = 0; trial < 500; ++trial) {
    const Interval a = random_interval(rng);
    const Interval b = random_interval(rng);
    const Interval c = random_interval(rng);
    CHECK(a + b == b + a);
    CHECK(approx_equal((a + b) + c, a + (b + c), 1e-12));
    const double l = s(rng);
    const double e = s(rng);
    CHECK(approx_equal(scalar_mul(l, scalar_mul(e, a)), scalar_mul(l * e, a), 1e-12));
    CHECK(hukuhara_diff(a, a) == Interval::point(0));
    CHECK(set_norm(a + b) <= set_norm(a) + set_norm(b) + 1e-12);
    CHECK(hausdorff_distance(a, c) <= hausdorff_distance(a, b) + hausdorff_distance(b, c) + 1e-12);
    CHECK(hausdorff_distance(a, b) == hausdorff_distance(b, a));
  }
}

TEST_CASE("planar and spatial hull properties") {
  std::mt19937_64 rng(13);
  for (std::size_t dim : {std::size_t{2}, std::size_t{3}}) {
    for (int trial = 0; trial < 60; ++trial) {
      const ConvexBody a = random_body(rng, dim);
      const ConvexBody b = random_body(rng, dim);
      const ConvexBody c = random_body(rng, dim);
      const ConvexBody zero = ConvexBody::singleton(Point(dim, 0.0));
      CHECK(hausdorff_distance(a + b, b + a) <= 1e-9);
      CHECK(hausdorff_distance((a + b) + c, a + (b + c)) <= 1e-9);
      CHECK(hausdorff_distance(a + zero, a) <= 1e-12);
      CHECK(hausdorff_distance(a, a) <= 1e-12);
      CHECK(hausdorff_distance(a, b) == doctest::Approx(hausdorff_distance(b, a)));
      CHECK(hausdorff_distance(a, c) <= hausdorff_distance(a, b) + hausdorff_distance(b, c) + 1e-9);
      CHECK(set_norm(a + b) <= set_norm(a) + set_norm(b) + 1e-12);
      CHECK(contains(a + b, a + ConvexBody::singleton(b.generator(0))));
      // Pruning keeps the hull: every original-style support value survives.
      for (std::size_t i = 0; i < a.size(); ++i) CHECK(contains_point(a, a.generator(i), 1e-12));
    }
  }
}
