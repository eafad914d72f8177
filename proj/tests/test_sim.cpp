#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "setval/error.hpp"
#include "setval/sim.hpp"

using namespace setval;

namespace {

bool within(const McEstimate& est, double target, double k = 4.0) {
  return std::abs(est.mean - target) <= k * est.std_error;
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

TEST_CASE("time grid") {
  const TimeGrid grid(1.0, 8);
  CHECK(grid.time(8) == 1.0);
  CHECK(grid.index_of(0.25) == 2);
  CHECK(kind_of([&] { (void)grid.index_of(0.3); }) == ErrorKind::GridMismatch);
  CHECK(kind_of([&] { (void)grid.index_of(1.5); }) == ErrorKind::GridMismatch);
  CHECK(kind_of([] { TimeGrid(0.0, 4); }) == ErrorKind::InvalidConfig);
  CHECK(kind_of([] { TimeGrid(1.0, 0); }) == ErrorKind::InvalidConfig);
  CHECK(grid.coarsen(4).steps() == 2);
  CHECK(kind_of([&] { (void)grid.coarsen(3); }) == ErrorKind::GridMismatch);
}

TEST_CASE("brownian paths") {
  const TimeGrid grid(1.0, 16);
  const PathBundle a = gen_brownian(grid, 5000, 7);
  const PathBundle b = gen_brownian(grid, 5000, 7);
  CHECK(a.values() == b.values());
  CHECK(gen_brownian(grid, 5000, 8).values() != a.values());
  for (std::size_t p = 0; p < a.n_paths(); ++p) CHECK(a.at(p, 0) == 0.0);

  // Chunks reassemble into the full bundle.
  const PathBundle c0 = gen_brownian_chunk(grid, 0, kChunkPaths, 7);
  PathBundle joined = c0;
  append_paths(joined, gen_brownian_chunk(grid, 1, 5000 - kChunkPaths, 7));
  CHECK(joined.values() == a.values());
  // A prefix of a bigger bundle is the smaller bundle.
  const PathBundle big = gen_brownian(grid, 9000, 7);
  CHECK(std::equal(a.values().begin(), a.values().end(), big.values().begin()));

  CHECK(kind_of([&] { (void)gen_brownian(grid, 0, 1); }) == ErrorKind::InvalidConfig);

  // Coarsening keeps B at the retained times.
  const PathBundle coarse = coarsen(a, 4);
  CHECK(coarse.grid().steps() == 4);
  CHECK(coarse.at(17, 3) == a.at(17, 12));
}

TEST_CASE("brownian increment moments") {
  const PathBundle paths = gen_brownian(TimeGrid(1.0, 8), 100000, 11);
  CHECK(within(mc_variance(paths.column(8)), 1.0));
  CHECK(within(mc_mean(paths.column(8)), 0.0));
  std::vector<double> inc(paths.n_paths());
  for (std::size_t p = 0; p < paths.n_paths(); ++p) inc[p] = paths.at(p, 3) - paths.at(p, 2);
  CHECK(within(mc_variance(inc), 1.0 / 8));
  // Increments on disjoint intervals are uncorrelated.
  std::vector<double> prod(paths.n_paths());
  for (std::size_t p = 0; p < paths.n_paths(); ++p) prod[p] = inc[p] * (paths.at(p, 6) - paths.at(p, 5));
  CHECK(within(mc_mean(prod), 0.0));
}

TEST_CASE("estimators") {
  const std::vector<double> x{1, 2, 3, 4};
  const McEstimate m = mc_mean(x);
  CHECK(m.mean == 2.5);
  CHECK(m.std_error == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
  const McEstimate v = mc_variance(x);
  CHECK(v.mean == doctest::Approx(5.0 / 3.0));
  // Central moments of {1,2,3,4}: m2 = 5/4, m4 = 41/16.
  CHECK(v.std_error == doctest::Approx(std::sqrt((41.0 / 16 - 25.0 / 16) / 4)));
  CHECK(mc_mean(std::vector<double>{}).n == 0);
}

TEST_CASE("ito integral") {
  const PathBundle paths = gen_brownian(TimeGrid(1.0, 64), 200, 3);
  const SampledProcess zero = ito_integral(constant_process(paths, 0.0), paths);
  for (double v : zero.values()) CHECK(v == 0.0);
  const SampledProcess one = ito_integral(constant_process(paths, 1.0), paths);
  for (std::size_t p = 0; p < paths.n_paths(); ++p) {
    CHECK(one.at(p, 0) == 0.0);
    for (std::size_t i = 0; i <= 64; ++i) CHECK(std::abs(one.at(p, i) - paths.at(p, i)) < 1e-12);
  }
  // B dB = (B^2 - sum of squared increments) / 2 exactly for left sums.
  const SampledProcess bb = ito_integral(brownian(paths), paths);
  for (std::size_t p = 0; p < paths.n_paths(); ++p) {
    double qv = 0.0;
    for (std::size_t i = 0; i < 64; ++i) qv += std::pow(paths.at(p, i + 1) - paths.at(p, i), 2);
    CHECK(bb.at(p, 64) == doctest::Approx(0.5 * (paths.at(p, 64) * paths.at(p, 64) - qv)).epsilon(1e-9));
  }

  const SampledProcess not_adapted(paths.grid(), paths.n_paths(), paths.values(), false);
  CHECK(kind_of([&] { (void)ito_integral(not_adapted, paths); }) == ErrorKind::NotAdapted);
  const PathBundle other = gen_brownian(TimeGrid(1.0, 32), 200, 3);
  CHECK(kind_of([&] { (void)ito_integral(brownian(other), paths); }) == ErrorKind::GridMismatch);
}

TEST_CASE("geometric martingale") {
  const PathBundle paths = gen_brownian(TimeGrid(1.0, 512), 20000, 5);
  const SampledProcess X = geometric_martingale(paths);
  for (std::size_t p = 0; p < paths.n_paths(); ++p) CHECK(X.at(p, 0) == 1.0);
  CHECK(std::all_of(X.values().begin(), X.values().end(), [](double v) { return v > 0.0; }));
  for (std::size_t i : {0u, 128u, 256u, 512u}) {
    const McEstimate e = mc_mean(X.column(i));
    CHECK(std::abs(e.mean - 1.0) <= std::max(4 * e.std_error, 1e-12));
  }
  CHECK(within(mc_mean(time_integral_of_square(X)), std::exp(1.0) - 1.0));
  CHECK(within(mc_variance(X.column(512)), std::exp(1.0) - 1.0));
}

TEST_CASE("trapezoid of a constant") {
  const PathBundle paths = gen_brownian(TimeGrid(2.0, 10), 3, 1);
  for (double v : time_integral_of_square(constant_process(paths, 3.0))) CHECK(v == doctest::Approx(18.0));
}

TEST_CASE("interval processes and expectations") {
  const PathBundle paths = gen_brownian(TimeGrid(1.0, 64), 50000, 9);
  const SampledProcess X = geometric_martingale(paths);
  const auto plus_one = interval_process(X, apply(X, [](double x) { return 1.0 + x; }));
  const auto doubled = interval_process(X, apply(X, [](double x) { return 2.0 * x; }));
  const auto degenerate = interval_process(X, X);

  for (const auto* M : {&plus_one, &doubled}) {
    const auto [lo, hi] = mc_interval_expectation(*M, 1.0);
    CHECK(within(lo, 1.0));
    CHECK(within(hi, 2.0));
  }
  const auto [dlo, dhi] = mc_interval_expectation(degenerate, 1.0);
  CHECK(dlo.mean == dhi.mean);
  CHECK(within(dlo, 1.0));
  CHECK(degenerate.at(5, 10).is_degenerate());
  CHECK(plus_one.at(3, 64).width() == doctest::Approx(1.0));

  try {
    (void)interval_process(apply(X, [](double x) { return 2.0 * x; }), X);
    FAIL("expected OrderViolation");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::OrderViolation);
    CHECK(std::string(e.what()).find("path 0, time index 0") != std::string::npos);
  }
}

TEST_CASE("segment pairs") {
  const PathBundle paths = gen_brownian(TimeGrid(1.0, 32), 300, 13);
  const auto one = constant_process(paths, 1.0);
  const auto mirror = segment_pair(one, constant_process(paths, -1.0), paths);
  const auto twice = segment_pair(one, constant_process(paths, 2.0), paths);
  const auto same = segment_pair(one, one, paths);
  for (std::size_t p = 0; p < paths.n_paths(); ++p) {
    for (std::size_t i = 0; i <= 32; ++i) {
      const double b = paths.at(p, i);
      CHECK(mirror.M.lo().at(p, i) == doctest::Approx(-std::abs(b)));
      CHECK(mirror.M.hi().at(p, i) == doctest::Approx(std::abs(b)));
      CHECK(twice.M.lo().at(p, i) == doctest::Approx(std::min(b, 2 * b)));
      CHECK(twice.M.hi().at(p, i) == doctest::Approx(std::max(b, 2 * b)));
      CHECK(same.M.at(p, i).is_degenerate());
    }
  }
}

TEST_CASE("martingale and directional tests") {
  const PathBundle paths = gen_brownian(TimeGrid(1.0, 64), 40000, 21);
  const auto pairs = default_pairs(paths.grid());
  const SampledProcess B = brownian(paths);
  const SampledProcess X = geometric_martingale(paths);
  const auto seg = segment_pair(constant_process(paths, 1.0), constant_process(paths, 2.0), paths);

  const TestReport rb = martingale_test(B, pairs, paths, 0.01);
  CHECK(rb.verdict);
  CHECK(rb.rows.size() == 30);
  CHECK(rb.n_tests == 30);
  CHECK(rb.critical_value == doctest::Approx(normal_quantile(1 - 0.01 / 60)));
  CHECK(martingale_test(X, pairs, paths, 0.01).verdict);
  CHECK_FALSE(martingale_test(seg.M.hi(), pairs, paths, 0.01).verdict);
  CHECK_FALSE(martingale_test(seg.M.lo(), pairs, paths, 0.01).verdict);

  CHECK(directional_test(seg.M.lo(), Direction::Super, pairs, paths, 0.01).verdict);
  CHECK(directional_test(seg.M.hi(), Direction::Sub, pairs, paths, 0.01).verdict);
  CHECK_FALSE(directional_test(seg.M.hi(), Direction::Super, pairs, paths, 0.01).verdict);
  CHECK(directional_test(B, Direction::Sub, pairs, paths, 0.01).verdict);
  CHECK(directional_test(B, Direction::Super, pairs, paths, 0.01).verdict);

  // A constant process gives zero statistics with zero stderr and passes.
  const TestReport rc = martingale_test(constant_process(paths, 2.0), pairs, paths, 0.01);
  CHECK(rc.verdict);
  for (const auto& row : rc.rows) CHECK(row.std_error == 0.0);

  // Reports are a pure function of the inputs.
  const TestReport again = martingale_test(B, pairs, paths, 0.01);
  for (std::size_t k = 0; k < rb.rows.size(); ++k) CHECK(again.rows[k].statistic == rb.rows[k].statistic);

  CHECK(kind_of([&] { (void)martingale_test(B, {{0.5, 0.25}}, paths, 0.01); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([&] { (void)martingale_test(B, {{0.3, 0.5}}, paths, 0.01); }) == ErrorKind::GridMismatch);
  CHECK(kind_of([&] { (void)martingale_test(B, pairs, paths, 1.5); }) == ErrorKind::InvalidConfig);
}

TEST_CASE("martingale test size over seeds") {
  int passes = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const PathBundle paths = gen_brownian(TimeGrid(1.0, 16), 4000, seed);
    passes += martingale_test(geometric_martingale(paths), default_pairs(paths.grid()), paths, 0.01).verdict;
  }
  CHECK(passes >= 18);
}

TEST_CASE("ito discretisation self-consistency") {
  const auto r = ito_self_consistency(1.0, 32, 3, 2000, 4);
  CHECK(r.steps == std::vector<std::size_t>{32, 64, 128, 256});
  CHECK(r.monotone);
  // Strong order one half: doubling steps shrinks the error by about 1/sqrt(2).
  CHECK(r.rms_max_error.back() / r.rms_max_error.front() < 0.6);
}
