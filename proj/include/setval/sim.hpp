#pragma once

// Brownian paths, left-endpoint Ito sums and statistical martingale tests.
//
// Paths are generated in chunks of kChunkPaths; chunk c draws from an
// mt19937_64 seeded with seed_seq{seed, c}. A bundle is therefore a pure
// function of (grid, n_paths, seed) and any contiguous run of whole chunks can
// be produced on its own, which is how the experiments stream 10^5 paths.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "setval/convex.hpp"

namespace setval {

inline constexpr std::size_t kChunkPaths = 4096;
inline constexpr std::size_t kTestBins = 8;

class TimeGrid {
 public:
  /// Throws InvalidConfig unless horizon > 0 (finite) and steps >= 1.
  TimeGrid(double horizon, std::size_t steps);

  double horizon() const noexcept { return horizon_; }
  std::size_t steps() const noexcept { return steps_; }
  double dt() const noexcept { return horizon_ / static_cast<double>(steps_); }
  double time(std::size_t i) const noexcept { return horizon_ * static_cast<double>(i) / static_cast<double>(steps_); }
  /// Grid index of t; throws GridMismatch when t is not a grid time.
  std::size_t index_of(double t) const;
  /// Every factor-th time; throws GridMismatch unless factor divides steps.
  TimeGrid coarsen(std::size_t factor) const;

  bool operator==(const TimeGrid&) const = default;

 private:
  double horizon_;
  std::size_t steps_;
};

/// Row-major n_paths x (steps + 1) matrix of B at the grid times.
class PathBundle {
 public:
  PathBundle(TimeGrid grid, std::size_t n_paths, std::uint64_t seed, std::vector<double> values);

  const TimeGrid& grid() const noexcept { return grid_; }
  std::size_t n_paths() const noexcept { return n_paths_; }
  std::uint64_t seed() const noexcept { return seed_; }
  double at(std::size_t path, std::size_t i) const { return values_[path * (grid_.steps() + 1) + i]; }
  std::span<const double> row(std::size_t path) const;
  std::vector<double> column(std::size_t i) const;
  const std::vector<double>& values() const noexcept { return values_; }

 private:
  TimeGrid grid_;
  std::size_t n_paths_;
  std::uint64_t seed_;
  std::vector<double> values_;
};

/// Throws InvalidConfig when n_paths == 0.
PathBundle gen_brownian(const TimeGrid& grid, std::size_t n_paths, std::uint64_t seed);
/// Paths [chunk * kChunkPaths, chunk * kChunkPaths + n_paths) of the bundle
/// gen_brownian would produce; n_paths <= kChunkPaths.
PathBundle gen_brownian_chunk(const TimeGrid& grid, std::size_t chunk, std::size_t n_paths, std::uint64_t seed);
PathBundle coarsen(const PathBundle& paths, std::size_t factor);
/// Concatenates the paths of `more` onto `into`; grids must match.
void append_paths(PathBundle& into, const PathBundle& more);

class SampledProcess {
 public:
  SampledProcess(TimeGrid grid, std::size_t n_paths, std::vector<double> values, bool adapted = true);

  const TimeGrid& grid() const noexcept { return grid_; }
  std::size_t n_paths() const noexcept { return n_paths_; }
  bool adapted() const noexcept { return adapted_; }
  double at(std::size_t path, std::size_t i) const { return values_[path * (grid_.steps() + 1) + i]; }
  std::span<const double> row(std::size_t path) const;
  std::vector<double> column(std::size_t i) const;
  const std::vector<double>& values() const noexcept { return values_; }

 private:
  TimeGrid grid_;
  std::size_t n_paths_;
  std::vector<double> values_;
  bool adapted_;
};

SampledProcess brownian(const PathBundle& paths);
SampledProcess constant_process(const PathBundle& paths, double value);
/// Pointwise map; the result is adapted iff x is.
SampledProcess apply(const SampledProcess& x, const std::function<double(double)>& fn);
SampledProcess apply(const SampledProcess& x, const SampledProcess& y, const std::function<double(double, double)>& fn);
SampledProcess coarsen(const SampledProcess& x, std::size_t factor);
void append_paths(SampledProcess& into, const SampledProcess& more);

/// Left-endpoint sums sum_{i<k} g_i (B_{i+1} - B_i). Throws GridMismatch or NotAdapted.
SampledProcess ito_integral(const SampledProcess& integrand, const PathBundle& paths);
/// X_t = exp(B_t - t/2).
SampledProcess geometric_martingale(const PathBundle& paths);

class SampledIntervalProcess {
 public:
  const SampledProcess& lo() const noexcept { return lo_; }
  const SampledProcess& hi() const noexcept { return hi_; }
  const TimeGrid& grid() const noexcept { return lo_.grid(); }
  std::size_t n_paths() const noexcept { return lo_.n_paths(); }
  Interval at(std::size_t path, std::size_t i) const { return Interval::make(lo_.at(path, i), hi_.at(path, i)); }
  SampledProcess width() const;

 private:
  friend SampledIntervalProcess interval_process(const SampledProcess&, const SampledProcess&);
  SampledIntervalProcess(SampledProcess lo, SampledProcess hi) : lo_(std::move(lo)), hi_(std::move(hi)) {}

  SampledProcess lo_;
  SampledProcess hi_;
};

/// Throws OrderViolation naming the first (path, time index) with lo > hi + 1e-12.
SampledIntervalProcess interval_process(const SampledProcess& lo, const SampledProcess& hi);

struct SegmentPair {
  SampledProcess xi;
  SampledProcess eta;
  SampledIntervalProcess M;
};

SegmentPair segment_pair(const SampledProcess& f, const SampledProcess& g, const PathBundle& paths);

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

McEstimate mc_mean(std::span<const double> sample);
/// Unbiased sample variance with stderr sqrt((m4 - v^2) / n).
McEstimate mc_variance(std::span<const double> sample);
std::pair<McEstimate, McEstimate> mc_interval_expectation(const SampledIntervalProcess& M, double t);
/// Per-path trapezoid rule for the time integral of x^2.
std::vector<double> time_integral_of_square(const SampledProcess& x);

struct TimePair {
  double s = 0.0;
  double t = 0.0;
};

/// (T/4, T/2), (T/2, T), (T/4, T).
std::vector<TimePair> default_pairs(const TimeGrid& grid);

enum class Direction { Sub, Super };
std::string to_string(Direction d);

struct TestRow {
  TimePair pair;
  std::string test_function;
  double statistic = 0.0;
  double std_error = 0.0;
  double threshold = 0.0;
  bool pass = true;
};

struct TestReport {
  std::string test;  // "martingale", "submartingale" or "supermartingale"
  double alpha = 0.0;
  std::size_t n_tests = 0;
  double critical_value = 0.0;
  std::vector<TestRow> rows;
  bool verdict = true;
  std::uint64_t seed = 0;
  std::size_t n_paths = 0;
  std::size_t chunk_paths = kChunkPaths;
};

/// Two-sided orthogonality tests of x_t - x_s against Z in {1, B_s, 1{B_s in bin j}}
/// with Bonferroni control over every (pair, Z).
TestReport martingale_test(const SampledProcess& x, const std::vector<TimePair>& pairs, const PathBundle& paths,
                           double alpha);
/// One-sided tests on the binned conditional means of x_t - x_s given B_s.
TestReport directional_test(const SampledProcess& x, Direction direction, const std::vector<TimePair>& pairs,
                            const PathBundle& paths, double alpha);

struct ItoConsistencyReport {
  std::vector<std::size_t> steps;
  std::vector<double> rms_max_error;  // RMS over paths of max_t |1 + int X dB - X|
  bool monotone = false;
};

/// Generates paths once at base_steps * 2^doublings and evaluates the
/// discretisation on each coarsening of that grid.
ItoConsistencyReport ito_self_consistency(double horizon, std::size_t base_steps, std::size_t doublings,
                                          std::size_t n_paths, std::uint64_t seed);

double normal_quantile(double p);

}  // namespace setval
