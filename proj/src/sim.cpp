#include "setval/sim.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <boost/math/distributions/normal.hpp>

#include "setval/error.hpp"

namespace setval {

namespace {

constexpr double kOrderTol = 1e-12;

void require_same_grid(const TimeGrid& a, const TimeGrid& b) {
  if (!(a == b)) throw Error(ErrorKind::GridMismatch, "processes live on different time grids");
}

std::vector<double> take_column(const std::vector<double>& values, std::size_t n_paths, std::size_t width,
                                std::size_t i) {
  std::vector<double> out(n_paths);
  for (std::size_t p = 0; p < n_paths; ++p) out[p] = values[p * width + i];
  return out;
}

std::vector<double> coarsen_values(const std::vector<double>& values, std::size_t n_paths, std::size_t steps,
                                   std::size_t factor) {
  const std::size_t coarse = steps / factor;
  std::vector<double> out;
  out.reserve(n_paths * (coarse + 1));
  for (std::size_t p = 0; p < n_paths; ++p) {
    for (std::size_t i = 0; i <= coarse; ++i) out.push_back(values[p * (steps + 1) + i * factor]);
  }
  return out;
}

// Equiprobable bins of B_s ~ N(0, s): edges sqrt(s) * q_j, j = 1..kTestBins-1.
std::vector<double> bin_edges(double s) {
  std::vector<double> edges;
  for (std::size_t j = 1; j < kTestBins; ++j) {
    edges.push_back(std::sqrt(s) * normal_quantile(static_cast<double>(j) / kTestBins));
  }
  return edges;
}

std::size_t bin_of(const std::vector<double>& edges, double b) {
  return static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), b) - edges.begin());
}

std::string pair_label(const std::string& base, std::size_t j) { return base + std::to_string(j); }

struct PairData {
  TimePair pair;
  std::vector<double> increment;  // x_t - x_s per path
  std::vector<double> b_s;
};

std::vector<PairData> collect(const SampledProcess& x, const std::vector<TimePair>& pairs, const PathBundle& paths) {
  require_same_grid(x.grid(), paths.grid());
  if (x.n_paths() != paths.n_paths()) throw Error(ErrorKind::LengthMismatch, "process and paths differ in path count");
  std::vector<PairData> out;
  for (const auto& pr : pairs) {
    const std::size_t s = x.grid().index_of(pr.s);
    const std::size_t t = x.grid().index_of(pr.t);
    if (s >= t) throw Error(ErrorKind::InvalidArgument, "test pairs need s < t");
    PairData d{pr, std::vector<double>(x.n_paths()), paths.column(s)};
    for (std::size_t p = 0; p < x.n_paths(); ++p) d.increment[p] = x.at(p, t) - x.at(p, s);
    out.push_back(std::move(d));
  }
  return out;
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::InvalidConfig, "alpha must lie in (0, 1)");
}

}  // namespace

double normal_quantile(double p) { return boost::math::quantile(boost::math::normal(), p); }

TimeGrid::TimeGrid(double horizon, std::size_t steps) : horizon_(horizon), steps_(steps) {
  if (!std::isfinite(horizon) || horizon <= 0.0) throw Error(ErrorKind::InvalidConfig, "horizon must be positive");
  if (steps == 0) throw Error(ErrorKind::InvalidConfig, "steps must be at least 1");
}

std::size_t TimeGrid::index_of(double t) const {
  const double x = t / horizon_ * static_cast<double>(steps_);
  const double r = std::round(x);
  if (!(r >= 0.0 && r <= static_cast<double>(steps_)) || std::abs(x - r) > 1e-9) {
    std::ostringstream os;
    os << "t=" << t << " is not a time of the grid with T=" << horizon_ << ", n=" << steps_;
    throw Error(ErrorKind::GridMismatch, os.str());
  }
  return static_cast<std::size_t>(r);
}

TimeGrid TimeGrid::coarsen(std::size_t factor) const {
  if (factor == 0 || steps_ % factor != 0) {
    throw Error(ErrorKind::GridMismatch, "coarsening factor must divide the step count");
  }
  return TimeGrid(horizon_, steps_ / factor);
}

PathBundle::PathBundle(TimeGrid grid, std::size_t n_paths, std::uint64_t seed, std::vector<double> values)
    : grid_(grid), n_paths_(n_paths), seed_(seed), values_(std::move(values)) {
  if (values_.size() != n_paths_ * (grid_.steps() + 1)) {
    throw Error(ErrorKind::LengthMismatch, "path matrix size does not match grid and path count");
  }
}

std::span<const double> PathBundle::row(std::size_t path) const {
  return {values_.data() + path * (grid_.steps() + 1), grid_.steps() + 1};
}

std::vector<double> PathBundle::column(std::size_t i) const {
  return take_column(values_, n_paths_, grid_.steps() + 1, i);
}

PathBundle gen_brownian_chunk(const TimeGrid& grid, std::size_t chunk, std::size_t n_paths, std::uint64_t seed) {
  if (n_paths == 0 || n_paths > kChunkPaths) throw Error(ErrorKind::InvalidConfig, "chunk path count out of range");
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(chunk), static_cast<std::uint32_t>(chunk >> 32)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double sd = std::sqrt(grid.dt());
  const std::size_t width = grid.steps() + 1;
  std::vector<double> values(n_paths * width);
  for (std::size_t p = 0; p < n_paths; ++p) {
    double b = 0.0;
    values[p * width] = 0.0;
    for (std::size_t i = 1; i < width; ++i) {
      b += sd * normal(rng);
      values[p * width + i] = b;
    }
  }
  return PathBundle(grid, n_paths, seed, std::move(values));
}

PathBundle gen_brownian(const TimeGrid& grid, std::size_t n_paths, std::uint64_t seed) {
  if (n_paths == 0) throw Error(ErrorKind::InvalidConfig, "n_paths must be at least 1");
  std::vector<double> values;
  values.reserve(n_paths * (grid.steps() + 1));
  for (std::size_t chunk = 0; chunk * kChunkPaths < n_paths; ++chunk) {
    const std::size_t n = std::min(kChunkPaths, n_paths - chunk * kChunkPaths);
    const PathBundle part = gen_brownian_chunk(grid, chunk, n, seed);
    values.insert(values.end(), part.values().begin(), part.values().end());
  }
  return PathBundle(grid, n_paths, seed, std::move(values));
}

PathBundle coarsen(const PathBundle& paths, std::size_t factor) {
  const TimeGrid grid = paths.grid().coarsen(factor);
  return PathBundle(grid, paths.n_paths(), paths.seed(),
                    coarsen_values(paths.values(), paths.n_paths(), paths.grid().steps(), factor));
}

void append_paths(PathBundle& into, const PathBundle& more) {
  require_same_grid(into.grid(), more.grid());
  std::vector<double> values = into.values();
  values.insert(values.end(), more.values().begin(), more.values().end());
  into = PathBundle(into.grid(), into.n_paths() + more.n_paths(), into.seed(), std::move(values));
}

SampledProcess::SampledProcess(TimeGrid grid, std::size_t n_paths, std::vector<double> values, bool adapted)
    : grid_(grid), n_paths_(n_paths), values_(std::move(values)), adapted_(adapted) {
  if (values_.size() != n_paths_ * (grid_.steps() + 1)) {
    throw Error(ErrorKind::LengthMismatch, "process matrix size does not match grid and path count");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw Error(ErrorKind::NonFinite, "sampled process has a non-finite value");
  }
}

std::span<const double> SampledProcess::row(std::size_t path) const {
  return {values_.data() + path * (grid_.steps() + 1), grid_.steps() + 1};
}

std::vector<double> SampledProcess::column(std::size_t i) const {
  return take_column(values_, n_paths_, grid_.steps() + 1, i);
}

SampledProcess brownian(const PathBundle& paths) {
  return SampledProcess(paths.grid(), paths.n_paths(), paths.values());
}

SampledProcess constant_process(const PathBundle& paths, double value) {
  return SampledProcess(paths.grid(), paths.n_paths(), std::vector<double>(paths.values().size(), value));
}

SampledProcess apply(const SampledProcess& x, const std::function<double(double)>& fn) {
  std::vector<double> out(x.values().size());
  std::transform(x.values().begin(), x.values().end(), out.begin(), fn);
  return SampledProcess(x.grid(), x.n_paths(), std::move(out), x.adapted());
}

SampledProcess apply(const SampledProcess& x, const SampledProcess& y,
                     const std::function<double(double, double)>& fn) {
  require_same_grid(x.grid(), y.grid());
  if (x.n_paths() != y.n_paths()) throw Error(ErrorKind::LengthMismatch, "processes differ in path count");
  std::vector<double> out(x.values().size());
  std::transform(x.values().begin(), x.values().end(), y.values().begin(), out.begin(), fn);
  return SampledProcess(x.grid(), x.n_paths(), std::move(out), x.adapted() && y.adapted());
}

SampledProcess coarsen(const SampledProcess& x, std::size_t factor) {
  const TimeGrid grid = x.grid().coarsen(factor);
  return SampledProcess(grid, x.n_paths(), coarsen_values(x.values(), x.n_paths(), x.grid().steps(), factor),
                        x.adapted());
}

void append_paths(SampledProcess& into, const SampledProcess& more) {
  require_same_grid(into.grid(), more.grid());
  std::vector<double> values = into.values();
  values.insert(values.end(), more.values().begin(), more.values().end());
  into = SampledProcess(into.grid(), into.n_paths() + more.n_paths(), std::move(values),
                        into.adapted() && more.adapted());
}

SampledProcess ito_integral(const SampledProcess& integrand, const PathBundle& paths) {
  require_same_grid(integrand.grid(), paths.grid());
  if (integrand.n_paths() != paths.n_paths()) {
    throw Error(ErrorKind::LengthMismatch, "integrand and paths differ in path count");
  }
  if (!integrand.adapted()) throw Error(ErrorKind::NotAdapted, "Ito integrand must be adapted");
  const std::size_t width = paths.grid().steps() + 1;
  std::vector<double> out(integrand.values().size());
  for (std::size_t p = 0; p < paths.n_paths(); ++p) {
    double acc = 0.0;
    out[p * width] = 0.0;
    for (std::size_t i = 1; i < width; ++i) {
      acc += integrand.at(p, i - 1) * (paths.at(p, i) - paths.at(p, i - 1));
      out[p * width + i] = acc;
    }
  }
  return SampledProcess(paths.grid(), paths.n_paths(), std::move(out));
}

SampledProcess geometric_martingale(const PathBundle& paths) {
  const std::size_t width = paths.grid().steps() + 1;
  std::vector<double> out(paths.values().size());
  for (std::size_t p = 0; p < paths.n_paths(); ++p) {
    for (std::size_t i = 0; i < width; ++i) {
      out[p * width + i] = std::exp(paths.at(p, i) - 0.5 * paths.grid().time(i));
    }
  }
  return SampledProcess(paths.grid(), paths.n_paths(), std::move(out));
}

SampledProcess SampledIntervalProcess::width() const {
  return apply(hi_, lo_, [](double b, double a) { return b - a; });
}

SampledIntervalProcess interval_process(const SampledProcess& lo, const SampledProcess& hi) {
  require_same_grid(lo.grid(), hi.grid());
  if (lo.n_paths() != hi.n_paths()) throw Error(ErrorKind::LengthMismatch, "endpoints differ in path count");
  const std::size_t width = lo.grid().steps() + 1;
  for (std::size_t k = 0; k < lo.values().size(); ++k) {
    if (lo.values()[k] > hi.values()[k] + kOrderTol) {
      std::ostringstream os;
      os << "lower endpoint exceeds upper at path " << k / width << ", time index " << k % width;
      throw Error(ErrorKind::OrderViolation, os.str());
    }
  }
  // Clamp the sub-tolerance crossings so every value is a valid Interval.
  SampledProcess lo_clamped = apply(lo, hi, [](double a, double b) { return std::min(a, b); });
  return SampledIntervalProcess(std::move(lo_clamped), hi);
}

SegmentPair segment_pair(const SampledProcess& f, const SampledProcess& g, const PathBundle& paths) {
  SampledProcess xi = ito_integral(f, paths);
  SampledProcess eta = ito_integral(g, paths);
  SampledProcess lo = apply(xi, eta, [](double a, double b) { return std::min(a, b); });
  SampledProcess hi = apply(xi, eta, [](double a, double b) { return std::max(a, b); });
  SampledIntervalProcess M = interval_process(lo, hi);
  return SegmentPair{std::move(xi), std::move(eta), std::move(M)};
}

McEstimate mc_mean(std::span<const double> sample) {
  McEstimate est;
  est.n = sample.size();
  if (sample.empty()) return est;
  double sum = 0.0;
  for (double v : sample) sum += v;
  est.mean = sum / static_cast<double>(est.n);
  if (est.n > 1) {
    double ss = 0.0;
    for (double v : sample) ss += (v - est.mean) * (v - est.mean);
    est.std_error = std::sqrt(ss / static_cast<double>(est.n - 1) / static_cast<double>(est.n));
  }
  return est;
}

McEstimate mc_variance(std::span<const double> sample) {
  McEstimate est;
  est.n = sample.size();
  if (est.n < 2) return est;
  const double n = static_cast<double>(est.n);
  const double mean = mc_mean(sample).mean;
  double m2 = 0.0;
  double m4 = 0.0;
  for (double v : sample) {
    const double d = (v - mean) * (v - mean);
    m2 += d;
    m4 += d * d;
  }
  est.mean = m2 / (n - 1.0);
  m2 /= n;
  m4 /= n;
  est.std_error = std::sqrt(std::max(0.0, m4 - m2 * m2) / n);
  return est;
}

std::pair<McEstimate, McEstimate> mc_interval_expectation(const SampledIntervalProcess& M, double t) {
  const std::size_t i = M.grid().index_of(t);
  const auto lo = M.lo().column(i);
  const auto hi = M.hi().column(i);
  return {mc_mean(lo), mc_mean(hi)};
}

std::vector<double> time_integral_of_square(const SampledProcess& x) {
  const std::size_t n = x.grid().steps();
  const double dt = x.grid().dt();
  std::vector<double> out(x.n_paths());
  for (std::size_t p = 0; p < x.n_paths(); ++p) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double a = x.at(p, i);
      const double b = x.at(p, i + 1);
      acc += 0.5 * (a * a + b * b) * dt;
    }
    out[p] = acc;
  }
  return out;
}

std::vector<TimePair> default_pairs(const TimeGrid& grid) {
  const double T = grid.horizon();
  return {{T / 4, T / 2}, {T / 2, T}, {T / 4, T}};
}

std::string to_string(Direction d) { return d == Direction::Sub ? "submartingale" : "supermartingale"; }

TestReport martingale_test(const SampledProcess& x, const std::vector<TimePair>& pairs, const PathBundle& paths,
                           double alpha) {
  check_alpha(alpha);
  const auto data = collect(x, pairs, paths);
  TestReport report;
  report.test = "martingale";
  report.alpha = alpha;
  report.n_tests = pairs.size() * (2 + kTestBins);
  report.critical_value = normal_quantile(1.0 - alpha / (2.0 * static_cast<double>(report.n_tests)));
  report.seed = paths.seed();
  report.n_paths = x.n_paths();

  auto add_row = [&](const PairData& d, const std::string& name, const std::vector<double>& product) {
    const McEstimate est = mc_mean(product);
    TestRow row{d.pair, name, est.mean, est.std_error, report.critical_value * est.std_error, true};
    row.pass = std::abs(row.statistic) <= row.threshold;
    report.rows.push_back(row);
  };

  for (const auto& d : data) {
    const std::size_t n = d.increment.size();
    add_row(d, "one", d.increment);
    std::vector<double> product(n);
    for (std::size_t p = 0; p < n; ++p) product[p] = d.increment[p] * d.b_s[p];
    add_row(d, "B_s", product);
    const auto edges = bin_edges(d.pair.s);
    for (std::size_t j = 0; j < kTestBins; ++j) {
      for (std::size_t p = 0; p < n; ++p) product[p] = bin_of(edges, d.b_s[p]) == j ? d.increment[p] : 0.0;
      add_row(d, pair_label("bin", j), product);
    }
  }
  report.verdict = std::all_of(report.rows.begin(), report.rows.end(), [](const TestRow& r) { return r.pass; });
  return report;
}

TestReport directional_test(const SampledProcess& x, Direction direction, const std::vector<TimePair>& pairs,
                            const PathBundle& paths, double alpha) {
  check_alpha(alpha);
  const auto data = collect(x, pairs, paths);
  TestReport report;
  report.test = to_string(direction);
  report.alpha = alpha;
  report.n_tests = pairs.size() * kTestBins;
  report.critical_value = normal_quantile(1.0 - alpha / static_cast<double>(report.n_tests));
  report.seed = paths.seed();
  report.n_paths = x.n_paths();

  for (const auto& d : data) {
    const auto edges = bin_edges(d.pair.s);
    std::vector<std::vector<double>> by_bin(kTestBins);
    for (std::size_t p = 0; p < d.increment.size(); ++p) by_bin[bin_of(edges, d.b_s[p])].push_back(d.increment[p]);
    for (std::size_t j = 0; j < kTestBins; ++j) {
      const McEstimate est = mc_mean(by_bin[j]);
      TestRow row{d.pair, pair_label("bin", j), est.mean, est.std_error, report.critical_value * est.std_error, true};
      // A submartingale has nonnegative conditional increments; a violation is
      // a mean significantly below zero (above zero for super).
      row.pass = direction == Direction::Sub ? row.statistic >= -row.threshold : row.statistic <= row.threshold;
      report.rows.push_back(row);
    }
  }
  report.verdict = std::all_of(report.rows.begin(), report.rows.end(), [](const TestRow& r) { return r.pass; });
  return report;
}

ItoConsistencyReport ito_self_consistency(double horizon, std::size_t base_steps, std::size_t doublings,
                                          std::size_t n_paths, std::uint64_t seed) {
  const std::size_t finest = base_steps << doublings;
  const PathBundle fine = gen_brownian(TimeGrid(horizon, finest), n_paths, seed);
  ItoConsistencyReport report;
  for (std::size_t d = 0; d <= doublings; ++d) {
    const std::size_t factor = std::size_t{1} << (doublings - d);
    const PathBundle paths = factor == 1 ? fine : coarsen(fine, factor);
    const SampledProcess X = geometric_martingale(paths);
    const SampledProcess I = ito_integral(X, paths);
    double ss = 0.0;
    for (std::size_t p = 0; p < n_paths; ++p) {
      double worst = 0.0;
      for (std::size_t i = 0; i <= paths.grid().steps(); ++i) {
        worst = std::max(worst, std::abs(1.0 + I.at(p, i) - X.at(p, i)));
      }
      ss += worst * worst;
    }
    report.steps.push_back(paths.grid().steps());
    report.rms_max_error.push_back(std::sqrt(ss / static_cast<double>(n_paths)));
  }
  report.monotone = true;
  for (std::size_t k = 1; k < report.rms_max_error.size(); ++k) {
    report.monotone = report.monotone && report.rms_max_error[k] < report.rms_max_error[k - 1];
  }
  return report;
}

}  // namespace setval
