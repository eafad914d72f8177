#include "setval/representation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/distributions/normal.hpp>

#include "setval/error.hpp"

namespace setval {

namespace {

TreePointProcess endpoint(const BinaryTree& tree, const TreeSetProcess& M, bool upper) {
  std::vector<std::vector<double>> levels;
  for (const auto& row : M.levels()) {
    std::vector<double> values;
    for (const Interval& v : row) values.push_back(upper ? v.hi() : v.lo());
    levels.push_back(std::move(values));
  }
  return TreePointProcess(tree, std::move(levels));
}

void require_martingale_endpoints(const BinaryTree& tree, const TreeSetProcess& M) {
  if (classify_tree(endpoint(tree, M, false)) != Classification::Martingale) {
    throw Error(ErrorKind::NotMartingale, "lower endpoint is not a tree martingale");
  }
  if (classify_tree(endpoint(tree, M, true)) != Classification::Martingale) {
    throw Error(ErrorKind::NotMartingale, "upper endpoint is not a tree martingale");
  }
}

double population_variance(const std::vector<double>& x) {
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return ss / static_cast<double>(x.size());
}

// Raw moments of exp(B_t - t/2): E X^k = exp(k (k - 1) t / 2).
double lognormal_moment(int k, double t) { return std::exp(0.5 * k * (k - 1) * t); }

TreeWidthReport width_stats(const TreeSetProcess& M) {
  TreeWidthReport report;
  report.constant_per_time = true;
  const double w0 = M.at(0, 0).width();
  for (std::size_t k = 0; k <= M.depth(); ++k) {
    std::vector<double> widths;
    for (const Interval& v : M.levels()[k]) widths.push_back(v.width());
    report.width_variance.push_back(population_variance(widths));
    double mean = 0.0;
    for (double w : widths) mean += w;
    report.mean_width.push_back(mean / static_cast<double>(widths.size()));
    for (std::size_t s = 1; s < widths.size() && !report.witness; ++s) {
      if (std::abs(widths[s] - widths[0]) > kExactTol) {
        report.constant_per_time = false;
        report.witness = WidthWitness{k, 0, s, widths[0], widths[s]};
      }
    }
  }
  report.constant_across_time = std::all_of(report.mean_width.begin(), report.mean_width.end(),
                                            [&](double m) { return std::abs(m - w0) <= kExactTol; });
  report.constant = report.constant_per_time && report.constant_across_time;
  return report;
}

}  // namespace

TreeWidthReport width_constancy_test(const BinaryTree& tree, const TreeSetProcess& M) {
  require_martingale_endpoints(tree, M);
  return width_stats(M);
}

std::vector<TreePointProcess> castaing_family(const BinaryTree& tree, const TreeSetProcess& M, std::size_t n) {
  std::vector<TreePointProcess> family;
  for (std::size_t i = 0; i < n; ++i) {
    const double lambda = castaing_weight(i);
    std::vector<std::vector<double>> levels;
    for (const auto& row : M.levels()) {
      std::vector<double> values;
      for (const Interval& v : row) values.push_back(lambda * v.lo() + (1.0 - lambda) * v.hi());
      levels.push_back(std::move(values));
    }
    family.emplace_back(tree, std::move(levels));
  }
  return family;
}

bool condition_iii_test(const std::vector<TreePointProcess>& family) {
  if (family.empty()) throw Error(ErrorKind::EmptyFamily, "condition (iii) needs at least one process");
  for (const auto& f : family) {
    if (classify_tree(f) != Classification::Martingale) {
      throw Error(ErrorKind::NotMartingale, "family member is not a tree martingale");
    }
  }
  for (std::size_t i = 0; i < family.size(); ++i) {
    for (std::size_t j = i + 1; j < family.size(); ++j) {
      const double d0 = family[i].at(0, 0) - family[j].at(0, 0);
      for (std::size_t k = 0; k <= family[i].depth(); ++k) {
        for (std::size_t s = 0; s < BinaryTree::nodes_at(k); ++s) {
          if (std::abs(family[i].at(k, s) - family[j].at(k, s) - d0) > kExactTol) return false;
        }
      }
    }
  }
  return true;
}

TreeSetProcess build_representation(const BinaryTree& tree, const Interval& C, const PointIntegrand& g) {
  const TreePointProcess a = transform(tree, g, C.lo());
  const TreePointProcess b = transform(tree, g, C.hi());
  std::vector<std::vector<Interval>> levels;
  for (std::size_t k = 0; k <= tree.depth(); ++k) {
    std::vector<Interval> row;
    for (std::size_t s = 0; s < BinaryTree::nodes_at(k); ++s) row.push_back(Interval::make(a.at(k, s), b.at(k, s)));
    levels.push_back(std::move(row));
  }
  return TreeSetProcess(tree, std::move(levels));
}

TreeSetProcess build_representation(const BinaryTree& tree, const ConvexBody& C, const PointIntegrand& g) {
  return build_representation(tree, C.as_interval(), g);
}

Recovery recover_integrand_tree(const BinaryTree& tree, const TreeSetProcess& M) {
  // Width first: a varying width rules out any representation, martingale or not.
  const TreeWidthReport width = width_stats(M);
  if (!width.constant) {
    std::ostringstream os;
    os << "width is not constant";
    if (width.witness) {
      os << " (level " << width.witness->level << ": " << width.witness->width_a << " vs " << width.witness->width_b
         << ")";
    }
    throw Error(ErrorKind::NotRepresentable, os.str());
  }
  require_martingale_endpoints(tree, M);
  std::vector<std::vector<double>> g;
  for (std::size_t k = 0; k < M.depth(); ++k) {
    std::vector<double> row;
    for (std::size_t s = 0; s < BinaryTree::nodes_at(k); ++s) {
      row.push_back(0.5 * (M.at(k + 1, BinaryTree::child(s, true)).lo() -
                           M.at(k + 1, BinaryTree::child(s, false)).lo()));
    }
    g.push_back(std::move(row));
  }
  return Recovery{M.at(0, 0), PointIntegrand(tree, std::move(g))};
}

TreeCrosscheck theorem_main_crosscheck(const BinaryTree& tree, const TreeSetProcess& M, std::size_t n_castaing) {
  TreeCrosscheck report;
  report.width_constant = width_constancy_test(tree, M).constant;
  report.condition_iii = condition_iii_test(castaing_family(tree, M, n_castaing));
  if (report.width_constant != report.condition_iii) {
    throw Error(ErrorKind::Inconsistent, "width constancy and the Castaing difference condition disagree");
  }
  report.representable = report.width_constant;
  report.expectations = level_expectations(M);
  report.expectation_invariant =
      std::all_of(report.expectations.begin(), report.expectations.end(),
                  [&](const Interval& e) { return approx_equal(e, report.expectations.front()); });
  if (report.representable) {
    report.recovery = recover_integrand_tree(tree, M);
    const TreeSetProcess rebuilt = build_representation(tree, report.recovery->C, report.recovery->g);
    for (std::size_t k = 0; k <= M.depth(); ++k) {
      for (std::size_t s = 0; s < BinaryTree::nodes_at(k); ++s) {
        report.roundtrip_hausdorff = std::max(report.roundtrip_hausdorff, hausdorff_distance(M.at(k, s), rebuilt.at(k, s)));
      }
    }
    if (report.roundtrip_hausdorff > kExactTol || !report.expectation_invariant) {
      throw Error(ErrorKind::Inconsistent, "recovered representation does not reproduce the process");
    }
  }
  return report;
}

SampledWidthReport width_constancy_test(const SampledIntervalProcess& M, const PathBundle& paths, double alpha,
                                        double tol) {
  SampledWidthReport report;
  const auto pairs = default_pairs(M.grid());
  report.lower_test = martingale_test(M.lo(), pairs, paths, alpha);
  report.upper_test = martingale_test(M.hi(), pairs, paths, alpha);
  if (!report.lower_test.verdict || !report.upper_test.verdict) {
    throw Error(ErrorKind::NotMartingale, "endpoint martingale test rejected; representability is undefined");
  }
  report.tolerance = tol;
  const SampledProcess width = M.width();
  const std::size_t steps = M.grid().steps();
  report.drift_critical_value = normal_quantile(1.0 - alpha / (2.0 * static_cast<double>(steps)));
  report.constant_per_time = true;
  report.constant_across_time = true;
  for (std::size_t i = 0; i <= steps; ++i) {
    const auto column = width.column(i);
    report.times.push_back(M.grid().time(i));
    report.width_variance.push_back(mc_variance(column));
    report.mean_width.push_back(mc_mean(column));
    report.constant_per_time = report.constant_per_time && report.width_variance.back().mean <= tol;
    const McEstimate& m0 = report.mean_width.front();
    const McEstimate& mi = report.mean_width.back();
    const double slack = report.drift_critical_value * std::hypot(m0.std_error, mi.std_error);
    report.constant_across_time = report.constant_across_time && std::abs(mi.mean - m0.mean) <= tol + slack;
  }
  report.constant = report.constant_per_time && report.constant_across_time;

  const double t = M.grid().horizon();
  const double m2 = lognormal_moment(2, t);
  const double m3 = lognormal_moment(3, t);
  const double m4 = lognormal_moment(4, t);
  report.alternative_variance = m2 - 1.0;
  const double central4 = m4 - 4.0 * m3 + 6.0 * m2 - 3.0;
  const double n = static_cast<double>(M.n_paths());
  report.alternative_std_error =
      std::sqrt(std::max(0.0, central4 - report.alternative_variance * report.alternative_variance) / n);
  report.power = boost::math::cdf(boost::math::normal(),
                                  (report.alternative_variance - tol) / report.alternative_std_error);
  return report;
}

bool condition_iii_test(const std::vector<SampledProcess>& family, double tol) {
  if (family.empty()) throw Error(ErrorKind::EmptyFamily, "condition (iii) needs at least one process");
  const std::size_t steps = family.front().grid().steps();
  for (std::size_t i = 0; i < family.size(); ++i) {
    for (std::size_t j = i + 1; j < family.size(); ++j) {
      const SampledProcess d = apply(family[i], family[j], [](double x, double y) { return x - y; });
      const double m0 = mc_mean(d.column(0)).mean;
      for (std::size_t k = 0; k <= steps; ++k) {
        const auto column = d.column(k);
        if (mc_variance(column).mean > tol) return false;
        if (std::abs(mc_mean(column).mean - m0) > std::sqrt(tol)) return false;
      }
    }
  }
  return true;
}

std::vector<SampledProcess> castaing_family(const SampledIntervalProcess& M, std::size_t n) {
  std::vector<SampledProcess> family;
  for (std::size_t i = 0; i < n; ++i) {
    const double lambda = castaing_weight(i);
    family.push_back(apply(M.lo(), M.hi(), [lambda](double a, double b) { return lambda * a + (1.0 - lambda) * b; }));
  }
  return family;
}

SampledIntervalProcess build_representation(const Interval& C, const SampledProcess& g, const PathBundle& paths) {
  const SampledProcess I = ito_integral(g, paths);
  return interval_process(apply(I, [lo = C.lo()](double x) { return lo + x; }),
                          apply(I, [hi = C.hi()](double x) { return hi + x; }));
}

SampledCrosscheck theorem_main_crosscheck(const SampledIntervalProcess& M, const PathBundle& paths, double alpha,
                                          std::size_t n_castaing) {
  SampledCrosscheck report;
  report.width = width_constancy_test(M, paths, alpha);
  report.condition_iii = condition_iii_test(castaing_family(M, n_castaing), report.width.tolerance);
  if (report.width.constant != report.condition_iii) {
    throw Error(ErrorKind::Inconsistent, "width constancy and the Castaing difference condition disagree");
  }
  report.representable = report.width.constant;
  return report;
}

}  // namespace setval
