#include "setval/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <map>
#include <random>
#include <sstream>

#include "setval/error.hpp"

namespace setval {

namespace {

// Monte Carlo experiments keep B and the processes only at T/4, T/2, 3T/4, T.
constexpr std::size_t kObservedSteps = 4;

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(6) << x;
  return os.str();
}

std::string fmt(const Interval& v) { return "[" + fmt(v.lo()) + ", " + fmt(v.hi()) + "]"; }

const char* yes_no(bool b) { return b ? "yes" : "no"; }

class Builder {
 public:
  Builder(std::string id, std::string title, const ExperimentConfig& config) {
    report_.id = std::move(id);
    report_.title = std::move(title);
    report_.config = config;
    report_.statistics["summary"] = Json::array();
  }

  bool check(const std::string& name, bool pass) {
    report_.checks.push_back({name, pass});
    return pass;
  }
  void summary(const std::string& line) { report_.statistics["summary"].push_back(line); }
  Json& stats() { return report_.statistics; }
  void rows(const std::string& check, const TestReport& t) {
    for (const auto& r : t.rows) report_.rows.push_back({check, r});
  }
  RunReport take() { return std::move(report_); }

 private:
  RunReport report_;
};

bool within(const McEstimate& e, double target, double floor) {
  return std::abs(e.mean - target) <= std::max(4.0 * e.std_error, floor);
}

// ---------------------------------------------------------------- streaming

struct Observed {
  std::optional<PathBundle> paths;
  std::vector<std::optional<SampledProcess>> series;
  std::vector<std::vector<double>> scalars;

  const SampledProcess& at(std::size_t i) const { return *series.at(i); }
};

using ChunkFn = std::function<void(const PathBundle& fine, std::vector<SampledProcess>& series,
                                   std::vector<std::vector<double>>& scalars)>;

// Generates the configured bundle chunk by chunk, evaluates `fn` on the
// full-resolution chunk and keeps only the observed times.
Observed stream(const ExperimentConfig& c, const ChunkFn& fn) {
  if (c.steps % kObservedSteps != 0) {
    throw Error(ErrorKind::InvalidConfig, "Monte Carlo experiments need steps divisible by 4");
  }
  const TimeGrid grid(c.horizon, c.steps);
  const std::size_t factor = c.steps / kObservedSteps;
  Observed out;
  for (std::size_t chunk = 0; chunk * kChunkPaths < c.paths; ++chunk) {
    const std::size_t n = std::min(kChunkPaths, c.paths - chunk * kChunkPaths);
    const PathBundle fine = gen_brownian_chunk(grid, chunk, n, c.seed);
    std::vector<SampledProcess> series;
    std::vector<std::vector<double>> scalars;
    fn(fine, series, scalars);
    const PathBundle coarse = coarsen(fine, factor);
    if (!out.paths) {
      out.paths = coarse;
      out.series.resize(series.size());
      out.scalars.resize(scalars.size());
    } else {
      append_paths(*out.paths, coarse);
    }
    for (std::size_t i = 0; i < series.size(); ++i) {
      SampledProcess s = coarsen(series[i], factor);
      if (!out.series[i]) {
        out.series[i] = std::move(s);
      } else {
        append_paths(*out.series[i], s);
      }
    }
    for (std::size_t i = 0; i < scalars.size(); ++i) {
      out.scalars[i].insert(out.scalars[i].end(), scalars[i].begin(), scalars[i].end());
    }
  }
  // Chunk substreams are tagged with the bundle seed; the coarse bundle keeps it.
  *out.paths = PathBundle(out.paths->grid(), out.paths->n_paths(), c.seed, out.paths->values());
  return out;
}

// ---------------------------------------------------------------- exact experiments

RunReport interval_ops(const ExperimentConfig& c) {
  Builder b("interval-ops", "Interval arithmetic: scalar distributivity and the expectation of f[a,b]", c);
  const Interval A = mk_interval(0, 1);
  const double lambda = 1.0;
  const double eta = -1.0;
  const Interval joint = scalar_mul(lambda + eta, A);
  const Interval split = minkowski_add(scalar_mul(lambda, A), scalar_mul(eta, A));
  b.check("(lambda + eta) A = {0}", joint == Interval::point(0));
  b.check("lambda A + eta A = [-1, 1]", split == mk_interval(-1, 1));
  b.check("(lambda + eta) A strictly inside lambda A + eta A", contains(split, joint, 0.0) && !(split == joint));
  b.check("same-sign scalars distribute", scalar_mul(2.0 + 3.0, A) == minkowski_add(scalar_mul(2.0, A), scalar_mul(3.0, A)));

  // f = +-1 with probability 1/2: E(f [0,1]) = [-1/2, 1/2] but E(f) [0,1] = {0}.
  const SpacePtr space = make_space(FiniteProbSpace::uniform(2));
  const PointRV f(space, std::vector<double>{1.0, -1.0});
  const SetRV fA(space, std::vector<Interval>{scalar_mul(1.0, A), scalar_mul(-1.0, A)});
  const Interval e_fA = aumann_expectation(fA).as_interval();
  const Interval ef_A = scalar_mul(expectation(f)[0], A);
  b.check("E(f [0,1]) = [-1/2, 1/2]", e_fA == mk_interval(-0.5, 0.5));
  b.check("E(f) [0,1] = {0}", ef_A == Interval::point(0));
  b.check("E(f [0,1]) differs from E(f) [0,1]", !(e_fA == ef_A));

  const auto h = hukuhara_diff(split, A);
  b.check("Hukuhara [-1,1] - [0,1] = [-1,0]", h.has_value() && *h == mk_interval(-1, 0));
  b.check("Hukuhara [0,1] - [-1,1] does not exist", !hukuhara_diff(A, split).has_value());

  b.stats()["joint"] = to_json(joint);
  b.stats()["split"] = to_json(split);
  b.stats()["expectation_of_f_times_A"] = to_json(e_fA);
  b.stats()["expectation_of_f_times_A_scaled"] = to_json(ef_A);
  b.summary("(lambda + eta) A = " + fmt(joint) + ", lambda A + eta A = " + fmt(split));
  b.summary("E(f [0,1]) = " + fmt(e_fA) + ", E(f) [0,1] = " + fmt(ef_A));
  return b.take();
}

SetRV random_set_rv(std::mt19937_64& rng, bool force_points) {
  std::uniform_int_distribution<int> n_atoms(2, 6);
  std::uniform_int_distribution<int> weight(1, 8);
  std::uniform_int_distribution<int> coord(-16, 16);
  std::uniform_int_distribution<int> dim_dist(1, 3);
  const std::size_t n = static_cast<std::size_t>(n_atoms(rng));
  std::vector<double> probs(n);
  double total = 0.0;
  for (double& p : probs) total += (p = weight(rng));
  for (double& p : probs) p /= total;
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back("w" + std::to_string(i));
  const SpacePtr space = make_space(FiniteProbSpace(ids, probs));
  const std::size_t dim = static_cast<std::size_t>(dim_dist(rng));
  std::vector<ConvexBody> values;
  for (std::size_t i = 0; i < n; ++i) {
    const bool point = force_points || std::bernoulli_distribution(0.5)(rng);
    const std::size_t count = point ? 1 : dim + 1;
    std::vector<Point> pts(count, Point(dim));
    for (auto& p : pts) {
      for (double& x : p) x = coord(rng) / 8.0;
    }
    values.emplace_back(dim, pts);
  }
  return SetRV(space, std::move(values));
}

RunReport mean0(const ExperimentConfig& c) {
  Builder b("mean0", "Singleton Aumann expectation forces a degenerate random set", c);
  std::mt19937_64 rng(c.seed);
  const std::size_t cases = 2 * c.trials;
  std::size_t agree = 0;
  std::size_t degenerate = 0;
  std::size_t witnesses_ok = 0;
  std::size_t non_degenerate = 0;
  for (std::size_t k = 0; k < cases; ++k) {
    const SetRV F = random_set_rv(rng, k % 3 == 0);
    const bool all_points =
        std::all_of(F.values().begin(), F.values().end(), [](const ConvexBody& v) { return v.is_singleton(); });
    const DegeneracyResult r = is_degenerate_by_expectation(F);
    agree += r.degenerate == all_points;
    degenerate += all_points;
    if (!all_points) {
      ++non_degenerate;
      const auto& w = r.witness;
      witnesses_ok += w.has_value() && w->mean_witness != w->mean_f1 && is_selection(w->witness, F) &&
                      is_selection(w->f1, F) && is_selection(w->f2, F);
    }
  }
  b.check("degenerate by expectation iff every value is a singleton", agree == cases);
  b.check("every non-degenerate case has a witness with E(witness) != E(f1)", witnesses_ok == non_degenerate);
  b.stats()["cases"] = cases;
  b.stats()["degenerate_cases"] = degenerate;
  b.stats()["agreements"] = agree;
  b.stats()["witnesses"] = witnesses_ok;
  b.summary(std::to_string(agree) + "/" + std::to_string(cases) + " agreements, " + std::to_string(witnesses_ok) +
            "/" + std::to_string(non_degenerate) + " witnesses");
  return b.take();
}

RunReport ex1_discrete(const ExperimentConfig& c) {
  const std::size_t depth = c.depth.value_or(4);
  Builder b("ex1-discrete", "Set-valued transform of a non-degenerate integrand on a binary tree", c);
  const BinaryTree tree(depth);
  const Ex1Report r = verify_ex1(tree, AdaptedIntervalProcess::constant(tree, mk_interval(0, 1)));
  const bool sub = r.classification.kind == Classification::Submartingale;
  const bool mart = r.classification.kind == Classification::Martingale;
  b.check("E(I_0) = {0}", r.expectations.at(0) == Interval::point(0));
  b.check("E(I_1) = [-1/2, 1/2]", r.expectations.at(1) == mk_interval(-0.5, 0.5));
  b.check("submartingale", sub);
  b.check("not a martingale", !mart);
  b.check("E(I_{n+1} | P_n) contains I_n at every cell", r.inclusion_everywhere);
  b.check("selection witness moves the mean", r.mean_violation.has_value() &&
                                                   r.mean_violation->mean_witness != r.mean_violation->mean_f1);
  b.check("certified", r.certified);
  Json e = Json::array();
  for (const auto& v : r.expectations) e.push_back(to_json(v));
  b.stats()["depth"] = depth;
  b.stats()["expectations"] = e;
  b.stats()["classification"] = to_json(r.classification);
  b.summary(std::string("submartingale: ") + yes_no(sub || mart) + "; martingale: " + yes_no(mart));
  b.summary("E(I_1) = " + fmt(r.expectations.at(1)) + ", E(I_N) = " + fmt(r.expectations.back()));
  return b.take();
}

RunReport ezzaki(const ExperimentConfig& c) {
  const std::size_t depth = c.depth.value_or(8);
  Builder b("ezzaki", "Segment [f, 2f] of a random walk: martingale selections, non-martingale set", c);
  const EzzakiReport r = ezzaki_counterexample(depth);
  b.check("every Castaing member (2 - lambda) f_n is a martingale", r.members_are_martingales);
  b.check("f_n changes sign", r.sign_changes);
  b.check("M is not a martingale", r.classification.kind != Classification::Martingale);
  b.check("int ||M_n|| <= 2 int |f_n| for every n", r.bound_holds);
  b.check("certified", r.certified);
  Json e = Json::array();
  for (const auto& v : r.expectations) e.push_back(to_json(v));
  b.stats()["depth"] = depth;
  b.stats()["castaing_weights"] = r.castaing_weights;
  b.stats()["classification"] = to_json(r.classification);
  b.stats()["expectations"] = e;
  b.stats()["norm_integrals"] = r.norm_integrals;
  b.stats()["abs_integrals"] = r.abs_integrals;
  b.summary("M classified as " + std::string(to_string(r.classification.kind)));
  b.summary("at n = N: int ||M_n|| = " + fmt(r.horizon_norm_integral) + ", 2 int |f_n| = " +
            fmt(2 * r.horizon_abs_integral));
  return b.take();
}

void discrete_segment_checks(Builder& b, const BinaryTree& tree, const AdaptedIntervalProcess& f,
                             const AdaptedIntervalProcess& g) {
  const SegmentReport r = segment_process_discrete(tree, f, g);
  const bool mart = r.classification.kind == Classification::Martingale;
  if (r.identical_integrands) {
    b.check("identical integrands give a degenerate martingale", mart && r.certified);
  } else {
    b.check("tree: min is a supermartingale", r.min_classification == Classification::Supermartingale ||
                                                  r.min_classification == Classification::Martingale);
    b.check("tree: max is a submartingale", r.max_classification == Classification::Submartingale ||
                                                r.max_classification == Classification::Martingale);
    b.check("tree: segment is a submartingale", r.classification.kind == Classification::Submartingale);
    b.check("tree: segment is not a martingale", !mart);
  }
  Json e = Json::array();
  for (const auto& v : r.expectations) e.push_back(to_json(v));
  b.stats()["tree"] = Json{{"depth", tree.depth()},
                           {"classification", to_json(r.classification)},
                           {"min", std::string(to_string(r.min_classification))},
                           {"max", std::string(to_string(r.max_classification))},
                           {"expectations", e}};
  b.summary(std::string("tree: submartingale: ") + yes_no(r.classification.kind == Classification::Submartingale || mart) +
            "; martingale: " + yes_no(mart));
}

RunReport segment(const ExperimentConfig& c) {
  Builder b("segment", "Segment process between two stochastic integrals", c);
  const BinaryTree tree(c.depth.value_or(4));
  discrete_segment_checks(b, tree, AdaptedIntervalProcess::constant(tree, Interval::point(1)),
                          AdaptedIntervalProcess::constant(tree, Interval::point(2)));

  const Observed obs = stream(c, [](const PathBundle& fine, auto& series, auto&) {
    const SegmentPair sp = segment_pair(constant_process(fine, 1.0), constant_process(fine, 2.0), fine);
    series.push_back(sp.M.lo());
    series.push_back(sp.M.hi());
  });
  const PathBundle& paths = *obs.paths;
  const auto pairs = default_pairs(paths.grid());
  const TestReport lo_super = directional_test(obs.at(0), Direction::Super, pairs, paths, c.alpha);
  const TestReport hi_sub = directional_test(obs.at(1), Direction::Sub, pairs, paths, c.alpha);
  const TestReport hi_mart = martingale_test(obs.at(1), pairs, paths, c.alpha);
  b.check("Monte Carlo: min consistent with supermartingale", lo_super.verdict);
  b.check("Monte Carlo: max consistent with submartingale", hi_sub.verdict);
  b.check("Monte Carlo: max rejected as a martingale", !hi_mart.verdict);
  b.rows("min supermartingale", lo_super);
  b.rows("max submartingale", hi_sub);
  b.rows("max martingale", hi_mart);
  const auto M = interval_process(obs.at(0), obs.at(1));
  const auto [elo, ehi] = mc_interval_expectation(M, c.horizon);
  b.stats()["expectation_at_T"] = Json{{"lo", to_json(elo)}, {"hi", to_json(ehi)}};
  b.stats()["min_supermartingale_test"] = to_json(lo_super);
  b.stats()["max_submartingale_test"] = to_json(hi_sub);
  b.stats()["max_martingale_test"] = to_json(hi_mart);
  b.summary("Monte Carlo E(M_T) ~ [" + fmt(elo.mean) + ", " + fmt(ehi.mean) + "]");
  return b.take();
}

// ---------------------------------------------------------------- exponential examples

void endpoint_tests(Builder& b, const SampledIntervalProcess& M, const PathBundle& paths, double alpha,
                    const std::string& label) {
  const auto pairs = default_pairs(paths.grid());
  const TestReport lo = martingale_test(M.lo(), pairs, paths, alpha);
  const TestReport hi = martingale_test(M.hi(), pairs, paths, alpha);
  b.check(label + ": lower endpoint consistent with martingale", lo.verdict);
  b.check(label + ": upper endpoint consistent with martingale", hi.verdict);
  b.rows(label + " lower martingale", lo);
  b.rows(label + " upper martingale", hi);
}

// Returns nullopt (and records failed checks) when the endpoint tests reject.
std::optional<SampledCrosscheck> crosscheck(Builder& b, const SampledIntervalProcess& M, const PathBundle& paths,
                                            double alpha, const std::string& label) {
  try {
    return theorem_main_crosscheck(M, paths, alpha);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NotMartingale) throw;
    b.check(label + ": representability assessed", false);
    return std::nullopt;
  }
}

RunReport exp_representable(const ExperimentConfig& c) {
  Builder b("exp-representable", "Translate of [0,1] by the exponential martingale", c);
  const Interval C = mk_interval(1, 2);
  const Observed obs = stream(c, [&](const PathBundle& fine, auto& series, auto& scalars) {
    SampledProcess X = geometric_martingale(fine);
    const SampledIntervalProcess built = build_representation(C, X, fine);
    scalars.push_back(time_integral_of_square(X));
    series.push_back(apply(X, [](double x) { return 1.0 + x; }));
    series.push_back(built.lo());
    series.push_back(built.hi());
    series.push_back(std::move(X));
  });
  const PathBundle& paths = *obs.paths;
  const SampledProcess& X = obs.at(3);
  const double T = c.horizon;
  const std::size_t last = paths.grid().steps();

  const McEstimate ex = mc_mean(X.column(last));
  const McEstimate energy = mc_mean(obs.scalars[0]);
  const double energy_target = std::exp(T) - 1.0;
  b.check("E(X_T) = 1", within(ex, 1.0, 0.01));
  b.check("E int_0^T X_t^2 dt = e^T - 1", within(energy, energy_target, 0.02 * energy_target));

  const auto M = interval_process(X, obs.at(0));
  const auto [elo, ehi] = mc_interval_expectation(M, T);
  b.check("E(M_T) lower endpoint = 1", within(elo, 1.0, 0.0));
  b.check("E(M_T) upper endpoint = 2", within(ehi, 2.0, 0.0));
  endpoint_tests(b, M, paths, c.alpha, "[X, 1 + X]");

  Json stats_cc = Json::object();
  if (const auto cc = crosscheck(b, M, paths, c.alpha, "[X, 1 + X]")) {
    b.check("[X, 1 + X]: width constant", cc->width.constant);
    b.check("[X, 1 + X]: Castaing differences non-random and constant in time", cc->condition_iii);
    b.check("[X, 1 + X]: representable", cc->representable);
    stats_cc = to_json(cc->width);
  }
  const auto built = interval_process(obs.at(1), obs.at(2));
  if (const auto cc = crosscheck(b, built, paths, c.alpha, "[1,2] + int X dB")) {
    b.check("[1,2] + int X dB: representable", cc->representable && cc->condition_iii);
  }

  // 1 + int X dB against X at the observed times.
  double ss = 0.0;
  for (std::size_t p = 0; p < paths.n_paths(); ++p) {
    double worst = 0.0;
    for (std::size_t i = 0; i <= last; ++i) worst = std::max(worst, std::abs(obs.at(1).at(p, i) - X.at(p, i)));
    ss += worst * worst;
  }
  const double rms = std::sqrt(ss / static_cast<double>(paths.n_paths()));
  const ItoConsistencyReport ito = ito_self_consistency(T, 64, 3, 2000, c.seed);
  b.check("Ito discretisation error decreases over three doublings", ito.monotone);

  b.stats()["mean_X_T"] = to_json(ex);
  b.stats()["energy"] = to_json(energy);
  b.stats()["energy_target"] = energy_target;
  b.stats()["expectation_at_T"] = Json{{"lo", to_json(elo)}, {"hi", to_json(ehi)}};
  b.stats()["width_test"] = stats_cc;
  b.stats()["ito_rms_max_error_at_config_steps"] = rms;
  b.stats()["ito_self_consistency"] = Json{{"steps", ito.steps}, {"rms_max_error", ito.rms_max_error}};
  b.summary("E(M_T) ~ [" + fmt(elo.mean) + ", " + fmt(ehi.mean) + "] (stderr " + fmt(elo.std_error) + ")");
  b.summary("E int X^2 dt ~ " + fmt(energy.mean) + " vs e^T - 1 = " + fmt(energy_target));
  return b.take();
}

RunReport exp_nonrepresentable(const ExperimentConfig& c) {
  Builder b("exp-nonrepresentable", "Interval [X, 2X] spanned by the exponential martingale", c);
  const Observed obs = stream(c, [](const PathBundle& fine, auto& series, auto&) {
    SampledProcess X = geometric_martingale(fine);
    series.push_back(apply(X, [](double x) { return 2.0 * x; }));
    series.push_back(std::move(X));
  });
  const PathBundle& paths = *obs.paths;
  const double T = c.horizon;
  const auto M = interval_process(obs.at(1), obs.at(0));
  const auto [elo, ehi] = mc_interval_expectation(M, T);
  b.check("E(M_T) lower endpoint = 1", within(elo, 1.0, 0.0));
  b.check("E(M_T) upper endpoint = 2", within(ehi, 2.0, 0.0));
  endpoint_tests(b, M, paths, c.alpha, "[X, 2X]");

  const McEstimate v = mc_variance(M.width().column(paths.grid().steps()));
  const double target = std::exp(T) - 1.0;
  b.check("width variance at T = e^T - 1", within(v, target, 0.0));
  Json stats_cc = Json::object();
  if (const auto cc = crosscheck(b, M, paths, c.alpha, "[X, 2X]")) {
    b.check("[X, 2X]: width not constant", !cc->width.constant);
    b.check("[X, 2X]: Castaing differences are random", !cc->condition_iii);
    b.check("[X, 2X]: not representable", !cc->representable);
    stats_cc = to_json(cc->width);
  }
  b.stats()["expectation_at_T"] = Json{{"lo", to_json(elo)}, {"hi", to_json(ehi)}};
  b.stats()["width_variance_at_T"] = to_json(v);
  b.stats()["width_variance_target"] = target;
  b.stats()["width_test"] = stats_cc;
  b.summary("E(M_T) ~ [" + fmt(elo.mean) + ", " + fmt(ehi.mean) + "]");
  b.summary("var(b_T - a_T) ~ " + fmt(v.mean) + " +- " + fmt(v.std_error) + " vs e^T - 1 = " + fmt(target));
  b.summary(std::string("representable: no"));
  return b.take();
}

// ---------------------------------------------------------------- round trip

double dyadic(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng) / 64.0; }

PointIntegrand random_point_integrand(std::mt19937_64& rng, const BinaryTree& tree, int bound) {
  std::vector<std::vector<double>> levels;
  for (std::size_t k = 0; k < tree.depth(); ++k) {
    std::vector<double> row;
    for (std::size_t s = 0; s < BinaryTree::nodes_at(k); ++s) row.push_back(dyadic(rng, -bound, bound));
    levels.push_back(std::move(row));
  }
  return PointIntegrand(tree, std::move(levels));
}

RunReport roundtrip(const ExperimentConfig& c) {
  const std::size_t depth = c.depth.value_or(5);
  Builder b("roundtrip", "Representation round trip on binary trees", c);
  const BinaryTree tree(depth);
  std::mt19937_64 rng(c.seed);
  std::size_t violations = 0;
  std::size_t exact = 0;
  double worst = 0.0;
  for (std::size_t trial = 0; trial < c.trials; ++trial) {
    const double a = dyadic(rng, -128, 128);
    const Interval C = Interval::make(a, a + dyadic(rng, 0, 128));
    const PointIntegrand g = random_point_integrand(rng, tree, 128);
    const TreeSetProcess M = build_representation(tree, C, g);
    const bool mart = classify_tree(M).kind == Classification::Martingale;
    const TreeCrosscheck cc = theorem_main_crosscheck(tree, M);
    violations += !(mart && cc.width_constant && cc.condition_iii && cc.representable);
    worst = std::max(worst, cc.roundtrip_hausdorff);
    exact += cc.recovery && cc.roundtrip_hausdorff == 0.0 && cc.recovery->C == C && cc.recovery->g.levels() == g.levels();
  }
  std::size_t rejected = 0;
  for (std::size_t trial = 0; trial < c.trials; ++trial) {
    const double a = dyadic(rng, -128, 128);
    const double k_bound = 8.0 / 64.0;
    const Interval C = Interval::make(a, a + dyadic(rng, 0, 128) + k_bound * static_cast<double>(depth));
    const PointIntegrand g = random_point_integrand(rng, tree, 128);
    std::vector<std::vector<double>> gk = g.levels();
    for (auto& row : gk) {
      for (double& v : row) v += dyadic(rng, -8, 8);
    }
    const std::size_t level = trial % depth;
    gk[level][trial % BinaryTree::nodes_at(level)] = g.at(level, trial % BinaryTree::nodes_at(level)) + k_bound;
    const TreePointProcess lo = transform(tree, g, C.lo());
    const TreePointProcess hi = transform(tree, PointIntegrand(tree, gk), C.hi());
    std::vector<std::vector<Interval>> levels;
    for (std::size_t l = 0; l <= depth; ++l) {
      std::vector<Interval> row;
      for (std::size_t s = 0; s < BinaryTree::nodes_at(l); ++s) row.push_back(Interval::make(lo.at(l, s), hi.at(l, s)));
      levels.push_back(std::move(row));
    }
    const TreeSetProcess M(tree, std::move(levels));
    const TreeCrosscheck cc = theorem_main_crosscheck(tree, M);
    const bool both_false = !cc.width_constant && !cc.condition_iii && !cc.representable;
    violations += !both_false;
    rejected += both_false;
  }
  b.check("representable cases: build, certify, width, (iii) and exact recovery", exact == c.trials);
  b.check("perturbed cases: width and (iii) both reject", rejected == c.trials);
  b.check("zero equivalence violations", violations == 0);
  b.stats()["depth"] = depth;
  b.stats()["trials"] = c.trials;
  b.stats()["exact_recoveries"] = exact;
  b.stats()["rejected_perturbations"] = rejected;
  b.stats()["equivalence_violations"] = violations;
  b.stats()["max_roundtrip_hausdorff"] = worst;
  b.summary(std::to_string(exact) + "/" + std::to_string(c.trials) + " exact recoveries, " +
            std::to_string(rejected) + "/" + std::to_string(c.trials) + " perturbations rejected, max Hausdorff " +
            fmt(worst));
  return b.take();
}

using Runner = RunReport (*)(const ExperimentConfig&);

const std::map<std::string, Runner>& runners() {
  static const std::map<std::string, Runner> table{
      {"interval-ops", interval_ops}, {"mean0", mean0},
      {"ex1-discrete", ex1_discrete}, {"ezzaki", ezzaki},
      {"segment", segment},           {"exp-representable", exp_representable},
      {"exp-nonrepresentable", exp_nonrepresentable}, {"roundtrip", roundtrip}};
  return table;
}

std::string csv_number(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

const char* kCsvHeader = "experiment,check,s,t,test_function,statistic,stderr,threshold,verdict\n";

void csv_rows(std::ostringstream& os, const RunReport& r) {
  for (const auto& lr : r.rows) {
    os << csv_field(r.id) << ',' << csv_field(lr.check) << ',' << csv_number(lr.row.pair.s) << ','
       << csv_number(lr.row.pair.t) << ',' << lr.row.test_function << ',' << csv_number(lr.row.statistic) << ','
       << csv_number(lr.row.std_error) << ',' << csv_number(lr.row.threshold) << ','
       << (lr.row.pass ? "pass" : "fail") << '\n';
  }
  for (const auto& ch : r.checks) {
    os << csv_field(r.id) << ',' << csv_field(ch.name) << ",,,,,,," << (ch.pass ? "pass" : "fail") << '\n';
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  if (paths == 0) throw Error(ErrorKind::InvalidConfig, "paths must be positive");
  if (steps == 0) throw Error(ErrorKind::InvalidConfig, "steps must be positive");
  if (!(std::isfinite(horizon) && horizon > 0.0)) throw Error(ErrorKind::InvalidConfig, "horizon must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::InvalidConfig, "alpha must lie in (0, 1)");
  if (depth && (*depth == 0 || *depth > kMaxTreeDepth)) {
    throw Error(ErrorKind::InvalidConfig, "depth must lie in 1.." + std::to_string(kMaxTreeDepth));
  }
  if (trials == 0) throw Error(ErrorKind::InvalidConfig, "trials must be positive");
}

Json to_json(const ExperimentConfig& c) {
  Json j{{"seed", c.seed}, {"paths", c.paths}, {"steps", c.steps}, {"horizon", c.horizon}};
  j["depth"] = c.depth ? Json(*c.depth) : Json(nullptr);
  j["alpha"] = c.alpha;
  j["trials"] = c.trials;
  j["chunk_paths"] = kChunkPaths;
  return j;
}

ExperimentConfig config_from_json(const Json& j, ExperimentConfig base) {
  if (!j.is_object()) throw Error(ErrorKind::InvalidConfig, "config must be a JSON object");
  auto count = [](const Json& v, const std::string& key) {
    if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<long long>() < 0)) {
      throw Error(ErrorKind::InvalidConfig, key + " must be a non-negative integer");
    }
    return v.get<std::size_t>();
  };
  auto real = [](const Json& v, const std::string& key) {
    if (!v.is_number()) throw Error(ErrorKind::InvalidConfig, key + " must be a number");
    return v.get<double>();
  };
  for (const auto& [key, v] : j.items()) {
    if (key == "seed") {
      base.seed = count(v, key);
    } else if (key == "paths") {
      base.paths = count(v, key);
    } else if (key == "steps") {
      base.steps = count(v, key);
    } else if (key == "horizon") {
      base.horizon = real(v, key);
    } else if (key == "depth") {
      base.depth = v.is_null() ? std::nullopt : std::optional<std::size_t>(count(v, key));
    } else if (key == "alpha") {
      base.alpha = real(v, key);
    } else if (key == "trials") {
      base.trials = count(v, key);
    } else if (key != "experiment" && key != "out" && key != "output_dir") {
      throw Error(ErrorKind::InvalidConfig, "unknown config key \"" + key + "\"");
    }
  }
  base.validate();
  return base;
}

bool RunReport::pass() const {
  return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

const std::vector<std::string>& experiment_ids() {
  static const std::vector<std::string> ids{"interval-ops", "mean0",     "ex1-discrete",      "ezzaki",
                                            "segment",      "exp-representable", "exp-nonrepresentable",
                                            "roundtrip"};
  return ids;
}

RunReport run_experiment(const std::string& id, const ExperimentConfig& config) {
  const auto it = runners().find(id);
  if (it == runners().end()) throw Error(ErrorKind::UnknownExperiment, "unknown experiment \"" + id + "\"");
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  RunReport r = it->second(config);
  if (config.timing) {
    r.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  return r;
}

std::vector<RunReport> run_all(const ExperimentConfig& config) {
  std::vector<RunReport> out;
  for (const auto& id : experiment_ids()) out.push_back(run_experiment(id, config));
  return out;
}

RunReport run_discrete_segment(const ExperimentConfig& config, const std::vector<double>& f,
                               const std::vector<double>& g) {
  config.validate();
  const BinaryTree tree(config.depth.value_or(4));
  auto integrand = [&](const std::vector<double>& v, const char* name) {
    if (v.size() != 1 && v.size() != tree.depth()) {
      throw Error(ErrorKind::InvalidConfig,
                  std::string(name) + " needs one value or one value per level (" + std::to_string(tree.depth()) + ")");
    }
    std::vector<Interval> levels;
    for (std::size_t k = 0; k < tree.depth(); ++k) levels.push_back(Interval::point(v.size() == 1 ? v[0] : v[k]));
    return AdaptedIntervalProcess::per_level(tree, levels);
  };
  Builder b("segment-discrete", "Segment between two tree martingale transforms", config);
  discrete_segment_checks(b, tree, integrand(f, "f"), integrand(g, "g"));
  b.stats()["f"] = f;
  b.stats()["g"] = g;
  return b.take();
}

RunReport run_finite_check(const Json& input) {
  const FiniteProblem problem = finite_problem_from_json(input);
  Builder b("finite-check", "Classification of a set-valued process on a finite space", ExperimentConfig{});
  const ClassificationReport r = classify_process_detailed(problem.process, problem.filtration);
  b.check("process is adapted and classified", true);
  if (input.contains("expect")) {
    b.check("classification matches expectation", input.at("expect") == std::string(to_string(r.kind)));
  }
  Json expectations = Json::array();
  Json degeneracy = Json::array();
  for (const auto& F : problem.process) {
    const ConvexBody e = aumann_expectation(F);
    expectations.push_back(F.dim() == 1 ? to_json(e.as_interval()) : to_json(e));
    degeneracy.push_back(is_degenerate_by_expectation(F).degenerate);
  }
  b.stats()["classification"] = to_json(r);
  b.stats()["expectations"] = expectations;
  b.stats()["degenerate"] = degeneracy;
  b.summary("classification: " + std::string(to_string(r.kind)));
  return b.take();
}

RunReport run_represent_check(const Json& input) {
  const TreeProblem problem = tree_problem_from_json(input);
  Builder b("represent-check", "Representability of a tree interval process", ExperimentConfig{});
  try {
    const TreeCrosscheck cc = theorem_main_crosscheck(problem.tree, problem.M);
    b.check("endpoints are tree martingales", true);
    b.check("width and Castaing criteria agree", cc.width_constant == cc.condition_iii);
    if (cc.representable) b.check("recovered representation reproduces M", cc.roundtrip_hausdorff == 0.0);
    if (input.contains("expect_representable")) {
      b.check("representability matches expectation", input.at("expect_representable") == cc.representable);
    }
    b.stats()["representation"] = to_json(cc);
    b.summary(std::string("representable: ") + yes_no(cc.representable));
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NotMartingale) throw;
    b.check("endpoints are tree martingales", false);
    b.stats()["error"] = e.what();
    b.summary("not a martingale; representability undefined");
  }
  return b.take();
}

Json to_json(const RunReport& r) {
  Json checks = Json::array();
  for (const auto& c : r.checks) checks.push_back(Json{{"name", c.name}, {"verdict", c.pass ? "pass" : "fail"}});
  Json j{{"schema", kSchemaVersion},
         {"version", kVersion},
         {"experiment", r.id},
         {"title", r.title},
         {"config", to_json(r.config)},
         {"verdict", r.pass() ? "pass" : "fail"},
         {"checks", checks},
         {"statistics", r.statistics}};
  if (r.wall_clock_seconds) j["wall_clock_seconds"] = *r.wall_clock_seconds;
  return j;
}

Json to_json(const std::vector<RunReport>& reports) {
  Json all = Json::array();
  bool pass = !reports.empty();
  for (const auto& r : reports) {
    all.push_back(to_json(r));
    pass = pass && r.pass();
  }
  return Json{{"schema", kSchemaVersion}, {"version", kVersion}, {"verdict", pass ? "pass" : "fail"}, {"reports", all}};
}

std::string to_csv(const RunReport& r) {
  std::ostringstream os;
  os << kCsvHeader;
  csv_rows(os, r);
  return os.str();
}

std::string to_csv(const std::vector<RunReport>& reports) {
  std::ostringstream os;
  os << kCsvHeader;
  for (const auto& r : reports) csv_rows(os, r);
  return os.str();
}

std::string to_text(const RunReport& r) {
  std::size_t width = 5;
  for (const auto& c : r.checks) width = std::max(width, c.name.size());
  std::ostringstream os;
  os << r.id << ": " << r.title << '\n';
  for (const auto& line : r.statistics["summary"]) os << "  " << line.get<std::string>() << '\n';
  os << "  " << std::left << std::setw(static_cast<int>(width)) << "check" << "  verdict\n";
  for (const auto& c : r.checks) {
    os << "  " << std::left << std::setw(static_cast<int>(width)) << c.name << "  " << (c.pass ? "pass" : "FAIL")
       << '\n';
  }
  os << "  overall: " << (r.pass() ? "pass" : "FAIL") << '\n';
  if (r.wall_clock_seconds) os << "  wall clock: " << fmt(*r.wall_clock_seconds) << " s\n";
  return os.str();
}

std::string to_text(const std::vector<RunReport>& reports) {
  std::ostringstream os;
  bool pass = !reports.empty();
  for (const auto& r : reports) {
    os << to_text(r) << '\n';
    pass = pass && r.pass();
  }
  os << "all experiments: " << (pass ? "pass" : "FAIL") << '\n';
  return os.str();
}

}  // namespace setval
