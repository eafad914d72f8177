// Acceptance suite: one [PASS]/[FAIL] line per criterion, nonzero exit if any fails.
// Pass --quick to skip the 20-seed calibration (the rest still runs at full scale).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "setval/error.hpp"
#include "setval/experiments.hpp"

using namespace setval;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

int failures = 0;

void criterion(int id, const char* name, double budget_seconds, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out.pass = false;
    out.detail = std::string("threw: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (budget_seconds > 0 && secs >= budget_seconds) {
    out.require(false, "runtime " + std::to_string(secs) + " s over budget " + std::to_string(budget_seconds) + " s");
  }
  if (!out.pass) ++failures;
  std::printf("[%s] AC%-2d %s (%.2f s)%s%s\n", out.pass ? "PASS" : "FAIL", id, name, secs,
              out.detail.empty() ? "" : ": ", out.detail.c_str());
  std::fflush(stdout);
}

bool check_named(const RunReport& r, const std::string& name) {
  for (const auto& c : r.checks) {
    if (c.name == name) return c.pass;
  }
  return false;
}

bool within(const Json& est, double target, double floor) {
  const double mean = est["mean"].get<double>();
  const double se = est["stderr"].get<double>();
  return std::abs(mean - target) <= std::max(4.0 * se, floor);
}

// Martingale property of a tree process checked node by node, without the library classifier.
bool endpoint_martingale(const TreePointProcess& x) {
  for (std::size_t k = 0; k < x.depth(); ++k) {
    for (std::size_t s = 0; s < BinaryTree::nodes_at(k); ++s) {
      const double mean = 0.5 * (x.at(k + 1, BinaryTree::child(s, true)) + x.at(k + 1, BinaryTree::child(s, false)));
      if (mean != x.at(k, s)) return false;
    }
  }
  return true;
}

// E|S_n| for a simple random walk, from the binomial law.
double walk_abs_mean(std::size_t n) {
  double total = 0.0;
  for (std::size_t up = 0; up <= n; ++up) {
    const double logp = std::lgamma(n + 1.0) - std::lgamma(up + 1.0) - std::lgamma(n - up + 1.0) - n * std::log(2.0);
    total += std::exp(logp) * std::abs(2.0 * static_cast<double>(up) - static_cast<double>(n));
  }
  return total;
}

}  // namespace

int main(int argc, char** argv) {
  const bool quick = argc > 1 && std::strcmp(argv[1], "--quick") == 0;
  ExperimentConfig defaults;

  criterion(1, "interval non-linearity", 1.0, [] {
    Outcome o;
    const Interval A = mk_interval(0, 1);
    const Interval lhs = scalar_mul(1.0 + -1.0, A);
    const Interval rhs = minkowski_add(scalar_mul(1.0, A), scalar_mul(-1.0, A));
    o.require(lhs.lo() == 0 && lhs.hi() == 0, "(l+e)A != {0}");
    o.require(rhs.lo() == -1 && rhs.hi() == 1, "lA+eA != [-1,1]");
    o.require(contains(rhs, lhs, 0.0) && !(lhs == rhs), "inclusion not strict");
    return o;
  });

  criterion(2, "degenerate iff singleton-valued, with witnesses", 5.0, [&] {
    Outcome o;
    ExperimentConfig c = defaults;
    c.trials = 100;
    const RunReport r = run_experiment("mean0", c);
    const Json& s = r.statistics;
    o.require(s["cases"] == 200, "expected 200 cases");
    o.require(s["agreements"] == 200, "disagreements");
    o.require(s["witnesses"].get<int>() == 200 - s["degenerate_cases"].get<int>(), "missing witnesses");
    o.require(r.pass(), "report failed");
    return o;
  });

  criterion(3, "endpoint characterization on 100 random trees", 0.0, [] {
    Outcome o;
    std::mt19937_64 rng(20240603);
    std::uniform_int_distribution<int> depth_d(1, 4);
    std::uniform_int_distribution<int> step_d(-8, 8);
    std::uniform_int_distribution<int> coin(0, 3);
    int disagreements = 0;
    int martingales = 0;
    for (int trial = 0; trial < 100; ++trial) {
      const BinaryTree tree(static_cast<std::size_t>(depth_d(rng)));
      std::vector<std::vector<double>> ga(tree.depth());
      std::vector<std::vector<double>> gw(tree.depth());
      for (std::size_t k = 0; k < tree.depth(); ++k) {
        for (std::size_t s = 0; s < BinaryTree::nodes_at(k); ++s) {
          ga[k].push_back(step_d(rng) / 64.0);
          gw[k].push_back(std::abs(step_d(rng)) / 256.0);  // steps <= 1/32 keep the width >= 3/8
        }
      }
      std::vector<std::vector<double>> a = transform(tree, PointIntegrand(tree, ga), step_d(rng) / 64.0).levels();
      std::vector<std::vector<double>> w = transform(tree, PointIntegrand(tree, gw), 0.5).levels();
      // Break the martingale property at a random node in 3 of 4 cases.
      const int mode = coin(rng);
      if (mode != 0) {
        const std::size_t k = 1 + rng() % tree.depth();
        const std::size_t s = rng() % BinaryTree::nodes_at(k);
        const double bump = (1 + rng() % 4) / 64.0;
        if (mode != 2) a[k][s] -= bump;
        if (mode != 1) w[k][s] += 2 * bump;  // mode 1 moves both endpoints together, so b breaks too
      }
      std::vector<std::vector<double>> b = a;
      for (std::size_t k = 0; k < b.size(); ++k) {
        for (std::size_t s = 0; s < b[k].size(); ++s) b[k][s] += w[k][s];
      }
      const TreePointProcess lo(tree, a);
      const TreePointProcess hi(tree, b);
      const std::vector<SetRV> M = interval_process(lo.rvs(tree), hi.rvs(tree));
      const bool classified = classify_process(M, tree.filtration()) == Classification::Martingale;
      const bool oracle = endpoint_martingale(lo) && endpoint_martingale(hi);
      if (classified != oracle) ++disagreements;
      if (oracle) ++martingales;
    }
    o.require(disagreements == 0, std::to_string(disagreements) + " disagreements");
    o.require(martingales > 0 && martingales < 100, "generator produced only one class");
    return o;
  });

  criterion(4, "transform of G = [0,1] at depth 4", 1.0, [] {
    Outcome o;
    const BinaryTree tree(4);
    const Ex1Report r = verify_ex1(tree, AdaptedIntervalProcess::constant(tree, mk_interval(0, 1)));
    o.require(r.expectations.at(0) == mk_interval(0, 0), "E(I_0) != {0}");
    o.require(r.expectations.at(1) == mk_interval(-0.5, 0.5), "E(I_1) != [-1/2, 1/2]");
    o.require(r.classification.kind == Classification::Submartingale, "not classified submartingale");
    o.require(r.inclusion_everywhere, "inclusion fails at some cell");
    o.require(r.certified, "not certified");
    return o;
  });

  criterion(5, "segment of a random walk: members martingales, segment not", 1.0, [] {
    Outcome o;
    for (std::size_t depth = 1; depth <= 8; ++depth) {
      const EzzakiReport r = ezzaki_counterexample(depth);
      const std::string at = " at depth " + std::to_string(depth);
      o.require(r.members_are_martingales, "Castaing member not a martingale" + at);
      o.require(r.classification.kind != Classification::Martingale, "segment certified martingale" + at);
      o.require(r.bound_holds, "norm bound fails" + at);
      for (std::size_t n = 0; n <= depth; ++n) {
        o.require(std::abs(r.abs_integrals.at(n) - walk_abs_mean(n)) <= 1e-12, "E|f_n| mismatch" + at);
        o.require(r.norm_integrals.at(n) <= 2 * r.abs_integrals.at(n) && std::isfinite(r.norm_integrals.at(n)),
                  "int ||M_n|| exceeds 2 int |f_n|" + at);
      }
    }
    return o;
  });

  criterion(6, "exponential martingale [X, 1+X] at 1e5 paths", 60.0, [&] {
    Outcome o;
    const RunReport r = run_experiment("exp-representable", defaults);
    const Json& s = r.statistics;
    const double e1 = std::exp(defaults.horizon) - 1.0;
    o.require(within(s["mean_X_T"], 1.0, 0.01), "E(X_1)");
    o.require(within(s["energy"], e1, 0.02 * e1), "energy");
    o.require(within(s["expectation_at_T"]["lo"], 1.0, 0.0), "E(M_1) lower");
    o.require(within(s["expectation_at_T"]["hi"], 2.0, 0.0), "E(M_1) upper");
    o.require(check_named(r, "[X, 1 + X]: lower endpoint consistent with martingale"), "lower martingale test");
    o.require(check_named(r, "[X, 1 + X]: upper endpoint consistent with martingale"), "upper martingale test");
    return o;
  });

  criterion(7, "[X, 2X] is not representable", 60.0, [&] {
    Outcome o;
    const RunReport r = run_experiment("exp-nonrepresentable", defaults);
    const double e1 = std::exp(defaults.horizon) - 1.0;
    o.require(within(r.statistics["width_variance_at_T"], e1, 0.0), "width variance at T");
    o.require(check_named(r, "[X, 2X]: width not constant"), "width test did not reject");
    o.require(check_named(r, "[X, 2X]: not representable"), "representation verdict not false");
    return o;
  });

  criterion(8, "segment between transforms of f = 1 and g = 2", 0.0, [&] {
    Outcome o;
    const BinaryTree tree(4);
    const SegmentReport d = segment_process_discrete(tree, AdaptedIntervalProcess::constant(tree, mk_interval(1, 1)),
                                                     AdaptedIntervalProcess::constant(tree, mk_interval(2, 2)));
    o.require(d.classification.kind == Classification::Submartingale, "discrete segment not submartingale");
    const RunReport r = run_experiment("segment", defaults);
    o.require(check_named(r, "Monte Carlo: min consistent with supermartingale"), "min supermartingale");
    o.require(check_named(r, "Monte Carlo: max consistent with submartingale"), "max submartingale");
    return o;
  });

  criterion(9, "build/recover round trip on depth-5 trees", 0.0, [&] {
    Outcome o;
    ExperimentConfig c = defaults;
    c.depth = 5;
    c.trials = 100;
    const RunReport r = run_experiment("roundtrip", c);
    const Json& s = r.statistics;
    o.require(s["exact_recoveries"] == 100, "recoveries");
    o.require(s["rejected_perturbations"] == 100, "perturbations");
    o.require(s["equivalence_violations"] == 0, "equivalence violations");
    o.require(s["max_roundtrip_hausdorff"].get<double>() == 0.0, "nonzero Hausdorff error");
    return o;
  });

  criterion(10, "reproducibility and 20-seed calibration", 0.0, [&] {
    Outcome o;
    const std::string first = to_json(run_all(defaults)).dump();
    const std::string second = to_json(run_all(defaults)).dump();
    o.require(first == second, "run_all reports differ");
    if (quick) return o;
    int passing = 0;
    std::string failed;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      ExperimentConfig c = defaults;
      c.seed = seed;
      bool all = true;
      for (const char* id : {"exp-representable", "exp-nonrepresentable", "segment"}) all = run_experiment(id, c).pass() && all;
      if (all) {
        ++passing;
      } else {
        failed += " " + std::to_string(seed);
      }
    }
    std::printf("       calibration: %d/20 seeds pass every statistical suite;%s%s\n", passing,
                failed.empty() ? " none failed" : " failed seeds:", failed.c_str());
    o.require(passing >= 19, std::to_string(passing) + "/20 seeds");
    return o;
  });

  std::printf("acceptance: %s\n", failures == 0 ? "all criteria pass" : "FAILURES");
  return failures == 0 ? 0 : 1;
}
