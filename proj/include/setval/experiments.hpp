#pragma once

// Named experiments behind the CLI. Each one runs a module pipeline and
// returns a RunReport: a list of pass/fail checks plus statistics. Reports
// are deterministic in (experiment, config) unless timing is requested.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "setval/io.hpp"

namespace setval {

inline constexpr const char* kVersion = "setval 0.1.0";
inline constexpr const char* kSchemaVersion = "1";

struct ExperimentConfig {
  std::uint64_t seed = 1;
  std::size_t paths = 100000;
  std::size_t steps = 512;
  double horizon = 1.0;
  std::optional<std::size_t> depth;  // per-experiment default when unset
  double alpha = 0.01;
  std::size_t trials = 100;
  bool timing = false;

  /// Throws InvalidConfig.
  void validate() const;
};

Json to_json(const ExperimentConfig& c);
/// Overlays the keys present in j; throws InvalidConfig on unknown keys or bad values.
ExperimentConfig config_from_json(const Json& j, ExperimentConfig base = {});

struct Check {
  std::string name;
  bool pass = false;
};

struct LabelledRow {
  std::string check;
  TestRow row;
};

struct RunReport {
  std::string id;
  std::string title;
  ExperimentConfig config;
  std::vector<Check> checks;
  Json statistics = Json::object();
  std::vector<LabelledRow> rows;  // statistical test rows, for CSV
  std::optional<double> wall_clock_seconds;

  bool pass() const;
};

const std::vector<std::string>& experiment_ids();
/// Throws UnknownExperiment for ids outside experiment_ids().
RunReport run_experiment(const std::string& id, const ExperimentConfig& config);
std::vector<RunReport> run_all(const ExperimentConfig& config);

/// Interval-valued integrand on a tree: f and g must be singleton valued.
RunReport run_discrete_segment(const ExperimentConfig& config, const std::vector<double>& f,
                               const std::vector<double>& g);
/// Classification of a finite problem (see io.hpp for the input form).
RunReport run_finite_check(const Json& input);
/// Representation cross-check of a tree interval process.
RunReport run_represent_check(const Json& input);

Json to_json(const RunReport& r);
Json to_json(const std::vector<RunReport>& reports);
/// One row per statistical (pair, test function) and one per check.
std::string to_csv(const RunReport& r);
std::string to_csv(const std::vector<RunReport>& reports);
std::string to_text(const RunReport& r);
std::string to_text(const std::vector<RunReport>& reports);

}  // namespace setval
