// setval: command-line front end for the experiments.
//
// Exit codes: 0 when every check passes, 1 when a check fails, 2 for usage,
// configuration, input or I/O errors.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "setval/error.hpp"
#include "setval/experiments.hpp"

namespace {

using setval::ExperimentConfig;
using setval::RunReport;

constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct Flags {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> paths;
  std::optional<std::size_t> steps;
  std::optional<double> horizon;
  std::optional<std::size_t> depth;
  std::optional<double> alpha;
  std::optional<std::size_t> trials;
  std::string out = "json";
  std::string output_dir;
  std::string config_file;
  bool timing = false;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--seed", f.seed, "RNG seed (default: $SETVAL_SEED or 1)");
  cmd->add_option("--paths", f.paths, "Monte Carlo paths");
  cmd->add_option("--steps", f.steps, "time steps on [0, T]");
  cmd->add_option("--horizon", f.horizon, "horizon T");
  cmd->add_option("--depth", f.depth, "binary tree depth");
  cmd->add_option("--alpha", f.alpha, "family-level significance");
  cmd->add_option("--trials", f.trials, "random instances per randomized suite");
  cmd->add_option("--out", f.out, "report format")->check(CLI::IsMember({"json", "csv", "text"}));
  cmd->add_option("--output-dir", f.output_dir, "write reports here instead of stdout");
  cmd->add_option("--config", f.config_file, "JSON config file; flags override it");
  cmd->add_flag("--timing", f.timing, "add wall-clock time to reports");
}

// defaults < SETVAL_SEED < config file < flags
ExperimentConfig resolve(const Flags& f) {
  ExperimentConfig c;
  if (const char* env = std::getenv("SETVAL_SEED"); env && *env) {
    try {
      std::size_t used = 0;
      c.seed = std::stoull(env, &used);
      if (env[used] != '\0') throw std::invalid_argument(env);
    } catch (const std::exception&) {
      throw setval::Error(setval::ErrorKind::InvalidConfig, std::string("SETVAL_SEED is not an integer: ") + env);
    }
  }
  if (!f.config_file.empty()) c = setval::config_from_json(setval::read_json_file(f.config_file), c);
  if (f.seed) c.seed = *f.seed;
  if (f.paths) c.paths = *f.paths;
  if (f.steps) c.steps = *f.steps;
  if (f.horizon) c.horizon = *f.horizon;
  if (f.depth) c.depth = *f.depth;
  if (f.alpha) c.alpha = *f.alpha;
  if (f.trials) c.trials = *f.trials;
  c.timing = f.timing;
  c.validate();
  return c;
}

std::string render(const RunReport& r, const std::string& out) {
  if (out == "csv") return setval::to_csv(r);
  if (out == "text") return setval::to_text(r);
  return setval::to_json(r).dump(2) + "\n";
}

std::string render(const std::vector<RunReport>& rs, const std::string& out) {
  if (out == "csv") return setval::to_csv(rs);
  if (out == "text") return setval::to_text(rs);
  return setval::to_json(rs).dump(2) + "\n";
}

void emit(const std::string& name, const std::string& text, const Flags& f) {
  if (f.output_dir.empty()) {
    std::cout << text;
    return;
  }
  std::error_code ec;
  std::filesystem::create_directories(f.output_dir, ec);
  if (ec) throw setval::Error(setval::ErrorKind::IoError, "cannot create " + f.output_dir + ": " + ec.message());
  const std::string ext = f.out == "text" ? "txt" : f.out;
  setval::write_text_file(std::filesystem::path(f.output_dir) / (name + "." + ext), text);
}

int finish(const RunReport& r, const Flags& f) {
  emit(r.id, render(r, f.out), f);
  return r.pass() ? 0 : kExitFail;
}

int finish(const std::vector<RunReport>& rs, const Flags& f) {
  bool pass = !rs.empty();
  if (f.output_dir.empty()) {
    std::cout << render(rs, f.out);
  } else {
    for (const auto& r : rs) emit(r.id, render(r, f.out), f);
    emit("run-all", render(rs, f.out), f);
  }
  for (const auto& r : rs) pass = pass && r.pass();
  return pass ? 0 : kExitFail;
}

std::vector<double> parse_values(const std::string& text, const char* name) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw setval::Error(setval::ErrorKind::InvalidConfig, std::string("--") + name + " expects numbers: " + text);
    }
  }
  if (out.empty()) throw setval::Error(setval::ErrorKind::InvalidConfig, std::string("--") + name + " is empty");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Set-valued martingale experiments"};
  app.set_version_flag("--version", setval::kVersion);
  app.require_subcommand(1);
  Flags flags;

  std::string experiment;
  auto* run = app.add_subcommand("run", "run one experiment");
  run->add_option("--experiment", experiment, "experiment id")->required();
  add_common(run, flags);

  auto* run_all = app.add_subcommand("run-all", "run every experiment with a shared seed");
  add_common(run_all, flags);

  auto* list = app.add_subcommand("list", "list experiment ids");

  std::string input;
  auto* finite = app.add_subcommand("finite", "finite-space checks");
  finite->require_subcommand(1);
  auto* finite_check = finite->add_subcommand("check", "classify a set-valued process from JSON");
  finite_check->add_option("--input", input, "problem JSON")->required()->check(CLI::ExistingFile);
  add_common(finite_check, flags);

  auto* discrete = app.add_subcommand("discrete", "exact binary-tree certifications");
  discrete->require_subcommand(1);
  auto* ex1 = discrete->add_subcommand("ex1", "transform of G = [0,1]");
  add_common(ex1, flags);
  auto* ez = discrete->add_subcommand("ezzaki", "segment [f, 2f] of a random walk");
  add_common(ez, flags);
  std::string f_text = "1";
  std::string g_text = "2";
  auto* seg = discrete->add_subcommand("segment", "segment between two transforms");
  seg->add_option("--f", f_text, "integrand f: one value or one per level, comma separated");
  seg->add_option("--g", g_text, "integrand g: one value or one per level, comma separated");
  add_common(seg, flags);

  std::string example;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo examples");
  simulate->add_option("--example", example, "example id")
      ->required()
      ->check(CLI::IsMember({"exp-representable", "exp-nonrepresentable", "segment"}));
  add_common(simulate, flags);

  auto* represent = app.add_subcommand("represent", "representation checks");
  represent->require_subcommand(1);
  auto* rep_check = represent->add_subcommand("check", "cross-check a tree interval process from JSON");
  rep_check->add_option("--input", input, "tree process JSON")->required()->check(CLI::ExistingFile);
  add_common(rep_check, flags);
  auto* rep_round = represent->add_subcommand("roundtrip", "random build/recover round trips");
  add_common(rep_round, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (list->parsed()) {
      for (const auto& id : setval::experiment_ids()) std::cout << id << '\n';
      return 0;
    }
    const ExperimentConfig config = resolve(flags);
    if (run->parsed()) return finish(setval::run_experiment(experiment, config), flags);
    if (run_all->parsed()) return finish(setval::run_all(config), flags);
    if (finite_check->parsed()) return finish(setval::run_finite_check(setval::read_json_file(input)), flags);
    if (ex1->parsed()) return finish(setval::run_experiment("ex1-discrete", config), flags);
    if (ez->parsed()) return finish(setval::run_experiment("ezzaki", config), flags);
    if (seg->parsed()) {
      return finish(setval::run_discrete_segment(config, parse_values(f_text, "f"), parse_values(g_text, "g")),
                    flags);
    }
    if (simulate->parsed()) return finish(setval::run_experiment(example, config), flags);
    if (rep_check->parsed()) return finish(setval::run_represent_check(setval::read_json_file(input)), flags);
    if (rep_round->parsed()) return finish(setval::run_experiment("roundtrip", config), flags);
  } catch (const setval::Error& e) {
    std::cerr << "setval: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
