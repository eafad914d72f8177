#include "setval/io.hpp"

#include <fstream>

#include "setval/error.hpp"

namespace setval {

namespace {

[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorKind::InvalidArgument, "malformed JSON: " + what); }

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) malformed(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

double number(const Json& j, const char* what) {
  if (!j.is_number()) malformed(std::string(what) + " must be a number");
  return j.get<double>();
}

Json row_json(const TestRow& r) {
  return Json{{"s", r.pair.s},           {"t", r.pair.t},           {"test_function", r.test_function},
              {"statistic", r.statistic}, {"stderr", r.std_error},    {"threshold", r.threshold},
              {"verdict", r.pass ? "pass" : "fail"}};
}

}  // namespace

Json to_json(const Interval& v) { return Json{{"lo", v.lo()}, {"hi", v.hi()}}; }

Json to_json(const ConvexBody& v) {
  Json points = Json::array();
  for (const auto& p : v.generators()) points.push_back(p);
  return Json{{"dim", v.dim()}, {"points", points}};
}

Interval interval_from_json(const Json& j) {
  return Interval::make(number(field(j, "lo"), "lo"), number(field(j, "hi"), "hi"));
}

ConvexBody body_from_json(const Json& j) {
  if (j.is_object() && j.contains("lo")) return ConvexBody(interval_from_json(j));
  const Json& dim = field(j, "dim");
  const Json& pts = field(j, "points");
  if (!dim.is_number_unsigned() || !pts.is_array()) malformed("body needs an unsigned dim and a point array");
  std::vector<Point> points;
  for (const auto& p : pts) {
    if (!p.is_array()) malformed("points must be arrays");
    Point q;
    for (const auto& x : p) q.push_back(number(x, "coordinate"));
    points.push_back(std::move(q));
  }
  return ConvexBody(dim.get<std::size_t>(), std::move(points));
}

FiniteProblem finite_problem_from_json(const Json& j) {
  const Json& space = field(j, "space");
  std::vector<std::string> ids;
  std::vector<double> probs;
  for (const auto& id : field(space, "atoms")) {
    if (!id.is_string()) malformed("atom ids must be strings");
    ids.push_back(id.get<std::string>());
  }
  for (const auto& p : field(space, "probabilities")) probs.push_back(number(p, "probability"));
  SpacePtr sp = make_space(FiniteProbSpace(ids, probs));

  std::vector<Partition> levels;
  for (const auto& partition : field(j, "filtration")) {
    std::vector<std::vector<std::size_t>> cells;
    for (const auto& cell : partition) {
      std::vector<std::size_t> atoms;
      for (const auto& id : cell) {
        if (!id.is_string()) malformed("cells list atom ids");
        atoms.push_back(sp->index_of(id.get<std::string>()));
      }
      cells.push_back(std::move(atoms));
    }
    levels.emplace_back(sp->size(), std::move(cells));
  }

  std::vector<SetRV> process;
  for (const auto& step : field(j, "process")) {
    if (!step.is_object()) malformed("each process step maps atom ids to bodies");
    std::vector<std::optional<ConvexBody>> values(sp->size());
    for (const auto& [id, body] : step.items()) values.at(sp->index_of(id)) = body_from_json(body);
    std::vector<ConvexBody> dense;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!values[i]) malformed("process step has no value for atom " + sp->id(i));
      dense.push_back(*values[i]);
    }
    process.emplace_back(sp, std::move(dense));
  }
  return FiniteProblem{sp, Filtration(std::move(levels)), std::move(process)};
}

Json to_json(const FiniteProblem& problem) {
  const auto& sp = *problem.space;
  Json atoms = Json::array();
  Json probs = Json::array();
  for (std::size_t i = 0; i < sp.size(); ++i) {
    atoms.push_back(sp.id(i));
    probs.push_back(sp.prob(i));
  }
  Json filtration = Json::array();
  for (const auto& partition : problem.filtration.levels()) {
    Json cells = Json::array();
    for (const auto& cell : partition.cells()) {
      Json c = Json::array();
      for (std::size_t a : cell) c.push_back(sp.id(a));
      cells.push_back(c);
    }
    filtration.push_back(cells);
  }
  Json process = Json::array();
  for (const auto& F : problem.process) {
    Json step = Json::object();
    for (std::size_t i = 0; i < sp.size(); ++i) {
      step[sp.id(i)] = F.dim() == 1 ? to_json(F.at(i).as_interval()) : to_json(F.at(i));
    }
    process.push_back(step);
  }
  return Json{{"space", {{"atoms", atoms}, {"probabilities", probs}}},
              {"filtration", filtration},
              {"process", process}};
}

TreeProblem tree_problem_from_json(const Json& j) {
  const Json& depth = field(j, "depth");
  if (!depth.is_number_unsigned()) malformed("depth must be an unsigned integer");
  BinaryTree tree(depth.get<std::size_t>());
  std::vector<std::vector<Interval>> levels;
  for (const auto& row : field(j, "levels")) {
    std::vector<Interval> values;
    for (const auto& v : row) values.push_back(interval_from_json(v));
    levels.push_back(std::move(values));
  }
  TreeSetProcess M(tree, std::move(levels));
  return TreeProblem{std::move(tree), std::move(M)};
}

Json to_json(const TreeSetProcess& M) {
  Json levels = Json::array();
  for (const auto& row : M.levels()) {
    Json r = Json::array();
    for (const auto& v : row) r.push_back(to_json(v));
    levels.push_back(r);
  }
  return Json{{"depth", M.depth()}, {"levels", levels}};
}

Json to_json(const McEstimate& e) { return Json{{"mean", e.mean}, {"stderr", e.std_error}, {"n", e.n}}; }

Json to_json(const TestReport& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows) rows.push_back(row_json(row));
  return Json{{"test", r.test},
              {"alpha", r.alpha},
              {"n_tests", r.n_tests},
              {"critical_value", r.critical_value},
              {"verdict", r.verdict ? "pass" : "fail"},
              {"seed", r.seed},
              {"n_paths", r.n_paths},
              {"chunk_paths", r.chunk_paths},
              {"rows", rows}};
}

Json to_json(const ClassificationReport& r) {
  Json steps = Json::array();
  for (const auto& s : r.steps) {
    steps.push_back(Json{{"step", s.step},
                         {"expectation_contains_current", s.expectation_contains_current},
                         {"current_contains_expectation", s.current_contains_expectation},
                         {"hausdorff_gap", s.hausdorff_gap}});
  }
  return Json{{"classification", std::string(to_string(r.kind))}, {"steps", steps}};
}

Json to_json(const TreeWidthReport& r) {
  Json j{{"constant", r.constant},
         {"constant_per_time", r.constant_per_time},
         {"constant_across_time", r.constant_across_time},
         {"width_variance", r.width_variance},
         {"mean_width", r.mean_width}};
  if (r.witness) {
    j["witness"] = Json{{"level", r.witness->level},
                        {"node_a", r.witness->node_a},
                        {"node_b", r.witness->node_b},
                        {"width_a", r.witness->width_a},
                        {"width_b", r.witness->width_b}};
  }
  return j;
}

Json to_json(const TreeCrosscheck& r) {
  Json expectations = Json::array();
  for (const auto& e : r.expectations) expectations.push_back(to_json(e));
  Json j{{"representable", r.representable},
         {"width_constant", r.width_constant},
         {"condition_iii", r.condition_iii},
         {"expectations", expectations},
         {"expectation_invariant", r.expectation_invariant}};
  if (r.recovery) {
    j["constant_set"] = to_json(r.recovery->C);
    j["integrand"] = r.recovery->g.levels();
    j["roundtrip_hausdorff"] = r.roundtrip_hausdorff;
  }
  return j;
}

Json to_json(const SampledWidthReport& r) {
  Json per_time = Json::array();
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    per_time.push_back(Json{{"t", r.times[i]},
                            {"width_variance", to_json(r.width_variance[i])},
                            {"mean_width", to_json(r.mean_width[i])}});
  }
  return Json{{"constant", r.constant},
              {"constant_per_time", r.constant_per_time},
              {"constant_across_time", r.constant_across_time},
              {"tolerance", r.tolerance},
              {"drift_critical_value", r.drift_critical_value},
              {"per_time", per_time},
              {"alternative", {{"variance", r.alternative_variance},
                               {"stderr", r.alternative_std_error},
                               {"power", r.power}}},
              {"lower_endpoint_test", to_json(r.lower_test)},
              {"upper_endpoint_test", to_json(r.upper_test)}};
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::IoError, "cannot parse " + path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

}  // namespace setval
