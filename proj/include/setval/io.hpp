#pragma once

// JSON forms of the library types.
//
//   Interval    {"lo": a, "hi": b}
//   ConvexBody  {"dim": r, "points": [[...], ...]}   (an Interval form is also accepted)
//   finite problem
//     {"space": {"atoms": ["w0", ...], "probabilities": [...]},
//      "filtration": [[["w0", "w1"], ["w2"]], ...],   // cells by atom id, one partition per time
//      "process": [{"w0": <body>, ...}, ...]}           // one map per time
//   tree interval process
//     {"depth": N, "levels": [[<interval>, ...], ...]}  // level k has 2^k nodes

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "setval/finite_space.hpp"
#include "setval/representation.hpp"
#include "setval/sim.hpp"
#include "setval/tree.hpp"

namespace setval {

using Json = nlohmann::ordered_json;

Json to_json(const Interval& v);
Json to_json(const ConvexBody& v);
/// Throws InvalidArgument on malformed input.
Interval interval_from_json(const Json& j);
ConvexBody body_from_json(const Json& j);

struct FiniteProblem {
  SpacePtr space;
  Filtration filtration;
  std::vector<SetRV> process;
};

FiniteProblem finite_problem_from_json(const Json& j);
Json to_json(const FiniteProblem& problem);

struct TreeProblem {
  BinaryTree tree;
  TreeSetProcess M;
};

TreeProblem tree_problem_from_json(const Json& j);
Json to_json(const TreeSetProcess& M);

Json to_json(const McEstimate& e);
Json to_json(const TestReport& r);
Json to_json(const ClassificationReport& r);
Json to_json(const TreeWidthReport& r);
Json to_json(const TreeCrosscheck& r);
Json to_json(const SampledWidthReport& r);

/// Throws IoError when the file cannot be read or parsed.
Json read_json_file(const std::filesystem::path& path);
/// Throws IoError when the file cannot be written.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace setval
