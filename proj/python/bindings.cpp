#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "setval/error.hpp"
#include "setval/experiments.hpp"

namespace py = pybind11;
using namespace setval;

namespace {

std::string repr(const Interval& v) {
  std::ostringstream os;
  os << "Interval(" << v.lo() << ", " << v.hi() << ")";
  return os.str();
}

SetRV interval_rv(const std::vector<double>& probs, const std::vector<Interval>& values) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < probs.size(); ++i) ids.push_back("w" + std::to_string(i));
  return SetRV(make_space(FiniteProbSpace(ids, probs)), values);
}

py::array_t<double> to_array(std::size_t rows, std::size_t cols, const std::vector<double>& values) {
  py::array_t<double> out({rows, cols});
  std::copy(values.begin(), values.end(), out.mutable_data());
  return out;
}

std::vector<double> from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& a,
                               std::size_t& rows, std::size_t& cols) {
  if (a.ndim() != 2) throw Error(ErrorKind::LengthMismatch, "expected a 2-d array (paths x times)");
  rows = static_cast<std::size_t>(a.shape(0));
  cols = static_cast<std::size_t>(a.shape(1));
  return std::vector<double>(a.data(), a.data() + a.size());
}

PathBundle bundle_from(const py::array_t<double, py::array::c_style | py::array::forcecast>& b, double horizon,
                       std::uint64_t seed) {
  std::size_t rows = 0;
  std::size_t cols = 0;
  auto values = from_array(b, rows, cols);
  if (cols < 2) throw Error(ErrorKind::InvalidConfig, "paths need at least two times");
  return PathBundle(TimeGrid(horizon, cols - 1), rows, seed, std::move(values));
}

ExperimentConfig config_from_kwargs(const py::kwargs& kwargs) {
  Json j = Json::object();
  for (const auto& [key, value] : kwargs) {
    const std::string k = py::str(key);
    if (py::isinstance<py::bool_>(value)) {
      j[k] = value.cast<bool>();
    } else if (py::isinstance<py::int_>(value)) {
      j[k] = value.cast<long long>();
    } else if (value.is_none()) {
      j[k] = nullptr;
    } else {
      j[k] = value.cast<double>();
    }
  }
  return config_from_json(j);
}

}  // namespace

PYBIND11_MODULE(_setval, m) {
  m.doc() = "Set-valued martingales: interval arithmetic, Aumann expectation, tree transforms, Monte Carlo tests";

  py::register_exception<Error>(m, "SetvalError");

  py::class_<Interval>(m, "Interval")
      .def(py::init(&Interval::make), py::arg("lo"), py::arg("hi"))
      .def_static("point", &Interval::point)
      .def_property_readonly("lo", &Interval::lo)
      .def_property_readonly("hi", &Interval::hi)
      .def_property_readonly("width", &Interval::width)
      .def("is_degenerate", &Interval::is_degenerate)
      .def(py::self == py::self)
      .def("__add__", [](const Interval& a, const Interval& b) { return minkowski_add(a, b); })
      .def("__rmul__", [](const Interval& a, double lambda) { return scalar_mul(lambda, a); })
      .def("__repr__", &repr);

  m.def("minkowski_add", py::overload_cast<const Interval&, const Interval&>(&minkowski_add));
  m.def("scalar_mul", py::overload_cast<double, const Interval&>(&scalar_mul));
  m.def("hausdorff_distance", py::overload_cast<const Interval&, const Interval&>(&hausdorff_distance));
  m.def("hukuhara_diff", &hukuhara_diff);
  m.def("contains", py::overload_cast<const Interval&, const Interval&, double>(&contains), py::arg("outer"),
        py::arg("inner"), py::arg("tol") = kExactTol);

  py::class_<ConvexBody>(m, "ConvexBody")
      .def(py::init<std::size_t, std::vector<Point>>(), py::arg("dim"), py::arg("points"))
      .def(py::init<Interval>())
      .def_property_readonly("dim", &ConvexBody::dim)
      .def("generators", &ConvexBody::generators)
      .def("support", [](const ConvexBody& c, const Point& d) { return c.support(d); })
      .def("is_singleton", [](const ConvexBody& c) { return c.is_singleton(); })
      .def("__add__", [](const ConvexBody& a, const ConvexBody& b) { return minkowski_add(a, b); })
      .def("__rmul__", [](const ConvexBody& a, double lambda) { return scalar_mul(lambda, a); });
  m.def("body_hausdorff_distance", py::overload_cast<const ConvexBody&, const ConvexBody&>(&hausdorff_distance));

  m.def(
      "aumann_expectation",
      [](const std::vector<double>& probs, const std::vector<Interval>& values) {
        return aumann_expectation(interval_rv(probs, values)).as_interval();
      },
      py::arg("probs"), py::arg("values"));
  m.def(
      "is_degenerate_by_expectation",
      [](const std::vector<double>& probs, const std::vector<Interval>& values) {
        return is_degenerate_by_expectation(interval_rv(probs, values)).degenerate;
      },
      py::arg("probs"), py::arg("values"));
  m.def("castaing_weight", &castaing_weight);

  m.def(
      "tree_transform",
      [](std::size_t depth, const Interval& g) {
        const BinaryTree tree(depth);
        return transform(tree, AdaptedIntervalProcess::constant(tree, g)).levels();
      },
      py::arg("depth"), py::arg("g"), "Transform of a constant integrand G = g; levels of node intervals.");
  m.def(
      "tree_classification",
      [](std::size_t depth, const Interval& g) {
        const BinaryTree tree(depth);
        return std::string(to_string(classify_tree(transform(tree, AdaptedIntervalProcess::constant(tree, g))).kind));
      },
      py::arg("depth"), py::arg("g"));

  m.def(
      "gen_brownian",
      [](double horizon, std::size_t steps, std::size_t n_paths, std::uint64_t seed) {
        const PathBundle b = gen_brownian(TimeGrid(horizon, steps), n_paths, seed);
        return to_array(b.n_paths(), steps + 1, b.values());
      },
      py::arg("horizon"), py::arg("steps"), py::arg("n_paths"), py::arg("seed"));
  m.def(
      "geometric_martingale",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& b, double horizon) {
        const PathBundle paths = bundle_from(b, horizon, 0);
        return to_array(paths.n_paths(), paths.grid().steps() + 1, geometric_martingale(paths).values());
      },
      py::arg("paths"), py::arg("horizon"));
  m.def(
      "ito_integral",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& g,
         const py::array_t<double, py::array::c_style | py::array::forcecast>& b, double horizon) {
        const PathBundle paths = bundle_from(b, horizon, 0);
        std::size_t rows = 0;
        std::size_t cols = 0;
        auto values = from_array(g, rows, cols);
        const SampledProcess integrand(TimeGrid(horizon, cols - 1), rows, std::move(values));
        return to_array(paths.n_paths(), paths.grid().steps() + 1, ito_integral(integrand, paths).values());
      },
      py::arg("integrand"), py::arg("paths"), py::arg("horizon"));
  m.def(
      "martingale_test_json",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& x,
         const py::array_t<double, py::array::c_style | py::array::forcecast>& b, double horizon, double alpha) {
        const PathBundle paths = bundle_from(b, horizon, 0);
        std::size_t rows = 0;
        std::size_t cols = 0;
        auto values = from_array(x, rows, cols);
        const SampledProcess process(TimeGrid(horizon, cols - 1), rows, std::move(values));
        return to_json(martingale_test(process, default_pairs(paths.grid()), paths, alpha)).dump();
      },
      py::arg("x"), py::arg("paths"), py::arg("horizon"), py::arg("alpha") = 0.01);

  m.def("experiment_ids", &experiment_ids);
  m.def(
      "run_experiment_json",
      [](const std::string& id, const py::kwargs& kwargs) {
        return to_json(run_experiment(id, config_from_kwargs(kwargs))).dump();
      },
      py::arg("id"));
  m.def("finite_check_json", [](const std::string& input) { return to_json(run_finite_check(Json::parse(input))).dump(); });
  m.def("represent_check_json",
        [](const std::string& input) { return to_json(run_represent_check(Json::parse(input))).dump(); });
  m.attr("__version__") = kVersion;
}
