#include "setval/finite_space.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

namespace setval {

namespace {

constexpr double kProbSumTol = 1e-12;

void require_same_space(const SpacePtr& a, const SpacePtr& b) {
  if (a.get() != b.get() && a->size() != b->size()) {
    throw Error(ErrorKind::InvalidArgument, "random variables live on different spaces");
  }
}

double cell_prob(const FiniteProbSpace& space, const std::vector<std::size_t>& cell) {
  double p = 0.0;
  for (std::size_t w : cell) p += space.prob(w);
  return p;
}

ConvexBody cell_average(const SetRV& F, const std::vector<std::size_t>& cell) {
  const FiniteProbSpace& space = *F.space();
  const double pa = cell_prob(space, cell);
  if (F.dim() == 1) {
    double lo = 0.0;
    double hi = 0.0;
    for (std::size_t w : cell) {
      const Interval v = F.at(w).as_interval();
      lo += space.prob(w) * v.lo();
      hi += space.prob(w) * v.hi();
    }
    return ConvexBody(Interval::make(lo / pa, hi / pa));
  }
  ConvexBody acc = scalar_mul(space.prob(cell.front()) / pa, F.at(cell.front()));
  for (std::size_t i = 1; i < cell.size(); ++i) {
    acc = acc + scalar_mul(space.prob(cell[i]) / pa, F.at(cell[i]));
  }
  return acc;
}

Point point_cell_average(const PointRV& f, const std::vector<std::size_t>& cell) {
  const FiniteProbSpace& space = *f.space();
  const double pa = cell_prob(space, cell);
  Point acc(f.dim(), 0.0);
  for (std::size_t w : cell) {
    auto v = f.at(w);
    for (std::size_t k = 0; k < f.dim(); ++k) acc[k] += space.prob(w) * v[k];
  }
  for (double& x : acc) x /= pa;
  return acc;
}

void require_adapted(std::span<const SetRV> process, const Filtration& filtration) {
  if (process.size() != filtration.size()) {
    throw Error(ErrorKind::LengthMismatch, "process has " + std::to_string(process.size()) +
                                               " terms, filtration " +
                                               std::to_string(filtration.size()));
  }
  for (std::size_t k = 0; k < process.size(); ++k) {
    if (!is_measurable(process[k], filtration[k])) {
      throw Error(ErrorKind::NotAdapted, "term " + std::to_string(k) + " is not measurable");
    }
  }
}

void require_adapted(std::span<const PointRV> process, const Filtration& filtration) {
  if (process.size() != filtration.size()) {
    throw Error(ErrorKind::LengthMismatch, "process has " + std::to_string(process.size()) +
                                               " terms, filtration " +
                                               std::to_string(filtration.size()));
  }
  for (std::size_t k = 0; k < process.size(); ++k) {
    if (!is_measurable(process[k], filtration[k])) {
      throw Error(ErrorKind::NotAdapted, "term " + std::to_string(k) + " is not measurable");
    }
  }
}

PointRV with_value(const PointRV& f, std::size_t atom, std::span<const double> x) {
  std::vector<double> flat(f.flat().begin(), f.flat().end());
  std::copy(x.begin(), x.end(), flat.begin() + static_cast<std::ptrdiff_t>(atom * f.dim()));
  return PointRV(f.space(), f.dim(), std::move(flat));
}

}  // namespace

// ---------------------------------------------------------------------------

FiniteProbSpace::FiniteProbSpace(std::vector<std::string> ids, std::vector<double> probs)
    : ids_(std::move(ids)), probs_(std::move(probs)) {
  if (ids_.empty()) throw Error(ErrorKind::InvalidArgument, "space needs at least one atom");
  if (ids_.size() != probs_.size()) {
    throw Error(ErrorKind::LengthMismatch, "ids and probabilities differ in length");
  }
  std::unordered_set<std::string> seen;
  for (const auto& id : ids_) {
    if (!seen.insert(id).second) throw Error(ErrorKind::InvalidArgument, "duplicate atom id " + id);
  }
  double total = 0.0;
  for (double p : probs_) {
    if (!(p > 0.0) || !std::isfinite(p)) {
      throw Error(ErrorKind::InvalidArgument, "atom probabilities must be positive");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > kProbSumTol) {
    throw Error(ErrorKind::InvalidArgument, "probabilities sum to " + std::to_string(total));
  }
}

FiniteProbSpace FiniteProbSpace::uniform(std::size_t n) {
  std::vector<std::string> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = "w" + std::to_string(i);
  return FiniteProbSpace(std::move(ids), std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

std::size_t FiniteProbSpace::index_of(const std::string& id) const {
  auto it = std::find(ids_.begin(), ids_.end(), id);
  if (it == ids_.end()) throw Error(ErrorKind::InvalidArgument, "unknown atom id " + id);
  return static_cast<std::size_t>(it - ids_.begin());
}

SpacePtr make_space(FiniteProbSpace space) {
  return std::make_shared<const FiniteProbSpace>(std::move(space));
}

Partition::Partition(std::size_t n_atoms, std::vector<std::vector<std::size_t>> cells)
    : cells_(std::move(cells)), cell_of_(n_atoms, n_atoms) {
  for (std::size_t c = 0; c < cells_.size(); ++c) {
    if (cells_[c].empty()) throw Error(ErrorKind::InvalidArgument, "empty partition cell");
    for (std::size_t w : cells_[c]) {
      if (w >= n_atoms) throw Error(ErrorKind::InvalidArgument, "atom index out of range");
      if (cell_of_[w] != n_atoms) {
        throw Error(ErrorKind::InvalidArgument, "cells overlap at atom " + std::to_string(w));
      }
      cell_of_[w] = c;
    }
  }
  for (std::size_t w = 0; w < n_atoms; ++w) {
    if (cell_of_[w] == n_atoms) {
      throw Error(ErrorKind::InvalidArgument, "atom " + std::to_string(w) + " not covered");
    }
  }
}

Partition Partition::trivial(std::size_t n_atoms) {
  std::vector<std::size_t> all(n_atoms);
  std::iota(all.begin(), all.end(), std::size_t{0});
  return Partition(n_atoms, {std::move(all)});
}

Partition Partition::finest(std::size_t n_atoms) {
  std::vector<std::vector<std::size_t>> cells(n_atoms);
  for (std::size_t w = 0; w < n_atoms; ++w) cells[w] = {w};
  return Partition(n_atoms, std::move(cells));
}

bool Partition::refines(const Partition& coarser) const {
  if (coarser.n_atoms() != n_atoms()) return false;
  for (const auto& cell : cells_) {
    const std::size_t target = coarser.cell_of(cell.front());
    for (std::size_t w : cell) {
      if (coarser.cell_of(w) != target) return false;
    }
  }
  return true;
}

Filtration::Filtration(std::vector<Partition> levels) : levels_(std::move(levels)) {
  if (levels_.empty()) throw Error(ErrorKind::InvalidArgument, "empty filtration");
  for (std::size_t k = 1; k < levels_.size(); ++k) {
    if (!levels_[k].refines(levels_[k - 1])) {
      throw Error(ErrorKind::InvalidArgument,
                  "partition " + std::to_string(k) + " does not refine its predecessor");
    }
  }
}

PointRV::PointRV(SpacePtr space, std::size_t dim, std::vector<double> flat_values)
    : space_(std::move(space)), dim_(dim), values_(std::move(flat_values)) {
  if (dim_ == 0 || dim_ > kMaxDimension) throw Error(ErrorKind::InvalidArgument, "bad dimension");
  if (values_.size() != space_->size() * dim_) {
    throw Error(ErrorKind::LengthMismatch, "point random variable needs a value per atom");
  }
  for (double x : values_) {
    if (!std::isfinite(x)) throw Error(ErrorKind::NonFinite, "selection value");
  }
}

PointRV::PointRV(SpacePtr space, const std::vector<double>& values)
    : PointRV(std::move(space), 1, values) {}

SetRV::SetRV(SpacePtr space, std::vector<ConvexBody> values)
    : space_(std::move(space)), values_(std::move(values)) {
  if (values_.size() != space_->size()) {
    throw Error(ErrorKind::LengthMismatch, "set random variable needs a value per atom");
  }
  for (const auto& v : values_) {
    if (v.dim() != values_.front().dim()) {
      throw Error(ErrorKind::DimensionMismatch, "set values differ in dimension");
    }
  }
}

SetRV::SetRV(SpacePtr space, const std::vector<Interval>& values)
    : SetRV(std::move(space), [&] {
        std::vector<ConvexBody> bodies;
        bodies.reserve(values.size());
        for (const auto& iv : values) bodies.emplace_back(iv);
        return bodies;
      }()) {}

// ---------------------------------------------------------------------------

Point expectation(const PointRV& f) {
  std::vector<std::size_t> all(f.space()->size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  Point acc(f.dim(), 0.0);
  for (std::size_t w : all) {
    auto v = f.at(w);
    for (std::size_t k = 0; k < f.dim(); ++k) acc[k] += f.space()->prob(w) * v[k];
  }
  return acc;
}

PointRV conditional_expectation(const PointRV& f, const Partition& p) {
  std::vector<double> flat(f.flat().size());
  for (const auto& cell : p.cells()) {
    const Point avg = point_cell_average(f, cell);
    for (std::size_t w : cell) {
      std::copy(avg.begin(), avg.end(), flat.begin() + static_cast<std::ptrdiff_t>(w * f.dim()));
    }
  }
  return PointRV(f.space(), f.dim(), std::move(flat));
}

bool is_measurable(const PointRV& f, const Partition& p, double tol) {
  for (const auto& cell : p.cells()) {
    auto first = f.at(cell.front());
    for (std::size_t w : cell) {
      auto v = f.at(w);
      for (std::size_t k = 0; k < f.dim(); ++k) {
        if (std::abs(v[k] - first[k]) > tol) return false;
      }
    }
  }
  return true;
}

bool is_measurable(const SetRV& F, const Partition& p) {
  const double tol = default_tolerance(F.dim());
  for (const auto& cell : p.cells()) {
    const ConvexBody& first = F.at(cell.front());
    for (std::size_t w : cell) {
      if (hausdorff_distance(F.at(w), first) > tol) return false;
    }
  }
  return true;
}

bool is_selection(const PointRV& f, const SetRV& F) {
  require_same_space(f.space(), F.space());
  for (std::size_t w = 0; w < F.space()->size(); ++w) {
    if (!contains_point(F.at(w), f.at(w), default_tolerance(F.dim()))) return false;
  }
  return true;
}

ConvexBody aumann_expectation(const SetRV& F) {
  std::vector<std::size_t> all(F.space()->size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return cell_average(F, all);
}

SetRV conditional_expectation(const SetRV& F, const Partition& p) {
  if (p.n_atoms() != F.space()->size()) {
    throw Error(ErrorKind::InvalidArgument, "partition does not match the space");
  }
  std::vector<ConvexBody> values(F.space()->size());
  for (const auto& cell : p.cells()) {
    const ConvexBody avg = cell_average(F, cell);
    for (std::size_t w : cell) values[w] = avg;
  }
  return SetRV(F.space(), std::move(values));
}

SetRV decomposable_hull(std::span<const PointRV> family) {
  if (family.empty()) throw Error(ErrorKind::EmptyFamily, "decomposable hull of no selections");
  const SpacePtr& space = family.front().space();
  const std::size_t dim = family.front().dim();
  for (const auto& f : family) {
    require_same_space(space, f.space());
    if (f.dim() != dim) throw Error(ErrorKind::DimensionMismatch, "family dimensions differ");
  }
  std::vector<ConvexBody> values;
  values.reserve(space->size());
  for (std::size_t w = 0; w < space->size(); ++w) {
    std::vector<Point> pts;
    pts.reserve(family.size());
    for (const auto& f : family) {
      auto v = f.at(w);
      pts.emplace_back(v.begin(), v.end());
    }
    values.emplace_back(dim, pts);
  }
  return SetRV(space, std::move(values));
}

double castaing_weight(std::size_t k) {
  if (k == 0) return 0.0;
  if (k == 1) return 1.0;
  // k = 2, 3, ... enumerates odd dyadics level by level: 1/2, 1/4, 3/4, 1/8, ...
  std::size_t level = 1;
  std::size_t first = 2;
  while (k >= first + (std::size_t{1} << (level - 1))) {
    first += std::size_t{1} << (level - 1);
    ++level;
  }
  const std::size_t odd = 2 * (k - first) + 1;
  return static_cast<double>(odd) / static_cast<double>(std::size_t{1} << level);
}

std::vector<PointRV> castaing_sequence(const SetRV& F, std::size_t n) {
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "castaing sequence needs n >= 1");
  if (F.dim() != 1) throw Error(ErrorKind::NotInterval, "castaing sequence needs r = 1");
  std::vector<PointRV> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double lambda = castaing_weight(k);
    std::vector<double> vals(F.space()->size());
    for (std::size_t w = 0; w < vals.size(); ++w) {
      const Interval iv = F.at(w).as_interval();
      vals[w] = lambda * iv.lo() + (1.0 - lambda) * iv.hi();
    }
    out.emplace_back(F.space(), vals);
  }
  return out;
}

std::string_view to_string(Classification c) noexcept {
  switch (c) {
    case Classification::Martingale: return "martingale";
    case Classification::Submartingale: return "submartingale";
    case Classification::Supermartingale: return "supermartingale";
    case Classification::None: return "none";
  }
  return "none";
}

ClassificationReport classify_process_detailed(std::span<const SetRV> process,
                                               const Filtration& filtration) {
  if (process.empty()) throw Error(ErrorKind::LengthMismatch, "empty process");
  require_adapted(process, filtration);
  const double tol = default_tolerance(process.front().dim());

  ClassificationReport report;
  bool all_sub = true;
  bool all_super = true;
  for (std::size_t k = 0; k + 1 < process.size(); ++k) {
    StepComparison step;
    step.step = k;
    step.expectation_contains_current = true;
    step.current_contains_expectation = true;
    for (const auto& cell : filtration[k].cells()) {
      const ConvexBody expected = cell_average(process[k + 1], cell);
      const ConvexBody& current = process[k].at(cell.front());
      if (!contains(expected, current, tol)) step.expectation_contains_current = false;
      if (!contains(current, expected, tol)) step.current_contains_expectation = false;
      step.hausdorff_gap = std::max(step.hausdorff_gap, hausdorff_distance(expected, current));
    }
    all_sub = all_sub && step.expectation_contains_current;
    all_super = all_super && step.current_contains_expectation;
    report.steps.push_back(step);
  }
  if (all_sub && all_super) {
    report.kind = Classification::Martingale;
  } else if (all_sub) {
    report.kind = Classification::Submartingale;
  } else if (all_super) {
    report.kind = Classification::Supermartingale;
  } else {
    report.kind = Classification::None;
  }
  return report;
}

Classification classify_process(std::span<const SetRV> process, const Filtration& filtration) {
  return classify_process_detailed(process, filtration).kind;
}

Classification classify_point_process(std::span<const PointRV> process,
                                      const Filtration& filtration) {
  if (process.empty()) throw Error(ErrorKind::LengthMismatch, "empty process");
  require_adapted(process, filtration);
  const std::size_t dim = process.front().dim();
  bool sub = true;
  bool super = true;
  for (std::size_t k = 0; k + 1 < process.size(); ++k) {
    for (const auto& cell : filtration[k].cells()) {
      const Point expected = point_cell_average(process[k + 1], cell);
      auto current = process[k].at(cell.front());
      for (std::size_t i = 0; i < dim; ++i) {
        const double gap = expected[i] - current[i];
        if (dim == 1) {
          if (gap < -kExactTol) sub = false;
          if (gap > kExactTol) super = false;
        } else if (std::abs(gap) > kExactTol) {
          sub = false;
          super = false;
        }
      }
    }
  }
  if (sub && super) return Classification::Martingale;
  if (sub) return Classification::Submartingale;
  if (super) return Classification::Supermartingale;
  return Classification::None;
}

DegeneracyResult is_degenerate_by_expectation(const SetRV& F) {
  DegeneracyResult result{false, aumann_expectation(F), std::nullopt};
  result.degenerate = result.expectation.is_singleton();
  if (result.degenerate) return result;

  const FiniteProbSpace& space = *F.space();
  const std::size_t n = space.size();
  const std::size_t dim = F.dim();
  std::vector<std::size_t> spread;
  for (std::size_t w = 0; w < n; ++w) {
    if (F.at(w).size() > 1) spread.push_back(w);
  }

  std::vector<double> base;
  base.reserve(n * dim);
  for (std::size_t w = 0; w < n; ++w) {
    auto g = F.at(w).generator(0);
    base.insert(base.end(), g.begin(), g.end());
  }
  const PointRV base_sel(F.space(), dim, base);

  if (dim == 1 && spread.size() >= 2) {
    // Two selections with equal means that differ on atoms i and j; gluing
    // f1 on {i} with f2 elsewhere moves the mean by t.
    const std::size_t i = spread[0];
    const std::size_t j = spread[1];
    const Interval vi = F.at(i).as_interval();
    const Interval vj = F.at(j).as_interval();
    const double t = std::min(space.prob(i) * vi.width(), space.prob(j) * vj.width());
    const double ti = std::min(t / space.prob(i), vi.width());
    const double tj = std::min(t / space.prob(j), vj.width());
    const double lo_i[] = {vi.lo()};
    const double up_i[] = {vi.lo() + ti};
    const double lo_j[] = {vj.lo()};
    const double up_j[] = {vj.lo() + tj};
    PointRV f1 = with_value(with_value(base_sel, i, lo_i), j, up_j);
    PointRV f2 = with_value(with_value(base_sel, i, up_i), j, lo_j);
    PointRV witness = with_value(f2, i, lo_i);
    Point m1 = expectation(f1);
    Point m2 = expectation(f2);
    Point mw = expectation(witness);
    result.witness = DegeneracyWitness{std::move(f1), std::move(f2), {i}, std::move(witness),
                                       std::move(m1), std::move(m2), std::move(mw), true};
    return result;
  }

  // One spread atom (or r >= 2): f1 and f2 differ only at atom i, so their
  // means already differ and the glued witness is f2 itself.
  const std::size_t i = spread.front();
  PointRV f2 = with_value(base_sel, i, F.at(i).generator(1));
  std::vector<std::size_t> cell_a;
  for (std::size_t w = 0; w < n; ++w) {
    if (w != i) cell_a.push_back(w);
  }
  PointRV witness = f2;
  Point m1 = expectation(base_sel);
  Point m2 = expectation(f2);
  Point mw = expectation(witness);
  result.witness = DegeneracyWitness{base_sel, std::move(f2), std::move(cell_a), std::move(witness),
                                     std::move(m1), std::move(m2), std::move(mw), false};
  return result;
}

std::vector<SetRV> interval_process(std::span<const PointRV> lower,
                                    std::span<const PointRV> upper) {
  if (lower.size() != upper.size()) {
    throw Error(ErrorKind::LengthMismatch, "endpoint processes differ in length");
  }
  std::vector<SetRV> out;
  out.reserve(lower.size());
  for (std::size_t k = 0; k < lower.size(); ++k) {
    require_same_space(lower[k].space(), upper[k].space());
    if (lower[k].dim() != 1 || upper[k].dim() != 1) {
      throw Error(ErrorKind::NotInterval, "endpoints must be real-valued");
    }
    std::vector<Interval> vals;
    vals.reserve(lower[k].space()->size());
    for (std::size_t w = 0; w < lower[k].space()->size(); ++w) {
      const double a = lower[k].scalar(w);
      const double b = upper[k].scalar(w);
      if (a > b) {
        throw Error(ErrorKind::OrderViolation, "lower endpoint exceeds upper at term " +
                                                   std::to_string(k) + ", atom " +
                                                   std::to_string(w));
      }
      vals.push_back(Interval::make(a, b));
    }
    out.emplace_back(lower[k].space(), vals);
  }
  return out;
}

bool interval_endpoint_martingale_check(std::span<const PointRV> lower,
                                        std::span<const PointRV> upper,
                                        const Filtration& filtration) {
  // Validates ordering and lengths.
  (void)interval_process(lower, upper);
  return classify_point_process(lower, filtration) == Classification::Martingale &&
         classify_point_process(upper, filtration) == Classification::Martingale;
}

}  // namespace setval
