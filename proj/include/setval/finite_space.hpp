#pragma once

// Random sets on finite probability spaces: Aumann expectation, set-valued
// conditional expectation, selections and martingale classification, all
// computed exactly (up to floating rounding) from the atoms.

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "setval/convex.hpp"

namespace setval {

/// Atoms with strictly positive probabilities summing to one (within 1e-12).
class FiniteProbSpace {
 public:
  FiniteProbSpace(std::vector<std::string> ids, std::vector<double> probs);

  /// n atoms named "w0".."w{n-1}", each with probability 1/n.
  static FiniteProbSpace uniform(std::size_t n);

  std::size_t size() const noexcept { return probs_.size(); }
  double prob(std::size_t atom) const { return probs_.at(atom); }
  const std::string& id(std::size_t atom) const { return ids_.at(atom); }
  std::span<const double> probs() const noexcept { return probs_; }
  /// Throws InvalidArgument for unknown ids.
  std::size_t index_of(const std::string& id) const;

 private:
  std::vector<std::string> ids_;
  std::vector<double> probs_;
};

using SpacePtr = std::shared_ptr<const FiniteProbSpace>;

SpacePtr make_space(FiniteProbSpace space);

/// Disjoint nonempty cells covering every atom; plays the role of a sigma-algebra.
class Partition {
 public:
  Partition(std::size_t n_atoms, std::vector<std::vector<std::size_t>> cells);

  static Partition trivial(std::size_t n_atoms);
  static Partition finest(std::size_t n_atoms);

  std::size_t n_atoms() const noexcept { return cell_of_.size(); }
  const std::vector<std::vector<std::size_t>>& cells() const noexcept { return cells_; }
  std::size_t cell_of(std::size_t atom) const { return cell_of_.at(atom); }
  /// Every cell of *this lies inside one cell of `coarser`.
  bool refines(const Partition& coarser) const;

 private:
  std::vector<std::vector<std::size_t>> cells_;
  std::vector<std::size_t> cell_of_;
};

/// P_0, ..., P_N with each P_{k+1} refining P_k.
class Filtration {
 public:
  explicit Filtration(std::vector<Partition> levels);

  std::size_t size() const noexcept { return levels_.size(); }
  const Partition& operator[](std::size_t k) const { return levels_.at(k); }
  const std::vector<Partition>& levels() const noexcept { return levels_; }

 private:
  std::vector<Partition> levels_;
};

/// Point-valued random variable in R^r; also the type of a selection.
class PointRV {
 public:
  PointRV(SpacePtr space, std::size_t dim, std::vector<double> flat_values);
  /// Real-valued convenience constructor.
  PointRV(SpacePtr space, const std::vector<double>& values);

  const SpacePtr& space() const noexcept { return space_; }
  std::size_t dim() const noexcept { return dim_; }
  std::span<const double> at(std::size_t atom) const { return {values_.data() + atom * dim_, dim_}; }
  /// Scalar value; requires dim() == 1.
  double scalar(std::size_t atom) const { return values_.at(atom); }
  std::span<const double> flat() const noexcept { return values_; }

 private:
  SpacePtr space_;
  std::size_t dim_;
  std::vector<double> values_;
};

/// Convex-body-valued random variable on a finite space.
class SetRV {
 public:
  SetRV(SpacePtr space, std::vector<ConvexBody> values);
  SetRV(SpacePtr space, const std::vector<Interval>& values);

  const SpacePtr& space() const noexcept { return space_; }
  std::size_t dim() const noexcept { return values_.front().dim(); }
  const ConvexBody& at(std::size_t atom) const { return values_.at(atom); }
  const std::vector<ConvexBody>& values() const noexcept { return values_; }

 private:
  SpacePtr space_;
  std::vector<ConvexBody> values_;
};

Point expectation(const PointRV& f);
PointRV conditional_expectation(const PointRV& f, const Partition& p);
bool is_measurable(const PointRV& f, const Partition& p, double tol = kExactTol);
bool is_measurable(const SetRV& f, const Partition& p);
/// True iff `f` takes a value in F at every atom.
bool is_selection(const PointRV& f, const SetRV& F);

/// Sum over atoms of p_i * F(w_i), an exact Minkowski sum.
ConvexBody aumann_expectation(const SetRV& F);

/// Cellwise (1/P(A)) * sum_{w in A} p_w F(w).
SetRV conditional_expectation(const SetRV& F, const Partition& p);

/// Per-atom convex hull of the values of the family. Throws EmptyFamily.
SetRV decomposable_hull(std::span<const PointRV> family);

/// Weight of the k-th Castaing member (0-based): 0, 1, 1/2, 1/4, 3/4, 1/8, ...
double castaing_weight(std::size_t k);

/// n selections lambda_k * lo + (1 - lambda_k) * hi of an interval-valued F.
/// Throws NotInterval for r >= 2 and InvalidArgument for n == 0.
std::vector<PointRV> castaing_sequence(const SetRV& F, std::size_t n);

enum class Classification { Martingale, Submartingale, Supermartingale, None };

std::string_view to_string(Classification c) noexcept;

/// Comparison of E(F_{k+1} | P_k) against F_k for one step.
struct StepComparison {
  std::size_t step = 0;
  bool expectation_contains_current = false;  // E(F_{k+1}|P_k) ⊇ F_k
  bool current_contains_expectation = false;  // E(F_{k+1}|P_k) ⊆ F_k
  double hausdorff_gap = 0.0;                 // max over cells
};

struct ClassificationReport {
  Classification kind = Classification::None;
  std::vector<StepComparison> steps;
};

/// Throws NotAdapted when F_k is not P_k-measurable, LengthMismatch when the
/// process and filtration lengths differ.
ClassificationReport classify_process_detailed(std::span<const SetRV> process,
                                               const Filtration& filtration);
Classification classify_process(std::span<const SetRV> process, const Filtration& filtration);

/// Same classification for a point-valued process. Sub/super only make sense
/// for dim 1; in higher dimensions the result is Martingale or None.
Classification classify_point_process(std::span<const PointRV> process,
                                      const Filtration& filtration);

/// Selections built by the degeneracy criterion. `witness` equals f1 on
/// `cell_a` and f2 elsewhere, and its mean differs from E(f1).
struct DegeneracyWitness {
  PointRV f1;
  PointRV f2;
  std::vector<std::size_t> cell_a;
  PointRV witness;
  Point mean_f1;
  Point mean_f2;
  Point mean_witness;
  bool equal_means = false;  // f1 and f2 were built with E(f1) = E(f2)
};

struct DegeneracyResult {
  bool degenerate = false;
  ConvexBody expectation;
  std::optional<DegeneracyWitness> witness;
};

/// E(F) is a singleton iff every value of F is a singleton. For a
/// non-degenerate F a witness selection is returned.
DegeneracyResult is_degenerate_by_expectation(const SetRV& F);

/// True iff both endpoint processes are exact martingales. Throws
/// OrderViolation when a_k > b_k somewhere and NotAdapted on measurability.
bool interval_endpoint_martingale_check(std::span<const PointRV> lower,
                                        std::span<const PointRV> upper,
                                        const Filtration& filtration);

/// The interval process [a_k, b_k] as SetRVs.
std::vector<SetRV> interval_process(std::span<const PointRV> lower, std::span<const PointRV> upper);

}  // namespace setval
