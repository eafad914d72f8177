#pragma once

// Closed bounded convex sets: exact intervals in R and convex hulls of
// finite point sets in R^r (r <= 3).

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "setval/error.hpp"

namespace setval {

/// Absolute slack for "exact" comparisons of endpoints and coordinates.
inline constexpr double kExactTol = 1e-12;
/// Hausdorff slack for inclusion tests on hulls with r >= 2.
inline constexpr double kHullTol = 1e-9;
inline constexpr std::size_t kMaxDimension = 3;

/// Tolerance used for set comparisons in dimension `dim`.
constexpr double default_tolerance(std::size_t dim) noexcept {
  return dim == 1 ? kExactTol : kHullTol;
}

using Point = std::vector<double>;

/// Closed interval [lo, hi] with finite endpoints.
class Interval {
 public:
  /// The degenerate interval {0}.
  constexpr Interval() noexcept = default;

  /// Throws OrderViolation if a > b and NonFinite on inf/NaN.
  static Interval make(double a, double b);
  static Interval point(double x);

  constexpr double lo() const noexcept { return lo_; }
  constexpr double hi() const noexcept { return hi_; }
  constexpr double width() const noexcept { return hi_ - lo_; }
  constexpr bool is_degenerate() const noexcept { return lo_ == hi_; }

  friend constexpr bool operator==(const Interval&, const Interval&) noexcept = default;

 private:
  constexpr Interval(double lo, double hi) noexcept : lo_(lo), hi_(hi) {}

  double lo_ = 0.0;
  double hi_ = 0.0;
};

Interval mk_interval(double a, double b);
Interval minkowski_add(const Interval& a, const Interval& b);
Interval scalar_mul(double lambda, const Interval& a);
/// True iff inner is a subset of outer, up to `tol` on each endpoint.
bool contains(const Interval& outer, const Interval& inner, double tol = kExactTol);
bool contains(const Interval& outer, double x, double tol = kExactTol);
double hausdorff_distance(const Interval& a, const Interval& b);
double set_norm(const Interval& a);
/// The unique C with b + C = a, or nullopt when width(a) < width(b).
std::optional<Interval> hukuhara_diff(const Interval& a, const Interval& b);
Interval segment(double x, double y);
bool approx_equal(const Interval& a, const Interval& b, double tol = kExactTol);

inline Interval operator+(const Interval& a, const Interval& b) { return minkowski_add(a, b); }
inline Interval operator*(double lambda, const Interval& a) { return scalar_mul(lambda, a); }

/// Convex hull of a nonempty finite generator set in R^r.
///
/// Generators are canonicalized on construction: in R the hull is kept as
/// {lo, hi} (or {x} when degenerate); in R^2 as the counter-clockwise extreme
/// points from Andrew's monotone chain; in R^3 redundant generators are
/// pruned by an LP membership test and the rest sorted lexicographically.
class ConvexBody {
 public:
  /// The singleton {0} in R.
  ConvexBody() : coords_{0.0} {}
  ConvexBody(std::size_t dim, const std::vector<Point>& generators);
  explicit ConvexBody(const Interval& iv);

  static ConvexBody singleton(std::span<const double> x);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return coords_.size() / dim_; }
  std::span<const double> generator(std::size_t i) const noexcept {
    return {coords_.data() + i * dim_, dim_};
  }
  std::vector<Point> generators() const;

  bool is_singleton(double tol = 0.0) const;
  /// Throws NotInterval when dim() != 1.
  Interval as_interval() const;

  /// max over the body of <x, direction>.
  double support(std::span<const double> direction) const;

 private:
  void canonicalize();

  std::size_t dim_ = 1;
  std::vector<double> coords_;

  friend ConvexBody minkowski_add(const ConvexBody&, const ConvexBody&);
  friend ConvexBody scalar_mul(double, const ConvexBody&);
};

ConvexBody minkowski_add(const ConvexBody& a, const ConvexBody& b);
ConvexBody scalar_mul(double lambda, const ConvexBody& a);
/// True iff inner is a subset of outer. Exact endpoint comparison for r = 1,
/// LP membership of every generator of inner for r >= 2.
bool contains(const ConvexBody& outer, const ConvexBody& inner);
bool contains(const ConvexBody& outer, const ConvexBody& inner, double tol);
bool contains_point(const ConvexBody& body, std::span<const double> x, double tol);
/// Euclidean distance from x to the body.
double distance_to(const ConvexBody& body, std::span<const double> x);
double hausdorff_distance(const ConvexBody& a, const ConvexBody& b);
double set_norm(const ConvexBody& a);
ConvexBody segment(std::span<const double> x, std::span<const double> y);
bool approx_equal(const ConvexBody& a, const ConvexBody& b);
bool approx_equal(const ConvexBody& a, const ConvexBody& b, double tol);

inline ConvexBody operator+(const ConvexBody& a, const ConvexBody& b) { return minkowski_add(a, b); }
inline ConvexBody operator*(double lambda, const ConvexBody& a) { return scalar_mul(lambda, a); }

}  // namespace setval
