#include "setval/convex.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

namespace setval {

namespace {

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw Error(ErrorKind::NonFinite, std::string(what) + " is not finite");
}

void require_same_dim(std::size_t a, std::size_t b) {
  if (a != b) {
    throw Error(ErrorKind::DimensionMismatch,
                "dimensions " + std::to_string(a) + " and " + std::to_string(b));
  }
}

double max_abs(std::span<const double> xs) {
  double m = 0.0;
  for (double x : xs) m = std::max(m, std::abs(x));
  return m;
}

// Phase-one simplex for: exists lambda >= 0 with sum(lambda) = 1 and
// sum_j lambda_j v_j = x. Returns the optimal sum of artificial variables,
// which is zero exactly when x lies in the hull of the v_j. Bland's rule.
double membership_residual(std::span<const double> coords, std::size_t dim,
                           std::span<const double> x) {
  const std::size_t n = coords.size() / dim;
  const std::size_t m = dim + 1;
  const std::size_t cols = n + m;
  const std::size_t stride = cols + 1;
  std::vector<double> t(m * stride, 0.0);
  auto at = [&](std::size_t i, std::size_t j) -> double& { return t[i * stride + j]; };

  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < n; ++j) at(i, j) = coords[j * dim + i];
    at(i, cols) = x[i];
  }
  for (std::size_t j = 0; j < n; ++j) at(dim, j) = 1.0;
  at(dim, cols) = 1.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (at(i, cols) < 0.0) {
      for (std::size_t j = 0; j <= cols; ++j) at(i, j) = -at(i, j);
    }
    at(i, n + i) = 1.0;
  }
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) basis[i] = n + i;

  const double eps = 1e-13 * std::max(1.0, std::max(max_abs(coords), max_abs(x)));
  const std::size_t max_iter = 64 * cols + 64;
  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    std::size_t entering = cols;
    for (std::size_t j = 0; j < cols; ++j) {
      double rc = j >= n ? 1.0 : 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        if (basis[i] >= n) rc -= at(i, j);
      }
      if (rc < -eps) {
        entering = j;
        break;
      }
    }
    if (entering == cols) break;

    std::size_t leaving = m;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      const double a = at(i, entering);
      if (a <= eps) continue;
      const double ratio = at(i, cols) / a;
      if (ratio < best || (leaving != m && ratio == best && basis[i] < basis[leaving])) {
        best = ratio;
        leaving = i;
      }
    }
    if (leaving == m) break;

    const double pivot = at(leaving, entering);
    for (std::size_t j = 0; j <= cols; ++j) at(leaving, j) /= pivot;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == leaving) continue;
      const double f = at(i, entering);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= cols; ++j) at(i, j) -= f * at(leaving, j);
    }
    basis[leaving] = entering;
  }

  double residual = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] >= n) residual += std::max(0.0, at(i, cols));
  }
  return residual;
}

using Vec3 = std::array<double, 3>;

Vec3 to_vec3(std::span<const double> p) {
  Vec3 v{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < p.size(); ++i) v[i] = p[i];
  return v;
}

Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
Vec3 add_scaled(const Vec3& a, const Vec3& d, double s) {
  return {a[0] + s * d[0], a[1] + s * d[1], a[2] + s * d[2]};
}
double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
double dist(const Vec3& a, const Vec3& b) {
  const Vec3 d = sub(a, b);
  return std::sqrt(dot(d, d));
}

Vec3 closest_on_segment(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = sub(b, a);
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return a;
  const double s = std::clamp(dot(sub(p, a), ab) / len2, 0.0, 1.0);
  return add_scaled(a, ab, s);
}

// Closest point on triangle abc to p (Ericson, Real-Time Collision Detection 5.1.5).
Vec3 closest_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = sub(b, a);
  const Vec3 ac = sub(c, a);
  const Vec3 ap = sub(p, a);
  const double d1 = dot(ab, ap);
  const double d2 = dot(ac, ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;

  const Vec3 bp = sub(p, b);
  const double d3 = dot(ab, bp);
  const double d4 = dot(ac, bp);
  if (d3 >= 0.0 && d4 <= d3) return b;

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return add_scaled(a, ab, d1 / (d1 - d3));

  const Vec3 cp = sub(p, c);
  const double d5 = dot(ab, cp);
  const double d6 = dot(ac, cp);
  if (d6 >= 0.0 && d5 <= d6) return c;

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return add_scaled(a, ac, d2 / (d2 - d6));

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    return add_scaled(b, sub(c, b), (d4 - d3) / ((d4 - d3) + (d5 - d6)));
  }

  const double denom = va + vb + vc;
  if (denom == 0.0) {
    // Collinear vertices: fall back to the three edges.
    const Vec3 q1 = closest_on_segment(p, a, b);
    const Vec3 q2 = closest_on_segment(p, b, c);
    const Vec3 q3 = closest_on_segment(p, a, c);
    Vec3 q = q1;
    if (dist(p, q2) < dist(p, q)) q = q2;
    if (dist(p, q3) < dist(p, q)) q = q3;
    return q;
  }
  const double v = vb / denom;
  const double w = vc / denom;
  return add_scaled(add_scaled(a, ab, v), ac, w);
}

double cross2(std::span<const double> o, std::span<const double> a, std::span<const double> b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

}  // namespace

// ---------------------------------------------------------------------------
// Interval

Interval Interval::make(double a, double b) {
  require_finite(a, "lower endpoint");
  require_finite(b, "upper endpoint");
  if (a > b) {
    throw Error(ErrorKind::OrderViolation,
                "lower endpoint " + std::to_string(a) + " exceeds upper " + std::to_string(b));
  }
  return Interval(a, b);
}

Interval Interval::point(double x) { return make(x, x); }

Interval mk_interval(double a, double b) { return Interval::make(a, b); }

Interval minkowski_add(const Interval& a, const Interval& b) {
  return Interval::make(a.lo() + b.lo(), a.hi() + b.hi());
}

Interval scalar_mul(double lambda, const Interval& a) {
  require_finite(lambda, "scalar");
  if (lambda >= 0.0) return Interval::make(lambda * a.lo(), lambda * a.hi());
  return Interval::make(lambda * a.hi(), lambda * a.lo());
}

bool contains(const Interval& outer, const Interval& inner, double tol) {
  return outer.lo() <= inner.lo() + tol && inner.hi() <= outer.hi() + tol;
}

bool contains(const Interval& outer, double x, double tol) {
  return outer.lo() <= x + tol && x <= outer.hi() + tol;
}

double hausdorff_distance(const Interval& a, const Interval& b) {
  return std::max(std::abs(a.lo() - b.lo()), std::abs(a.hi() - b.hi()));
}

double set_norm(const Interval& a) { return std::max(std::abs(a.lo()), std::abs(a.hi())); }

std::optional<Interval> hukuhara_diff(const Interval& a, const Interval& b) {
  if (a.width() < b.width()) return std::nullopt;
  const double lo = a.lo() - b.lo();
  const double hi = a.hi() - b.hi();
  // Rounding can invert nearly equal endpoints.
  if (lo > hi) return Interval::point(0.5 * (lo + hi));
  return Interval::make(lo, hi);
}

Interval segment(double x, double y) { return Interval::make(std::min(x, y), std::max(x, y)); }

bool approx_equal(const Interval& a, const Interval& b, double tol) {
  return hausdorff_distance(a, b) <= tol;
}

// ---------------------------------------------------------------------------
// ConvexBody

ConvexBody::ConvexBody(std::size_t dim, const std::vector<Point>& generators) : dim_(dim) {
  if (dim == 0 || dim > kMaxDimension) {
    throw Error(ErrorKind::InvalidArgument,
                "dimension must be in 1.." + std::to_string(kMaxDimension) + ", got " +
                    std::to_string(dim));
  }
  if (generators.empty()) throw Error(ErrorKind::EmptyFamily, "convex body needs a generator");
  coords_.reserve(generators.size() * dim);
  for (const Point& p : generators) {
    require_same_dim(dim, p.size());
    for (double x : p) {
      require_finite(x, "coordinate");
      coords_.push_back(x);
    }
  }
  canonicalize();
}

ConvexBody::ConvexBody(const Interval& iv) : dim_(1) {
  coords_.push_back(iv.lo());
  if (!iv.is_degenerate()) coords_.push_back(iv.hi());
}

ConvexBody ConvexBody::singleton(std::span<const double> x) {
  return ConvexBody(x.size(), {Point(x.begin(), x.end())});
}

std::vector<Point> ConvexBody::generators() const {
  std::vector<Point> out;
  out.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) {
    auto g = generator(i);
    out.emplace_back(g.begin(), g.end());
  }
  return out;
}

bool ConvexBody::is_singleton(double tol) const {
  if (size() == 1) return true;
  if (tol <= 0.0) return false;
  auto first = generator(0);
  for (std::size_t i = 1; i < size(); ++i) {
    auto g = generator(i);
    for (std::size_t k = 0; k < dim_; ++k) {
      if (std::abs(g[k] - first[k]) > tol) return false;
    }
  }
  return true;
}

Interval ConvexBody::as_interval() const {
  if (dim_ != 1) {
    throw Error(ErrorKind::NotInterval, "body of dimension " + std::to_string(dim_));
  }
  return Interval::make(coords_.front(), coords_.back());
}

double ConvexBody::support(std::span<const double> direction) const {
  require_same_dim(dim_, direction.size());
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < size(); ++i) {
    auto g = generator(i);
    double s = 0.0;
    for (std::size_t k = 0; k < dim_; ++k) s += g[k] * direction[k];
    best = std::max(best, s);
  }
  return best;
}

void ConvexBody::canonicalize() {
  if (dim_ == 1) {
    const auto [mn, mx] = std::minmax_element(coords_.begin(), coords_.end());
    const double lo = *mn;
    const double hi = *mx;
    coords_.assign({lo});
    if (hi != lo) coords_.push_back(hi);
    return;
  }

  std::vector<Point> pts = generators();
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  if (dim_ == 2 && pts.size() > 2) {
    // Andrew's monotone chain; collinear points are dropped.
    std::vector<Point> hull(2 * pts.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      while (k >= 2 && cross2(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
      hull[k++] = pts[i];
    }
    for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
      while (k >= lower && cross2(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
      hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    pts = std::move(hull);
  } else if (dim_ == 3 && pts.size() > 2) {
    for (std::size_t i = 0; i < pts.size() && pts.size() > 1;) {
      std::vector<double> others;
      others.reserve((pts.size() - 1) * 3);
      for (std::size_t j = 0; j < pts.size(); ++j) {
        if (j != i) others.insert(others.end(), pts[j].begin(), pts[j].end());
      }
      const double scale = std::max(1.0, std::max(max_abs(others), max_abs(pts[i])));
      if (membership_residual(others, 3, pts[i]) <= 1e-12 * scale) {
        pts.erase(pts.begin() + static_cast<std::ptrdiff_t>(i));
      } else {
        ++i;
      }
    }
  }

  coords_.clear();
  for (const Point& p : pts) coords_.insert(coords_.end(), p.begin(), p.end());
}

ConvexBody minkowski_add(const ConvexBody& a, const ConvexBody& b) {
  require_same_dim(a.dim(), b.dim());
  ConvexBody out;
  out.dim_ = a.dim();
  if (a.dim() == 1) {
    out.coords_ = {a.coords_.front() + b.coords_.front(), a.coords_.back() + b.coords_.back()};
    out.canonicalize();
    return out;
  }
  out.coords_.clear();
  out.coords_.reserve(a.size() * b.size() * a.dim());
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto x = a.generator(i);
    for (std::size_t j = 0; j < b.size(); ++j) {
      auto y = b.generator(j);
      for (std::size_t k = 0; k < a.dim(); ++k) out.coords_.push_back(x[k] + y[k]);
    }
  }
  out.canonicalize();
  return out;
}

ConvexBody scalar_mul(double lambda, const ConvexBody& a) {
  require_finite(lambda, "scalar");
  ConvexBody out;
  out.dim_ = a.dim();
  out.coords_ = a.coords_;
  for (double& x : out.coords_) x *= lambda;
  out.canonicalize();
  return out;
}

bool contains_point(const ConvexBody& body, std::span<const double> x, double tol) {
  require_same_dim(body.dim(), x.size());
  if (body.dim() == 1) return contains(body.as_interval(), x[0], tol);
  std::vector<double> coords;
  coords.reserve(body.size() * body.dim());
  for (std::size_t i = 0; i < body.size(); ++i) {
    auto g = body.generator(i);
    coords.insert(coords.end(), g.begin(), g.end());
  }
  const double scale = std::max(1.0, std::max(max_abs(coords), max_abs(x)));
  if (membership_residual(coords, body.dim(), x) <= tol * scale) return true;
  // The LP residual is an L1 mismatch; confirm near misses geometrically.
  return distance_to(body, x) <= tol;
}

bool contains(const ConvexBody& outer, const ConvexBody& inner) {
  return contains(outer, inner, default_tolerance(outer.dim()));
}

bool contains(const ConvexBody& outer, const ConvexBody& inner, double tol) {
  require_same_dim(outer.dim(), inner.dim());
  if (outer.dim() == 1) return contains(outer.as_interval(), inner.as_interval(), tol);
  for (std::size_t i = 0; i < inner.size(); ++i) {
    if (!contains_point(outer, inner.generator(i), tol)) return false;
  }
  return true;
}

double distance_to(const ConvexBody& body, std::span<const double> x) {
  require_same_dim(body.dim(), x.size());
  if (body.dim() == 1) {
    const Interval iv = body.as_interval();
    return std::max({iv.lo() - x[0], x[0] - iv.hi(), 0.0});
  }
  const Vec3 p = to_vec3(x);
  const std::size_t n = body.size();
  double best = std::numeric_limits<double>::infinity();
  if (n == 1) return dist(p, to_vec3(body.generator(0)));

  if (body.dim() == 2 || n == 2) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const Vec3 q = closest_on_segment(p, to_vec3(body.generator(i)), to_vec3(body.generator(j)));
        best = std::min(best, dist(p, q));
      }
    }
    if (n > 2 && body.dim() == 2) {
      // Interior points: the polygon contains p iff it is left of every CCW edge.
      bool inside = true;
      for (std::size_t i = 0; i < n && inside; ++i) {
        auto a = body.generator(i);
        auto b = body.generator((i + 1) % n);
        if (cross2(a, b, x) < 0.0) inside = false;
      }
      if (inside) return 0.0;
    }
    return best;
  }

  // dim 3, n >= 3: the nearest point lies on a triangle spanned by generators.
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 a = to_vec3(body.generator(i));
    for (std::size_t j = i + 1; j < n; ++j) {
      const Vec3 b = to_vec3(body.generator(j));
      for (std::size_t k = j + 1; k < n; ++k) {
        const Vec3 q = closest_on_triangle(p, a, b, to_vec3(body.generator(k)));
        best = std::min(best, dist(p, q));
      }
    }
  }
  if (n >= 4) {
    std::vector<double> coords;
    for (std::size_t i = 0; i < n; ++i) {
      auto g = body.generator(i);
      coords.insert(coords.end(), g.begin(), g.end());
    }
    const double scale = std::max(1.0, std::max(max_abs(coords), max_abs(x)));
    if (membership_residual(coords, 3, x) <= 1e-14 * scale) return 0.0;
  }
  return best;
}

double hausdorff_distance(const ConvexBody& a, const ConvexBody& b) {
  require_same_dim(a.dim(), b.dim());
  if (a.dim() == 1) return hausdorff_distance(a.as_interval(), b.as_interval());
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, distance_to(b, a.generator(i)));
  for (std::size_t i = 0; i < b.size(); ++i) d = std::max(d, distance_to(a, b.generator(i)));
  return d;
}

double set_norm(const ConvexBody& a) {
  double best = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double s = 0.0;
    for (double x : a.generator(i)) s += x * x;
    best = std::max(best, std::sqrt(s));
  }
  return best;
}

ConvexBody segment(std::span<const double> x, std::span<const double> y) {
  require_same_dim(x.size(), y.size());
  return ConvexBody(x.size(), {Point(x.begin(), x.end()), Point(y.begin(), y.end())});
}

bool approx_equal(const ConvexBody& a, const ConvexBody& b) {
  return approx_equal(a, b, default_tolerance(a.dim()));
}

bool approx_equal(const ConvexBody& a, const ConvexBody& b, double tol) {
  return hausdorff_distance(a, b) <= tol;
}

}  // namespace setval
