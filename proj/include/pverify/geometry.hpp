#pragma once

// Exact linear algebra over the rationals: vectors, hyperplanes, half-space
// regions and orthogonal projection onto the span of a set of vectors.

#include "pverify/rational.hpp"

#include <algorithm>
#include <initializer_list>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace pverify {

class DimensionMismatch : public ValidationError {
public:
  DimensionMismatch(std::size_t expected, std::size_t got)
      : ValidationError("dimension mismatch: expected " + std::to_string(expected) + ", got " +
                        std::to_string(got)) {}
};

inline void require_same_dim(std::size_t expected, std::size_t got) {
  if (expected != got) throw DimensionMismatch(expected, got);
}

class Vector {
public:
  Vector() = default;
  explicit Vector(std::size_t dim) : coords_(dim, Rational(0)) {}
  explicit Vector(std::vector<Rational> coords) : coords_(std::move(coords)) {}
  Vector(std::initializer_list<Rational> coords) : coords_(coords) {}

  /// Builds a vector from text coordinates ("1/2", "3", ...).
  static Vector parse(std::span<const std::string> coords) {
    std::vector<Rational> out;
    out.reserve(coords.size());
    for (const auto& c : coords) out.push_back(parse_rational(c));
    return Vector(std::move(out));
  }

  static Vector unit(std::size_t dim, std::size_t axis) {
    Vector v(dim);
    v.coords_.at(axis) = 1;
    return v;
  }

  static Vector ones(std::size_t dim) { return Vector(std::vector<Rational>(dim, Rational(1))); }

  std::size_t size() const noexcept { return coords_.size(); }
  bool empty() const noexcept { return coords_.empty(); }

  const Rational& operator[](std::size_t i) const { return coords_[i]; }
  Rational& operator[](std::size_t i) { return coords_[i]; }

  auto begin() const noexcept { return coords_.begin(); }
  auto end() const noexcept { return coords_.end(); }
  const std::vector<Rational>& coords() const noexcept { return coords_; }

  bool is_zero() const {
    return std::all_of(coords_.begin(), coords_.end(), [](const Rational& c) { return c == 0; });
  }

  Rational dot(const Vector& other) const {
    require_same_dim(size(), other.size());
    Rational acc = 0;
    for (std::size_t i = 0; i < size(); ++i) acc += coords_[i] * other.coords_[i];
    return acc;
  }

  Rational squared_norm() const { return dot(*this); }

  Vector& operator+=(const Vector& other) {
    require_same_dim(size(), other.size());
    for (std::size_t i = 0; i < size(); ++i) coords_[i] += other.coords_[i];
    return *this;
  }
  Vector& operator-=(const Vector& other) {
    require_same_dim(size(), other.size());
    for (std::size_t i = 0; i < size(); ++i) coords_[i] -= other.coords_[i];
    return *this;
  }
  Vector& operator*=(const Rational& s) {
    for (auto& c : coords_) c *= s;
    return *this;
  }

  friend Vector operator+(Vector a, const Vector& b) { return a += b; }
  friend Vector operator-(Vector a, const Vector& b) { return a -= b; }
  friend Vector operator-(Vector a) { return a *= Rational(-1); }
  friend Vector operator*(Vector a, const Rational& s) { return a *= s; }
  friend Vector operator*(const Rational& s, Vector a) { return a *= s; }

  friend bool operator==(const Vector& a, const Vector& b) { return a.coords_ == b.coords_; }
  friend bool operator<(const Vector& a, const Vector& b) { return a.coords_ < b.coords_; }

  std::string str() const {
    std::string out = "(";
    for (std::size_t i = 0; i < size(); ++i) {
      if (i) out += ", ";
      out += to_string(coords_[i]);
    }
    return out + ")";
  }

  friend std::ostream& operator<<(std::ostream& os, const Vector& v) { return os << v.str(); }

private:
  std::vector<Rational> coords_;
};

/// The locus {x : normal . x = offset}.
class Hyperplane {
public:
  Hyperplane(Vector normal, Rational offset) : normal_(std::move(normal)), offset_(std::move(offset)) {
    if (normal_.empty() || normal_.is_zero()) throw ValidationError("hyperplane normal must be nonzero");
  }

  const Vector& normal() const noexcept { return normal_; }
  const Rational& offset() const noexcept { return offset_; }
  std::size_t dim() const noexcept { return normal_.size(); }

  /// normal . x - offset; positive on the side the normal points to.
  Rational signed_value(const Vector& x) const { return normal_.dot(x) - offset_; }

  bool contains(const Vector& x) const { return signed_value(x) == 0; }

  friend bool operator==(const Hyperplane& a, const Hyperplane& b) {
    return a.normal_ == b.normal_ && a.offset_ == b.offset_;
  }

private:
  Vector normal_;
  Rational offset_;
};

enum class Sense { StrictGreater, GreaterEqual };

inline const char* sense_symbol(Sense s) { return s == Sense::StrictGreater ? ">" : ">="; }

struct Halfspace {
  Hyperplane hyperplane;
  Sense sense = Sense::StrictGreater;

  friend bool operator==(const Halfspace&, const Halfspace&) = default;
};

inline bool halfspace_contains(const Halfspace& h, const Vector& x) {
  require_same_dim(h.hyperplane.dim(), x.size());
  const Rational v = h.hyperplane.signed_value(x);
  return h.sense == Sense::StrictGreater ? v > 0 : v >= 0;
}

/// A finite intersection of half-spaces together with a set of points that
/// are members regardless of the half-spaces. No half-spaces means the whole
/// space. A dimension of 0 leaves the region dimension-agnostic.
class ConvexRegion {
public:
  ConvexRegion() = default;
  explicit ConvexRegion(std::size_t dim) : dim_(dim) {}
  ConvexRegion(std::size_t dim, std::vector<Halfspace> halfspaces, std::vector<Vector> extra_points = {})
      : dim_(dim), halfspaces_(std::move(halfspaces)) {
    for (const auto& h : halfspaces_) require_same_dim(dim_, h.hyperplane.dim());
    for (auto& p : extra_points) add_extra_point(std::move(p));
  }

  static ConvexRegion whole_space(std::size_t dim = 0) { return ConvexRegion(dim); }

  std::size_t dim() const noexcept { return dim_; }
  const std::vector<Halfspace>& halfspaces() const noexcept { return halfspaces_; }
  const std::vector<Vector>& extra_points() const noexcept { return extra_points_; }
  bool is_whole_space() const noexcept { return halfspaces_.empty(); }

  void add_halfspace(Halfspace h) {
    adopt_dim(h.hyperplane.dim());
    halfspaces_.push_back(std::move(h));
  }

  void add_extra_point(Vector p) {
    adopt_dim(p.size());
    if (std::find(extra_points_.begin(), extra_points_.end(), p) == extra_points_.end())
      extra_points_.push_back(std::move(p));
  }

  bool satisfies_halfspaces(const Vector& x) const {
    if (dim_ != 0) require_same_dim(dim_, x.size());
    return std::all_of(halfspaces_.begin(), halfspaces_.end(),
                       [&](const Halfspace& h) { return halfspace_contains(h, x); });
  }

  friend bool operator==(const ConvexRegion&, const ConvexRegion&) = default;

  bool contains(const Vector& x) const {
    if (dim_ != 0) require_same_dim(dim_, x.size());
    if (std::find(extra_points_.begin(), extra_points_.end(), x) != extra_points_.end()) return true;
    return satisfies_halfspaces(x);
  }

private:
  void adopt_dim(std::size_t d) {
    if (dim_ == 0)
      dim_ = d;
    else
      require_same_dim(dim_, d);
  }

  std::size_t dim_ = 0;
  std::vector<Halfspace> halfspaces_;
  std::vector<Vector> extra_points_;
};

inline bool region_contains(const ConvexRegion& r, const Vector& x) { return r.contains(x); }

/// Membership in the result holds exactly when it holds in every input. Extra
/// points survive only if every input contains them.
inline ConvexRegion intersect_regions(std::span<const ConvexRegion> regions) {
  ConvexRegion out;
  for (const auto& r : regions)
    for (const auto& h : r.halfspaces()) out.add_halfspace(h);
  for (const auto& r : regions) {
    for (const auto& p : r.extra_points()) {
      bool everywhere = std::all_of(regions.begin(), regions.end(),
                                    [&](const ConvexRegion& other) { return other.contains(p); });
      if (everywhere) out.add_extra_point(p);
    }
  }
  for (const auto& r : regions)
    if (out.dim() == 0 && r.dim() != 0) out = ConvexRegion(r.dim(), out.halfspaces(), out.extra_points());
  return out;
}

inline ConvexRegion intersect_regions(std::initializer_list<ConvexRegion> regions) {
  return intersect_regions(std::span<const ConvexRegion>(regions.begin(), regions.size()));
}

struct Span {
  std::vector<Vector> basis;
};

namespace detail {

/// Indices of a maximal linearly independent subset of `vectors`, scanned in order.
inline std::vector<std::size_t> independent_subset(std::span<const Vector> vectors) {
  std::vector<std::size_t> chosen;
  std::vector<Vector> echelon;  // reduced rows of chosen vectors
  std::vector<std::size_t> pivots;
  for (std::size_t idx = 0; idx < vectors.size(); ++idx) {
    Vector v = vectors[idx];
    for (std::size_t r = 0; r < echelon.size(); ++r) {
      const Rational& coef = v[pivots[r]];
      if (coef != 0) v -= echelon[r] * (coef / echelon[r][pivots[r]]);
    }
    auto it = std::find_if(v.begin(), v.end(), [](const Rational& c) { return c != 0; });
    if (it == v.end()) continue;
    pivots.push_back(static_cast<std::size_t>(it - v.begin()));
    echelon.push_back(std::move(v));
    chosen.push_back(idx);
  }
  return chosen;
}

/// Solves the square nonsingular system a * x = b in place by Gauss-Jordan elimination.
inline std::vector<Rational> solve(std::vector<std::vector<Rational>> a, std::vector<Rational> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && a[piv][col] == 0) ++piv;
    if (piv == n) throw InvariantViolation("singular system in exact solve");
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t row = 0; row < n; ++row) {
      if (row == col || a[row][col] == 0) continue;
      Rational f = a[row][col] / a[col][col];
      for (std::size_t k = col; k < n; ++k) a[row][k] -= f * a[col][k];
      b[row] -= f * b[col];
    }
  }
  for (std::size_t i = 0; i < n; ++i) b[i] /= a[i][i];
  return b;
}

}  // namespace detail

inline std::size_t rank(std::span<const Vector> vectors) { return detail::independent_subset(vectors).size(); }

/// Orthogonal projection of x onto span(S). Dependent basis vectors are dropped
/// before solving the normal equations; an empty span projects to zero.
inline Vector project_onto_span(const Span& s, const Vector& x) {
  for (const auto& b : s.basis) require_same_dim(x.size(), b.size());
  const auto idx = detail::independent_subset(s.basis);
  if (idx.empty()) return Vector(x.size());

  const std::size_t k = idx.size();
  std::vector<std::vector<Rational>> gram(k, std::vector<Rational>(k));
  std::vector<Rational> rhs(k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) gram[i][j] = s.basis[idx[i]].dot(s.basis[idx[j]]);
    rhs[i] = s.basis[idx[i]].dot(x);
  }
  const auto coef = detail::solve(std::move(gram), std::move(rhs));
  Vector out(x.size());
  for (std::size_t i = 0; i < k; ++i) out += s.basis[idx[i]] * coef[i];
  return out;
}

}  // namespace pverify
