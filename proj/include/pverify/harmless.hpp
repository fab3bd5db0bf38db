#pragma once

// Closed-form harmless sets: the reports that can never strictly benefit an
// agent of a given true type, for a whole class of payment-implementable rules.

#include "pverify/geometry.hpp"
#include "pverify/mechanisms.hpp"

#include <functional>
#include <memory>
#include <variant>

namespace pverify {

enum class MechanismKind { Deterministic, UniversallyTruthful, TruthfulInExpectation };

inline const char* kind_name(MechanismKind k) {
  switch (k) {
    case MechanismKind::Deterministic: return "deterministic";
    case MechanismKind::UniversallyTruthful: return "universally_truthful";
    case MechanismKind::TruthfulInExpectation: return "truthful_in_expectation";
  }
  return "?";
}

struct ExplicitAllocations {
  std::vector<Allocation> allocations;
};

/// Every distribution over the m assignments.
struct FullSimplex {
  std::size_t m = 0;
};

/// Distributions that may put any leftover mass on a null assignment worth 0.
struct SubsimplexWithNull {
  std::size_t m = 0;
  std::size_t null_index = 0;
};

using AllocationSpace = std::variant<ExplicitAllocations, FullSimplex, SubsimplexWithNull>;

struct MechanismClass {
  MechanismKind kind = MechanismKind::Deterministic;
  AllocationSpace space;
};

/// Raised when the allocation differences a type is not indifferent between do
/// not form a linear subspace, so the projection characterization does not apply.
class SubspaceHypothesisError : public ValidationError {
public:
  using ValidationError::ValidationError;
};

struct HarmlessResult {
  std::optional<ConvexRegion> region;
  std::function<bool(const Vector&)> membership;

  bool contains(const Vector& x) const { return membership(x); }

  static HarmlessResult from_region(ConvexRegion r) {
    auto shared = std::make_shared<const ConvexRegion>(std::move(r));
    return HarmlessResult{*shared, [shared](const Vector& x) { return shared->contains(x); }};
  }
};

/// Optional per-coordinate bounds on the type space; unset bounds are open.
struct TypeBox {
  std::vector<std::optional<Rational>> lower;
  std::vector<std::optional<Rational>> upper;

  static TypeBox nonnegative_orthant(std::size_t m) {
    return TypeBox{std::vector<std::optional<Rational>>(m, Rational(0)),
                   std::vector<std::optional<Rational>>(m)};
  }

  std::vector<Halfspace> halfspaces(std::size_t m) const {
    std::vector<Halfspace> out;
    for (std::size_t i = 0; i < m; ++i) {
      if (i < lower.size() && lower[i])
        out.push_back({Hyperplane(Vector::unit(m, i), *lower[i]), Sense::GreaterEqual});
      if (i < upper.size() && upper[i])
        out.push_back({Hyperplane(-Vector::unit(m, i), -*upper[i]), Sense::GreaterEqual});
    }
    return out;
  }

  bool contains(const Vector& x) const {
    for (const auto& h : halfspaces(x.size()))
      if (!halfspace_contains(h, x)) return false;
    return true;
  }
};

/// Intersects a harmless set with a restricted type space.
inline HarmlessResult restrict_to(const HarmlessResult& h, const TypeBox& box) {
  HarmlessResult out;
  if (h.region) {
    ConvexRegion r = *h.region;
    const std::size_t m = r.dim();
    std::vector<Vector> kept;
    for (const auto& p : r.extra_points())
      if (box.contains(p)) kept.push_back(p);
    std::vector<Halfspace> hs = r.halfspaces();
    for (auto& b : box.halfspaces(m)) hs.push_back(std::move(b));
    out.region = ConvexRegion(m, std::move(hs), std::move(kept));
  }
  out.membership = [inner = h.membership, box](const Vector& x) { return box.contains(x) && inner(x); };
  return out;
}

inline void require_distinct(const Allocation& a_i, const Allocation& a_j) {
  require_same_dim(a_i.dim(), a_j.dim());
  if (a_i == a_j) throw ValidationError("identical allocations have no indifference hyperplane");
}

/// Types valuing a_i and a_j equally.
inline Hyperplane indifference_hyperplane(const Allocation& a_i, const Allocation& a_j) {
  require_distinct(a_i, a_j);
  return Hyperplane(a_i.probs() - a_j.probs(), 0);
}

/// The translate of the indifference hyperplane passing through theta.
inline Hyperplane critical_hyperplane(const Vector& theta, const Allocation& a_i, const Allocation& a_j) {
  require_distinct(a_i, a_j);
  require_same_dim(a_i.dim(), theta.size());
  Vector n = a_i.probs() - a_j.probs();
  Rational c = n.dot(theta);
  return Hyperplane(std::move(n), std::move(c));
}

/// Harmless set over every separating rule on {a_i, a_j}: the open half-space
/// beyond the critical hyperplane on the side of the less preferred allocation,
/// plus theta itself. Whole space when theta is indifferent.
inline ConvexRegion pairwise_harmless_region(const Vector& theta, const Allocation& a_i, const Allocation& a_j) {
  require_distinct(a_i, a_j);
  require_same_dim(a_i.dim(), theta.size());
  const Rational vi = a_i.value(theta);
  const Rational vj = a_j.value(theta);
  ConvexRegion r(theta.size());
  if (vi == vj) return r;
  const Allocation& pref = vi > vj ? a_i : a_j;
  const Allocation& other = vi > vj ? a_j : a_i;
  Vector n = other.probs() - pref.probs();
  Rational c = n.dot(theta);
  r.add_halfspace({Hyperplane(std::move(n), std::move(c)), Sense::StrictGreater});
  r.add_extra_point(theta);
  return r;
}

inline HarmlessResult pairwise_harmless(const Vector& theta, const Allocation& a_i, const Allocation& a_j) {
  return HarmlessResult::from_region(pairwise_harmless_region(theta, a_i, a_j));
}

inline ConvexRegion deterministic_harmless_region(const Vector& theta, std::span<const Allocation> allocations) {
  if (allocations.size() < 2) throw ValidationError("harmless set needs at least two allocations");
  std::vector<ConvexRegion> pieces;
  for (std::size_t i = 0; i < allocations.size(); ++i)
    for (std::size_t j = i + 1; j < allocations.size(); ++j)
      pieces.push_back(pairwise_harmless_region(theta, allocations[i], allocations[j]));
  ConvexRegion out = intersect_regions(pieces);
  out.add_extra_point(theta);
  return out;
}

/// Harmless set shared by every deterministic payment-implementable rule over
/// the given allocations: intersection of the pairwise critical half-spaces.
inline HarmlessResult deterministic_harmless(const Vector& theta, std::span<const Allocation> allocations) {
  return HarmlessResult::from_region(deterministic_harmless_region(theta, allocations));
}

/// Distributions over truthful deterministic mechanisms share their harmless set.
inline HarmlessResult universally_truthful_harmless(const Vector& theta, std::span<const Allocation> allocations) {
  return deterministic_harmless(theta, allocations);
}

namespace detail {

inline void require_null_zero(const Vector& v, std::size_t null_index, const char* what) {
  if (null_index >= v.size()) throw ValidationError("null assignment index out of range");
  if (v[null_index] != 0)
    throw ValidationError(std::string(what) + " must value the null assignment at 0: " + v.str());
}

inline std::size_t space_dim(const AllocationSpace& space) {
  return std::visit(
      [](const auto& s) -> std::size_t {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, ExplicitAllocations>)
          return s.allocations.empty() ? 0 : s.allocations.front().dim();
        else
          return s.m;
      },
      space);
}

}  // namespace detail

/// Span of the scaled allocation differences theta is not indifferent between.
/// Throws SubspaceHypothesisError when an explicit set's differences are not a subspace.
inline Span difference_span(const Vector& theta, const AllocationSpace& space) {
  require_same_dim(detail::space_dim(space), theta.size());
  const std::size_t m = theta.size();
  Span out;
  if (const auto* full = std::get_if<FullSimplex>(&space)) {
    const bool constant = std::all_of(theta.begin(), theta.end(), [&](const Rational& c) { return c == theta[0]; });
    if (!constant)
      for (std::size_t i = 1; i < full->m; ++i) out.basis.push_back(Vector::unit(m, i) - Vector::unit(m, 0));
  } else if (const auto* sub = std::get_if<SubsimplexWithNull>(&space)) {
    detail::require_null_zero(theta, sub->null_index, "type");
    if (!theta.is_zero())
      for (std::size_t i = 0; i < m; ++i)
        if (i != sub->null_index) out.basis.push_back(Vector::unit(m, i));
  } else {
    const auto& allocs = std::get<ExplicitAllocations>(space).allocations;
    for (std::size_t i = 0; i < allocs.size(); ++i)
      for (std::size_t j = i + 1; j < allocs.size(); ++j) {
        Vector d = allocs[i].probs() - allocs[j].probs();
        if (d.dot(theta) != 0) out.basis.push_back(std::move(d));
      }
    // A finite union of lines through the origin is a subspace only if it is a single line.
    if (rank(out.basis) > 1)
      throw SubspaceHypothesisError(
          "scaled allocation differences do not form a linear subspace for type " + theta.str());
  }
  return out;
}

/// Decomposition of x against theta after projecting both onto the difference span.
struct ProjectionSplit {
  Vector projected_theta;
  Vector projected_x;
  /// Set when the projected report is a multiple of the projected type.
  std::optional<Rational> scale;
};

inline ProjectionSplit split_against_type(const Vector& theta, const Vector& x, const AllocationSpace& space) {
  require_same_dim(theta.size(), x.size());
  if (const auto* sub = std::get_if<SubsimplexWithNull>(&space)) detail::require_null_zero(x, sub->null_index, "report");
  const Span d = difference_span(theta, space);
  ProjectionSplit s{project_onto_span(d, theta), project_onto_span(d, x), std::nullopt};
  if (s.projected_theta.is_zero()) {
    if (s.projected_x.is_zero()) s.scale = Rational(0);
    return s;
  }
  Rational lambda = s.projected_x.dot(s.projected_theta) / s.projected_theta.squared_norm();
  if (s.projected_theta * lambda == s.projected_x) s.scale = lambda;
  return s;
}

/// Truthful-in-expectation harmless test: after projecting onto the difference
/// span, the report must be a scaled-down copy (factor at most 1) of the type.
inline bool tie_harmless_contains(const Vector& theta, const Vector& x, const AllocationSpace& space) {
  const ProjectionSplit s = split_against_type(theta, x, space);
  if (s.projected_theta.is_zero()) return s.projected_x.is_zero();
  return s.scale.has_value() && *s.scale <= 1;
}

inline HarmlessResult tie_harmless(const Vector& theta, const AllocationSpace& space) {
  (void)difference_span(theta, space);  // surface hypothesis failures eagerly
  return HarmlessResult{std::nullopt,
                        [theta, space](const Vector& x) { return tie_harmless_contains(theta, x, space); }};
}

/// Definition-level check for one rule: reporting x does not beat reporting theta.
template <AllocationRule Rule>
bool single_rule_harmless_contains(const Vector& theta, const Rule& f, const Vector& x) {
  require_same_dim(theta.size(), x.size());
  return allocate(f, theta).value(theta) >= allocate(f, x).value(theta);
}

/// Dispatch on mechanism class.
inline HarmlessResult harmless_for_class(const Vector& theta, const MechanismClass& cls) {
  if (cls.kind == MechanismKind::TruthfulInExpectation) return tie_harmless(theta, cls.space);
  const auto* expl = std::get_if<ExplicitAllocations>(&cls.space);
  if (!expl) {
    // Deterministic rules over a simplex space only ever use its vertices.
    return deterministic_harmless(theta, point_masses(detail::space_dim(cls.space)));
  }
  return cls.kind == MechanismKind::Deterministic ? deterministic_harmless(theta, expl->allocations)
                                                  : universally_truthful_harmless(theta, expl->allocations);
}

}  // namespace pverify
