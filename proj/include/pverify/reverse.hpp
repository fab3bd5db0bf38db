#pragma once

// Reverse direction: given a reported type, which true types would strictly
// gain by having reported it?

#include "pverify/harmless.hpp"
#include "pverify/mechanisms.hpp"

namespace pverify {

struct HarmfulResult {
  std::function<bool(const Vector&)> membership;
  /// Convex pieces whose union is the harmful set, minus `excluded_points`.
  std::optional<std::vector<ConvexRegion>> pieces;
  std::vector<Vector> excluded_points;

  bool contains(const Vector& candidate) const { return membership(candidate); }
};

/// Candidate prefers what the report gets over what its own report would get.
template <AllocationRule Rule>
bool harmful_single_contains(const Vector& reported, const Rule& f, const Vector& candidate) {
  require_same_dim(reported.size(), candidate.size());
  return allocate(f, reported).value(candidate) > allocate(f, candidate).value(candidate);
}

/// Union over every separating rule on the allocation set. A candidate is harmful
/// for some rule exactly when the report is outside the candidate's harmless set.
inline bool harmful_union_contains(const Vector& reported, std::span<const Allocation> allocations,
                                   const Vector& candidate) {
  require_same_dim(reported.size(), candidate.size());
  return !deterministic_harmless(candidate, allocations).contains(reported);
}

/// The union as explicit pieces: for each ordered pair (pref, other), the
/// candidates strictly preferring pref whose critical hyperplane leaves the
/// report on pref's side.
inline HarmfulResult harmful_union(const Vector& reported, std::span<const Allocation> allocations) {
  if (allocations.size() < 2) throw ValidationError("harmful set needs at least two allocations");
  require_same_dim(allocations.front().dim(), reported.size());
  const std::size_t m = reported.size();
  std::vector<ConvexRegion> pieces;
  for (std::size_t i = 0; i < allocations.size(); ++i)
    for (std::size_t j = 0; j < allocations.size(); ++j) {
      if (i == j) continue;
      const Vector d = allocations[i].probs() - allocations[j].probs();
      ConvexRegion piece(m);
      piece.add_halfspace({Hyperplane(d, 0), Sense::StrictGreater});
      piece.add_halfspace({Hyperplane(-d, -d.dot(reported)), Sense::GreaterEqual});
      pieces.push_back(std::move(piece));
    }
  std::vector<Allocation> allocs(allocations.begin(), allocations.end());
  return HarmfulResult{[reported, allocs](const Vector& c) { return harmful_union_contains(reported, allocs, c); },
                       std::move(pieces),
                       {reported}};
}

/// Intersection over an explicit list of rules.
template <AllocationRule Rule>
bool harmful_intersection_contains(const Vector& reported, std::span<const Rule> rules, const Vector& candidate) {
  if (rules.empty()) throw ValidationError("harmful intersection needs at least one rule");
  return std::all_of(rules.begin(), rules.end(),
                     [&](const Rule& f) { return harmful_single_contains(reported, f, candidate); });
}

struct PairwiseHarmfulCase {
  int label = 0;  // 1..4
  ConvexRegion region;
  /// Boundary points the rule pins to the report's allocation; never harmful.
  std::vector<Vector> excluded_points;
  HarmfulResult result;
};

/// Four-way classification of a separating rule at the report. Cases 1 and 3:
/// the report receives the allocation it (weakly) prefers, and the harmful
/// types are those strictly preferring that allocation yet assigned the other.
/// Cases 2 and 4: the report receives its strictly worse allocation; nobody gains.
inline PairwiseHarmfulCase pairwise_harmful_cases(const Vector& reported, const SeparatingRule& f) {
  require_same_dim(f.a_i().dim(), reported.size());
  const std::size_t m = reported.size();
  const Rational vi = f.a_i().value(reported);
  const Rational vj = f.a_j().value(reported);
  const bool got_i = f.allocate(reported) == f.a_i();

  PairwiseHarmfulCase out{0, ConvexRegion(m), {}, {}};
  if (got_i)
    out.label = vj > vi ? 4 : 1;
  else
    out.label = vi > vj ? 2 : 3;

  if (out.label == 2 || out.label == 4) {
    // Coordinate sum both positive and negative: empty, and visibly so in any 2-D slice.
    out.region.add_halfspace({Hyperplane(Vector::ones(m), 0), Sense::StrictGreater});
    out.region.add_halfspace({Hyperplane(-Vector::ones(m), 0), Sense::StrictGreater});
  } else {
    const Allocation& given = got_i ? f.a_i() : f.a_j();
    const Allocation& other = got_i ? f.a_j() : f.a_i();
    const Vector pref_dir = given.probs() - other.probs();
    out.region.add_halfspace({Hyperplane(pref_dir, 0), Sense::StrictGreater});
    // Assigned `other`: strictly on other's side, or on the boundary when ties go there.
    const bool ties_to_other = (f.tie() == TieSide::ToI) != got_i;
    const Rational price = got_i ? f.relative_price() : Rational(-f.relative_price());
    out.region.add_halfspace(
        {Hyperplane(-pref_dir, -price), ties_to_other ? Sense::GreaterEqual : Sense::StrictGreater});
    for (const auto& [point, alloc] : f.overrides()) {
      if (pref_dir.dot(point) <= 0) continue;
      if (alloc == other && !ties_to_other) out.region.add_extra_point(point);
      if (alloc == given && ties_to_other) out.excluded_points.push_back(point);
    }
  }
  out.result = HarmfulResult{[reported, f](const Vector& c) { return harmful_single_contains(reported, f, c); },
                             std::vector<ConvexRegion>{out.region}, out.excluded_points};
  return out;
}

}  // namespace pverify
