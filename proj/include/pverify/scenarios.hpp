#pragma once

// Application settings built on the core: second-price auctions, k-minded
// combinatorial auctions and two-facility location on a line.

#include "pverify/harmless.hpp"
#include "pverify/reverse.hpp"

#include <set>

namespace pverify {

/// Reverse-direction harmful test for a single-item second-price auction seen
/// from one bidder. `threshold` is the highest competing bid. With
/// allocation-dependent verification, reports are only checked when they win.
inline bool second_price_harmful_contains(const Rational& reported_value, const Rational& threshold,
                                          bool allocation_dependent, const Rational& candidate_value) {
  if (reported_value < 0 || threshold < 0 || candidate_value < 0)
    throw ValidationError("second-price values must be nonnegative");
  if (allocation_dependent) {
    if (threshold > reported_value) return false;
    return candidate_value > 0 && candidate_value < threshold;
  }
  return candidate_value > 0 && candidate_value < reported_value;
}

/// k-minded bidder viewed as a single agent: coordinate 0 is "no bundle" (value
/// 0), coordinates 1..k are the bundle values.
inline bool kminded_harmless_contains(int k, const Vector& theta, const Vector& x) {
  if (k != 1 && k != 2) throw ValidationError("k-minded harmless sets are supported for k = 1 or 2");
  const std::size_t m = static_cast<std::size_t>(k) + 1;
  require_same_dim(m, theta.size());
  require_same_dim(m, x.size());
  detail::require_null_zero(theta, 0, "type");
  detail::require_null_zero(x, 0, "report");
  for (std::size_t i = 1; i < m; ++i)
    if (theta[i] < 0) throw ValidationError("bundle values must be nonnegative");
  if (k == 1) return pairwise_harmless(theta, Allocation::point_mass(2, 0), Allocation::point_mass(2, 1)).contains(x);
  return deterministic_harmless(theta, point_masses(3)).contains(x);
}

struct FacilityLine {
  std::vector<Rational> locations;
  Rational benefit;

  void validate() const {
    std::set<Rational> seen(locations.begin(), locations.end());
    if (seen.size() != locations.size()) throw ValidationError("facility locations must be distinct");
  }
};

enum class VerificationKind { NoOverbid, NoOverbidOnReceived, NoUnderbidDistance, DirectionImposing };

/// Value of each facility to an agent at `position`: benefit minus distance.
inline Vector facility_type(const Rational& position, const FacilityLine& line) {
  line.validate();
  std::vector<Rational> out;
  for (const auto& g : line.locations) out.push_back(line.benefit - abs(position - g));
  return Vector(std::move(out));
}

struct FacilityCoverageOptions {
  /// Fixed tie-breaking: types tied between the facilities at the rule's prices
  /// all get the same facility, so reports on theta's critical hyperplane are harmless.
  bool fixed_tie_breaking = true;
  /// Misreports checked: multiples of span/divisions within span_multiple spans of the agent.
  long divisions = 100;
  long span_multiple = 3;
};

/// Harmless test for a misreported position against the two-facility separating family.
inline bool facility_harmless_contains(const Rational& agent, const FacilityLine& line, const Rational& reported,
                                       bool fixed_tie_breaking) {
  if (line.locations.size() != 2) throw ValidationError("facility harmless sets are implemented for two facilities");
  const Vector theta = facility_type(agent, line);
  const Vector t = facility_type(reported, line);
  if (theta[0] == theta[1]) return true;  // indifferent: everything harmless
  const ConvexRegion strict =
      pairwise_harmless_region(theta, Allocation::point_mass(2, 0), Allocation::point_mass(2, 1));
  if (strict.contains(t)) return true;
  // Fixed tie-breaking: a report on the critical hyperplane gets theta's allocation.
  return fixed_tie_breaking && strict.halfspaces().front().hyperplane.contains(t);
}

/// Whether the given verifications block every misreported position that is
/// not harmless for the two-facility separating family.
inline bool facility_verification_covers(const Rational& agent, const FacilityLine& line,
                                         const std::set<VerificationKind>& verifications,
                                         const FacilityCoverageOptions& opts = {}) {
  line.validate();
  if (line.locations.size() != 2) throw ValidationError("facility coverage is implemented for two facilities");
  for (auto v : verifications)
    if (v != VerificationKind::NoUnderbidDistance && v != VerificationKind::DirectionImposing)
      throw ValidationError("facility coverage only understands no-underbidding and direction-imposing");
  if (opts.divisions <= 0 || opts.span_multiple <= 0) throw ValidationError("coverage grid must be nonempty");

  const Vector theta = facility_type(agent, line);
  if (theta[0] == theta[1]) return true;  // indifferent: everything harmless
  const std::size_t pref = theta[0] > theta[1] ? 0 : 1;
  const Rational& g = line.locations[pref];
  auto harmless = [&](const Rational& y) { return facility_harmless_contains(agent, line, y, opts.fixed_tie_breaking); };
  auto blocked = [&](const Rational& y) {
    if (verifications.count(VerificationKind::NoUnderbidDistance) && abs(y - g) < abs(agent - g)) return true;
    if (verifications.count(VerificationKind::DirectionImposing)) {
      if (agent < g && y > g) return true;
      if (agent > g && y < g) return true;
    }
    return false;
  };

  const Rational span = abs(line.locations[1] - line.locations[0]);
  const Rational step = span / opts.divisions;
  std::set<Rational> probes{line.locations[0], line.locations[1], agent,
                            (line.locations[0] + line.locations[1]) / 2};
  for (const auto& loc : line.locations) {
    probes.insert(2 * loc - agent);
    probes.insert(loc + step / 2);
    probes.insert(loc - step / 2);
  }
  probes.insert(agent + step / 2);
  probes.insert(agent - step / 2);
  const long n = opts.divisions * opts.span_multiple;
  for (long i = -n; i <= n; ++i) probes.insert(agent + step * i);

  for (const auto& y : probes)
    if (!harmless(y) && !blocked(y)) return false;
  return true;
}

}  // namespace pverify
