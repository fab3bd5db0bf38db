#pragma once

// Brute-force validators. Every "needs verification" answer produced elsewhere
// can be backed here by an explicit rule under which the misreport pays off.

#include "pverify/harmless.hpp"
#include "pverify/mechanisms.hpp"
#include "pverify/multiagent.hpp"

namespace pverify {

/// A separating rule plus the strict gain theta gets by reporting x under it.
struct Witness {
  SeparatingRule rule;
  Allocation truthful;   // rule(theta)
  Allocation misreport;  // rule(x)
  Rational benefit;      // theta . (misreport - truthful) > 0
  std::optional<Rational> epsilon;
};

/// Re-evaluates the rule from scratch; never trusts the construction.
inline bool verify_witness(const Witness& w, const Vector& theta, const Vector& x) {
  const Allocation at_theta = w.rule.allocate(theta);
  const Allocation at_x = w.rule.allocate(x);
  return at_theta == w.truthful && at_x == w.misreport &&
         at_x.value(theta) - at_theta.value(theta) == w.benefit && w.benefit > 0;
}

/// Scans allocation pairs in index order for a critical rule that hands theta
/// its less preferred allocation while x claims the preferred one.
inline std::optional<Witness> search_beneficial_misreport(const Vector& theta, const Vector& x,
                                                          std::span<const Allocation> allocations) {
  if (allocations.size() < 2) throw ValidationError("witness search needs at least two allocations");
  require_same_dim(allocations.front().dim(), theta.size());
  require_same_dim(theta.size(), x.size());
  if (x == theta) return std::nullopt;

  for (std::size_t i = 0; i < allocations.size(); ++i) {
    for (std::size_t j = i + 1; j < allocations.size(); ++j) {
      const Allocation& ai = allocations[i];
      const Allocation& aj = allocations[j];
      const Rational vi = ai.value(theta);
      const Rational vj = aj.value(theta);
      if (vi == vj) continue;
      const bool i_preferred = vi > vj;
      const Allocation& pref = i_preferred ? ai : aj;
      const Allocation& other = i_preferred ? aj : ai;
      const Vector d = pref.probs() - other.probs();
      if (d.dot(x) < d.dot(theta)) continue;

      SeparatingRule rule(ai, aj, (ai.probs() - aj.probs()).dot(theta), i_preferred ? TieSide::ToI : TieSide::ToJ);
      rule.add_override(theta, other);
      if (rule.normal().dot(x) == rule.relative_price()) rule.add_override(x, pref);
      Witness w{rule, rule.allocate(theta), rule.allocate(x), Rational(0), std::nullopt};
      w.benefit = w.misreport.value(theta) - w.truthful.value(theta);
      if (w.benefit <= 0) throw InvariantViolation("constructed witness does not benefit the agent");
      return w;
    }
  }
  return std::nullopt;
}

namespace detail {

inline Vector positive_part(const Vector& v) {
  Vector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] > 0) out[i] = v[i];
  return out;
}

inline Rational coord_sum(const Vector& v) {
  Rational s = 0;
  for (const auto& c : v) s += c;
  return s;
}

/// Two allocations of the space whose difference (second - first) is a
/// positive multiple of d.
inline std::pair<Allocation, Allocation> allocations_along(const Vector& d, const AllocationSpace& space) {
  if (std::holds_alternative<FullSimplex>(space)) {
    const Vector up = positive_part(d);
    const Vector down = positive_part(-d);
    const Rational s = coord_sum(up);
    return {Allocation(down * (1 / s)), Allocation(up * (1 / s))};
  }
  if (const auto* sub = std::get_if<SubsimplexWithNull>(&space)) {
    const Vector up = positive_part(d);
    const Vector down = positive_part(-d);
    const Rational s = std::max(coord_sum(up), coord_sum(down));
    Vector a = down * (1 / s);
    Vector b = up * (1 / s);
    a[sub->null_index] += 1 - coord_sum(a);
    b[sub->null_index] += 1 - coord_sum(b);
    return {Allocation(std::move(a)), Allocation(std::move(b))};
  }
  const auto& allocs = std::get<ExplicitAllocations>(space).allocations;
  for (std::size_t i = 0; i < allocs.size(); ++i)
    for (std::size_t j = 0; j < allocs.size(); ++j) {
      if (i == j) continue;
      const Vector diff = allocs[j].probs() - allocs[i].probs();
      const std::size_t k = static_cast<std::size_t>(
          std::find_if(d.begin(), d.end(), [](const Rational& c) { return c != 0; }) - d.begin());
      if (diff[k] == 0) continue;
      const Rational mu = diff[k] / d[k];
      if (mu > 0 && diff == d * mu) return {allocs[i], allocs[j]};
    }
  throw InvariantViolation("no allocation pair along direction " + d.str());
}

}  // namespace detail

/// Follows the constructive argument for truthful-in-expectation families: pick
/// a direction d in the difference span with d . theta > 0 and d . x > d . theta,
/// then the threshold rule on d hands theta the lower allocation and x the upper.
inline std::optional<Witness> construct_tie_witness(const Vector& theta, const Vector& x, const AllocationSpace& space) {
  const ProjectionSplit s = split_against_type(theta, x, space);
  if (s.projected_theta.is_zero()) {
    if (!s.projected_x.is_zero()) throw InvariantViolation("nonzero projection of report in an empty span");
    return std::nullopt;
  }
  if (s.scale && *s.scale <= 1) return std::nullopt;

  Vector d;
  std::optional<Rational> epsilon;
  if (s.scale) {
    d = s.projected_theta;
  } else {
    const Rational alpha = s.projected_x.dot(s.projected_theta) / s.projected_theta.squared_norm();
    const Vector residual = s.projected_x - s.projected_theta * alpha;
    Rational eps = 1;
    bool found = false;
    for (int halvings = 0; halvings <= 64; ++halvings, eps /= 2) {
      Vector candidate = residual + s.projected_theta * eps;
      if (candidate.dot(theta) > 0 && candidate.dot(x) > candidate.dot(theta)) {
        d = std::move(candidate);
        found = true;
        break;
      }
    }
    if (!found) throw InvariantViolation("epsilon halving did not separate " + x.str() + " from " + theta.str());
    epsilon = eps;
  }

  auto [lower, upper] = detail::allocations_along(d, space);
  SeparatingRule rule(upper, lower, (upper.probs() - lower.probs()).dot(theta), TieSide::ToJ);
  Witness w{rule, rule.allocate(theta), rule.allocate(x), Rational(0), epsilon};
  w.benefit = w.misreport.value(theta) - w.truthful.value(theta);
  if (w.benefit <= 0) throw InvariantViolation("constructed expectation witness does not benefit the agent");
  return w;
}

namespace detail {

inline std::vector<Rational> grid_offsets(const Rational& a, const Rational& b, const Rational& resolution) {
  const Rational lo = std::min(a, b) - 1;
  const Rational hi = std::max(a, b) + 1;
  const Rational steps = lo / resolution;
  const mpz_class k = steps.get_num() / steps.get_den() - 1;
  std::vector<Rational> out{a, b};
  for (Rational c = Rational(k) * resolution; c <= hi; c += resolution) out.push_back(c);
  return out;
}

}  // namespace detail

/// Exhaustive Definition-level search over separating rules whose offsets lie on
/// a grid of the given resolution (plus the offsets through theta and x). Every
/// tie side and boundary override for theta and x is tried. A false answer comes
/// with a real witness; a true answer may miss rules off the grid.
inline bool grid_harmless(const Vector& theta, const Vector& x, std::span<const Allocation> allocations,
                          const Rational& resolution) {
  if (resolution <= 0) throw ValidationError("grid resolution must be positive");
  for (std::size_t i = 0; i < allocations.size(); ++i) {
    for (std::size_t j = i + 1; j < allocations.size(); ++j) {
      const Allocation& ai = allocations[i];
      const Allocation& aj = allocations[j];
      const Vector n = ai.probs() - aj.probs();
      for (const auto& c : detail::grid_offsets(n.dot(theta), n.dot(x), resolution)) {
        for (TieSide tie : {TieSide::ToI, TieSide::ToJ}) {
          std::vector<std::optional<Allocation>> choices{std::nullopt, ai, aj};
          for (const auto& at_theta : choices) {
            if (at_theta && n.dot(theta) != c) continue;
            for (const auto& at_x : choices) {
              if (at_x && (n.dot(x) != c || x == theta)) continue;
              SeparatingRule f(ai, aj, c, tie);
              if (at_theta) f.add_override(theta, *at_theta);
              if (at_x) f.add_override(x, *at_x);
              if (!single_rule_harmless_contains(theta, f, x)) return false;
            }
          }
        }
      }
    }
  }
  return true;
}

/// Same idea for a posted-price family: prices on a uniform grid inside the
/// bounds (unbounded axes stop one unit past the largest type coordinate).
inline bool grid_harmless(const Vector& theta, const Vector& x, const PriceFamily& family,
                          const Rational& resolution) {
  if (resolution <= 0) throw ValidationError("grid resolution must be positive");
  family.validate();
  if (theta == x) return true;
  Rational top = 0;
  for (const auto& c : theta) top = std::max(top, c);
  for (const auto& c : x) top = std::max(top, c);
  top += 1;

  std::vector<std::vector<Rational>> axes;
  for (const auto& b : family.bounds) {
    std::vector<Rational> axis;
    const Rational hi = b.high ? *b.high : std::max(top, b.low);
    for (Rational p = b.low; p <= hi; p += resolution) axis.push_back(p);
    axes.push_back(std::move(axis));
  }
  std::vector<std::size_t> idx(axes.size(), 0);
  while (true) {
    std::vector<Rational> prices;
    for (std::size_t k = 0; k < axes.size(); ++k) prices.push_back(axes[k][idx[k]]);
    if (detail::price_benefit(family, prices, theta, x)) return false;
    std::size_t k = 0;
    while (k < axes.size() && ++idx[k] == axes[k].size()) idx[k++] = 0;
    if (k == axes.size()) break;
  }
  return true;
}

}  // namespace pverify
