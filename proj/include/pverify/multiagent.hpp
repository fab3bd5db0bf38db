#pragma once

// Multi-agent mechanisms seen from one agent: the other agents' reports fix a
// posted-price rule, so a mechanism induces a family of taxation rules whose
// shared harmless set is what the agent's verification must cover.

#include "pverify/harmless.hpp"
#include "pverify/mechanisms.hpp"

#include <functional>
#include <set>

namespace pverify {

/// Values (item 1, item 2) reported by the other unit-demand agents.
struct UnitDemandProfile {
  std::vector<std::pair<Rational, Rational>> others;
};

struct PriceInterval {
  Rational low = 0;
  std::optional<Rational> high;  // unset = unbounded above
};

/// Admissible posted prices for the non-null assignments; the null assignment is free.
struct PriceFamily {
  std::vector<PriceInterval> bounds;
  std::size_t null_index = 0;

  static PriceFamily nonnegative(std::size_t items) { return PriceFamily{std::vector<PriceInterval>(items)}; }

  static PriceFamily with_reserves(std::vector<Rational> reserves) {
    PriceFamily f;
    for (auto& r : reserves) f.bounds.push_back({std::move(r), std::nullopt});
    return f;
  }

  std::size_t dim() const noexcept { return bounds.size() + 1; }

  void validate() const {
    if (bounds.empty()) throw ValidationError("price family needs at least one priced assignment");
    if (null_index > bounds.size()) throw ValidationError("null assignment index out of range");
    for (const auto& b : bounds) {
      if (b.low < 0) throw ValidationError("price lower bound must be nonnegative");
      if (b.high && *b.high < b.low) throw ValidationError("price interval is empty");
    }
  }

  /// Assignment index of the k-th priced assignment.
  std::size_t assignment_of(std::size_t k) const { return k < null_index ? k : k + 1; }

  bool admits(const std::vector<Rational>& prices) const {
    for (std::size_t k = 0; k < bounds.size(); ++k) {
      if (prices[k] < bounds[k].low) return false;
      if (bounds[k].high && prices[k] > *bounds[k].high) return false;
    }
    return true;
  }

  /// Point-mass taxation rule at the given prices; the null entry comes first.
  TaxationRule rule_at(const std::vector<Rational>& prices) const {
    const std::size_t m = dim();
    std::vector<TaxEntry> entries{{Allocation::point_mass(m, null_index), Rational(0)}};
    for (std::size_t k = 0; k < bounds.size(); ++k)
      entries.push_back({Allocation::point_mass(m, assignment_of(k)), prices[k]});
    return TaxationRule(std::move(entries));
  }
};

/// Builds the single-agent posted-price rule of a welfare-maximizing mechanism
/// that charges externalities. `others_welfare(available)` must return the best
/// welfare the other agents reach using only the items flagged available.
template <class Welfare>
TaxationRule externality_rule(Welfare&& others_welfare, std::size_t items) {
  std::vector<bool> all(items, true);
  const Rational without_agent = others_welfare(all);
  const std::size_t m = items + 1;
  std::vector<TaxEntry> entries{{Allocation::point_mass(m, 0), Rational(0)}};
  for (std::size_t k = 0; k < items; ++k) {
    std::vector<bool> avail = all;
    avail[k] = false;
    entries.push_back({Allocation::point_mass(m, k + 1), without_agent - others_welfare(avail)});
  }
  return TaxationRule(std::move(entries));
}

namespace detail {

inline Rational unit_demand_welfare(const std::vector<std::pair<Rational, Rational>>& others, std::size_t agent,
                                    bool item1, bool item2) {
  if (agent == others.size()) return 0;
  Rational best = unit_demand_welfare(others, agent + 1, item1, item2);
  if (item1) best = std::max(best, Rational(others[agent].first + unit_demand_welfare(others, agent + 1, false, item2)));
  if (item2) best = std::max(best, Rational(others[agent].second + unit_demand_welfare(others, agent + 1, item1, false)));
  return best;
}

}  // namespace detail

/// VCG for unit-demand agents and two items, from one agent's perspective:
/// entries [(nothing, 0), (item 1, p1), (item 2, p2)] with p_k the externality.
inline TaxationRule vcg_single_agent_rule(const UnitDemandProfile& profile) {
  for (const auto& [v1, v2] : profile.others)
    if (v1 < 0 || v2 < 0) throw ValidationError("unit-demand values must be nonnegative");
  return externality_rule(
      [&](const std::vector<bool>& avail) {
        return detail::unit_demand_welfare(profile.others, 0, avail[0], avail[1]);
      },
      2);
}

/// VCG ranges over every nonnegative price pair, so its harmless set is the deterministic one.
inline bool vcg_harmless_contains(const Vector& theta, const Vector& x) {
  require_same_dim(3, theta.size());
  require_same_dim(3, x.size());
  detail::require_null_zero(theta, 0, "type");
  detail::require_null_zero(x, 0, "report");
  return deterministic_harmless(theta, point_masses(3)).contains(x);
}

struct PriceWitness {
  std::vector<Rational> prices;
  Allocation truthful;
  Allocation misreport;
  Rational benefit;
};

namespace detail {

/// Candidate values on one price axis: breakpoints inside [low, high], the
/// bounds themselves, midpoints between neighbours and one point beyond the
/// largest candidate when the axis is unbounded.
inline std::vector<Rational> axis_candidates(std::vector<Rational> breakpoints, const PriceInterval& iv) {
  std::set<Rational> pts{iv.low};
  if (iv.high) pts.insert(*iv.high);
  for (auto& b : breakpoints)
    if (b >= iv.low && (!iv.high || b <= *iv.high)) pts.insert(std::move(b));
  std::vector<Rational> sorted(pts.begin(), pts.end());
  std::vector<Rational> out;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    out.push_back(sorted[i]);
    if (i + 1 < sorted.size()) out.push_back((sorted[i] + sorted[i + 1]) / 2);
  }
  if (!iv.high) out.push_back(sorted.back() + 1);
  return out;
}

/// Worst allocation theta can be handed at these prices vs. best allocation x can claim.
inline std::optional<PriceWitness> price_benefit(const PriceFamily& family, const std::vector<Rational>& prices,
                                                 const Vector& theta, const Vector& x) {
  const TaxationRule rule = family.rule_at(prices);
  const auto& e = rule.entries();
  std::size_t worst = 0, best = 0;
  bool first = true;
  for (std::size_t idx : rule.best_response_set(theta)) {
    if (first || e[idx].allocation.value(theta) < e[worst].allocation.value(theta)) worst = idx;
    first = false;
  }
  first = true;
  for (std::size_t idx : rule.best_response_set(x)) {
    if (first || e[idx].allocation.value(theta) > e[best].allocation.value(theta)) best = idx;
    first = false;
  }
  Rational gain = e[best].allocation.value(theta) - e[worst].allocation.value(theta);
  if (gain <= 0) return std::nullopt;
  return PriceWitness{prices, e[worst].allocation, e[best].allocation, gain};
}

}  // namespace detail

/// Every price vector the exact decision procedure examines. Best responses of
/// theta and x only change on the lines p_k = y_k and p_1 - p_2 = y_1 - y_2
/// (y in {theta, x}), so one point per face of that arrangement suffices.
inline std::vector<std::vector<Rational>> candidate_price_vectors(const PriceFamily& family, const Vector& theta,
                                                                  const Vector& x) {
  family.validate();
  require_same_dim(family.dim(), theta.size());
  require_same_dim(family.dim(), x.size());
  auto val = [&](const Vector& y, std::size_t k) { return y[family.assignment_of(k)]; };
  std::vector<std::vector<Rational>> out;

  if (family.bounds.size() == 1) {
    for (auto& p : detail::axis_candidates({val(theta, 0), val(x, 0)}, family.bounds[0])) out.push_back({p});
    return out;
  }
  if (family.bounds.size() != 2)
    throw ValidationError("exact price-family decision supports one or two priced assignments");

  const auto& b1 = family.bounds[0];
  const auto& b2 = family.bounds[1];
  std::vector<Rational> horizontals{val(theta, 1), val(x, 1), b2.low};
  if (b2.high) horizontals.push_back(*b2.high);
  std::vector<Rational> diagonals{val(theta, 0) - val(theta, 1), val(x, 0) - val(x, 1)};

  std::vector<Rational> verticals{val(theta, 0), val(x, 0)};
  for (const auto& h : horizontals)
    for (const auto& d : diagonals) verticals.push_back(h + d);

  for (const auto& p1 : detail::axis_candidates(verticals, b1)) {
    std::vector<Rational> cuts{val(theta, 1), val(x, 1)};
    for (const auto& d : diagonals) cuts.push_back(p1 - d);
    for (auto& p2 : detail::axis_candidates(cuts, b2)) out.push_back({p1, std::move(p2)});
  }
  return out;
}

/// Finds admissible prices under which reporting x strictly helps theta for
/// some tie-breaking, or nothing when x is harmless for the whole family.
inline std::optional<PriceWitness> find_price_witness(const Vector& theta, const PriceFamily& family,
                                                      const Vector& x) {
  detail::require_null_zero(theta, family.null_index, "type");
  detail::require_null_zero(x, family.null_index, "report");
  if (theta == x) return std::nullopt;
  for (const auto& p : candidate_price_vectors(family, theta, x))
    if (auto w = detail::price_benefit(family, p, theta, x)) return w;
  return std::nullopt;
}

/// Harmless test over every posted-price rule allowed by the family, across
/// all tie-breaking choices.
inline bool price_family_harmless_contains(const Vector& theta, const PriceFamily& family, const Vector& x) {
  return !find_price_witness(theta, family, x).has_value();
}

}  // namespace pverify
