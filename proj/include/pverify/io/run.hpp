#pragma once

// Scenario dispatch: picks the module for the scenario's class, mode and
// application and collects the answers into a ResultDocument.

#include "pverify/io/result.hpp"
#include "pverify/io/scenario.hpp"
#include "pverify/oracle.hpp"
#include "pverify/reverse.hpp"
#include "pverify/scenarios.hpp"

namespace pverify::io {

enum class Verb { Harmless, Harmful, Witness, Verify, Plot };

inline Verb parse_verb(const std::string& s) {
  if (s == "harmless") return Verb::Harmless;
  if (s == "harmful") return Verb::Harmful;
  if (s == "witness") return Verb::Witness;
  if (s == "verify") return Verb::Verify;
  if (s == "plot") return Verb::Plot;
  throw ValidationError("unknown verb '" + s + "'");
}

inline const char* verb_name(Verb v) {
  switch (v) {
    case Verb::Harmless: return "harmless";
    case Verb::Harmful: return "harmful";
    case Verb::Witness: return "witness";
    case Verb::Verify: return "verify";
    case Verb::Plot: return "plot";
  }
  return "?";
}

inline const char* application_name(Application a) {
  switch (a) {
    case Application::None: return "none";
    case Application::Vcg: return "vcg";
    case Application::PriceFamily: return "price_family";
    case Application::KMinded: return "kminded";
    case Application::SecondPrice: return "second_price";
    case Application::Facility: return "facility";
  }
  return "?";
}

struct RunOptions {
  /// Grid spacing for witness cross-checks and generated verification grids.
  std::optional<Rational> resolution;
};

namespace detail {

inline Rational resolution_of(const Scenario& sc, const RunOptions& opt) {
  if (opt.resolution) {
    if (*opt.resolution <= 0) throw ValidationError("resolution must be positive");
    return *opt.resolution;
  }
  return sc.resolution.value_or(ratio(1, 2));
}

inline void add_pair_lines(ResultDocument& doc, const Vector& anchor, std::span<const Allocation> allocs) {
  for (std::size_t i = 0; i < allocs.size(); ++i)
    for (std::size_t j = i + 1; j < allocs.size(); ++j) {
      const std::string tag = std::to_string(i) + "," + std::to_string(j);
      doc.lines.push_back({"indifference", indifference_hyperplane(allocs[i], allocs[j]), tag});
      if (allocs[i].value(anchor) != allocs[j].value(anchor))
        doc.lines.push_back({"critical", critical_hyperplane(anchor, allocs[i], allocs[j]), tag});
    }
}

inline void require_in_type_space(const Scenario& sc, const Vector& q) {
  if (sc.type_space && !sc.type_space->contains(q))
    throw ValidationError("query " + q.str() + " lies outside the scenario's type space");
}

inline std::string space_label(const Scenario& sc) {
  if (sc.application != Application::None) return "point_masses";
  return sc.space_name;
}

inline ResultDocument header(const Scenario& sc, Verb verb) {
  ResultDocument doc;
  doc.scenario = sc.name;
  doc.operation = verb_name(verb);
  doc.mode = sc.forward() ? "forward" : "reverse";
  doc.mechanism_class = kind_name(sc.kind);
  doc.space = space_label(sc);
  doc.application = application_name(sc.application);
  doc.assignments = sc.assignments;
  doc.anchor = sc.forward() ? *sc.theta : *sc.reported_theta;
  return doc;
}

inline void check_witness(const Witness& w, const Vector& theta, const Vector& x) {
  if (!verify_witness(w, theta, x)) throw InvariantViolation("witness for " + x.str() + " failed re-verification");
}

/// Forward mode: membership for every query plus a witness for each "false".
inline ResultDocument run_forward(const Scenario& sc, Verb verb, const RunOptions& opt) {
  ResultDocument doc = header(sc, verb);
  const Vector& theta = *sc.theta;
  if (sc.type_space) require_in_type_space(sc, theta);
  for (const auto& q : sc.queries) require_in_type_space(sc, q);
  const bool cross_check = verb == Verb::Witness;
  const Rational res = resolution_of(sc, opt);

  auto record = [&](std::size_t k, bool member) { doc.queries.push_back({sc.queries[k], member}); };
  auto missing = [&](std::size_t k) {
    throw InvariantViolation("no witness found for non-harmless query " + sc.queries[k].str());
  };

  switch (sc.application) {
    case Application::None: {
      const MechanismClass cls = sc.mechanism_class();
      HarmlessResult h = harmless_for_class(theta, cls);
      if (sc.type_space) h = restrict_to(h, *sc.type_space);
      if (h.region) doc.regions.push_back(*h.region);
      const bool tie = sc.kind == MechanismKind::TruthfulInExpectation;
      const bool simplex = std::holds_alternative<FullSimplex>(cls.space) ||
                           std::holds_alternative<SubsimplexWithNull>(cls.space);
      const std::vector<Allocation> allocs = simplex ? point_masses(sc.dim()) : sc.allocations;
      if (!tie) add_pair_lines(doc, theta, allocs);
      for (std::size_t k = 0; k < sc.queries.size(); ++k) {
        const Vector& q = sc.queries[k];
        const bool member = h.contains(q);
        record(k, member);
        if (member) continue;
        auto w = tie ? construct_tie_witness(theta, q, cls.space) : search_beneficial_misreport(theta, q, allocs);
        if (!w) missing(k);
        check_witness(*w, theta, q);
        WitnessRecord rec = WitnessRecord::from(k, *w);
        if (cross_check && (!tie || !simplex)) rec.grid_confirms = !grid_harmless(theta, q, allocs, res);
        doc.witnesses.push_back(std::move(rec));
      }
      break;
    }
    case Application::Vcg:
    case Application::PriceFamily: {
      if (sc.dim() != 3 && sc.application == Application::Vcg)
        throw ValidationError("vcg application needs three assignments (nothing, item 1, item 2)");
      const PriceFamily family = sc.application == Application::Vcg
                                     ? PriceFamily::nonnegative(2)
                                     : PriceFamily{sc.price_bounds, sc.null_index.value_or(0)};
      family.validate();
      require_same_dim(family.dim(), sc.dim());
      if (sc.application == Application::Vcg) {
        HarmlessResult h = deterministic_harmless(theta, point_masses(3));
        doc.regions.push_back(*h.region);
        add_pair_lines(doc, theta, point_masses(3));
      }
      for (std::size_t k = 0; k < sc.queries.size(); ++k) {
        const Vector& q = sc.queries[k];
        const auto w = find_price_witness(theta, family, q);
        if (sc.application == Application::Vcg && vcg_harmless_contains(theta, q) == w.has_value())
          throw InvariantViolation("price sweep disagrees with the deterministic region at " + q.str());
        record(k, !w);
        if (!w) continue;
        WitnessRecord rec = WitnessRecord::from(k, *w);
        if (cross_check) rec.grid_confirms = !grid_harmless(theta, q, family, res);
        doc.witnesses.push_back(std::move(rec));
      }
      break;
    }
    case Application::KMinded: {
      const auto allocs = point_masses(sc.dim());
      if (sc.k + 1 != static_cast<int>(sc.dim())) throw ValidationError("k-minded scenario needs k + 1 assignments");
      doc.regions.push_back(*deterministic_harmless(theta, allocs).region);
      add_pair_lines(doc, theta, allocs);
      for (std::size_t k = 0; k < sc.queries.size(); ++k) {
        const Vector& q = sc.queries[k];
        const bool member = kminded_harmless_contains(sc.k, theta, q);
        record(k, member);
        if (member) continue;
        auto w = search_beneficial_misreport(theta, q, allocs);
        if (!w) missing(k);
        check_witness(*w, theta, q);
        WitnessRecord rec = WitnessRecord::from(k, *w);
        if (cross_check) rec.grid_confirms = !grid_harmless(theta, q, allocs, res);
        doc.witnesses.push_back(std::move(rec));
      }
      break;
    }
    case Application::Facility: {
      const FacilityLine line{sc.facility_locations, sc.facility_benefit};
      const Rational agent = theta[0];
      const Vector t = facility_type(agent, line);
      const auto allocs = point_masses(2);
      for (std::size_t k = 0; k < sc.queries.size(); ++k) {
        const Rational y = sc.queries[k][0];
        const bool member = facility_harmless_contains(agent, line, y, sc.fixed_tie_breaking);
        record(k, member);
        if (member) continue;
        const Vector ty = facility_type(y, line);
        auto w = search_beneficial_misreport(t, ty, allocs);
        if (!w) missing(k);
        check_witness(*w, t, ty);
        WitnessRecord rec = WitnessRecord::from(k, *w);
        if (cross_check) rec.grid_confirms = !grid_harmless(t, ty, allocs, res);
        doc.witnesses.push_back(std::move(rec));
      }
      FacilityCoverageOptions copt;
      copt.fixed_tie_breaking = sc.fixed_tie_breaking;
      doc.summary["coverage"] = facility_verification_covers(agent, line, sc.verifications, copt) ? "true" : "false";
      doc.summary["facility_type"] = t.str();
      break;
    }
    case Application::SecondPrice:
      throw ValidationError("second_price application runs in reverse mode");
  }
  return doc;
}

/// Reverse mode: which candidate true types would gain from the reported type.
inline ResultDocument run_reverse(const Scenario& sc, Verb verb) {
  ResultDocument doc = header(sc, verb);
  const Vector& reported = *sc.reported_theta;
  for (const auto& q : sc.queries) require_in_type_space(sc, q);

  if (sc.application == Application::SecondPrice) {
    if (sc.dim() != 2) throw ValidationError("second_price needs two assignments (no item, item)");
    const std::size_t item = sc.null_index.value_or(0) == 0 ? 1 : 0;
    const std::size_t null = 1 - item;
    pverify::detail::require_null_zero(reported, null, "reported type");
    const Rational threshold = sc.threshold.value_or(Rational(0));
    const Rational bound = sc.allocation_dependent ? threshold : reported[item];
    ConvexRegion region(2);
    const Vector e = Vector::unit(2, item);
    region.add_halfspace({Hyperplane(e, 0), Sense::StrictGreater});
    if (sc.allocation_dependent && threshold > reported[item])
      region.add_halfspace({Hyperplane(-e, 0), Sense::StrictGreater});  // empty
    else
      region.add_halfspace({Hyperplane(-e, -bound), Sense::StrictGreater});
    doc.regions.push_back(region);
    doc.lines.push_back({"critical", Hyperplane(e, bound), "bound"});
    for (const auto& q : sc.queries) {
      pverify::detail::require_null_zero(q, null, "candidate");
      const bool member = second_price_harmful_contains(reported[item], threshold, sc.allocation_dependent, q[item]);
      if (member != region.contains(q)) throw InvariantViolation("second-price region disagrees at " + q.str());
      doc.queries.push_back({q, member});
    }
    return doc;
  }
  if (sc.application != Application::None)
    throw ValidationError(std::string("application '") + application_name(sc.application) + "' has no reverse mode");
  if (sc.kind == MechanismKind::TruthfulInExpectation && sc.rules.empty())
    throw ValidationError("reverse mode over a randomized family needs explicit 'rule' lines");

  if (sc.rules.empty()) {
    HarmfulResult h = harmful_union(reported, sc.allocations);
    doc.regions = *h.pieces;
    doc.excluded_points = h.excluded_points;
    add_pair_lines(doc, reported, sc.allocations);
    for (std::size_t k = 0; k < sc.queries.size(); ++k) {
      const Vector& c = sc.queries[k];
      const bool member = h.contains(c);
      doc.queries.push_back({c, member});
      if (!member) continue;
      // The certificate: a rule under which c gains by reporting the reported type.
      auto w = search_beneficial_misreport(c, reported, sc.allocations);
      if (!w) throw InvariantViolation("harmful candidate " + c.str() + " has no beneficial rule");
      check_witness(*w, c, reported);
      doc.witnesses.push_back(WitnessRecord::from(k, *w));
    }
    return doc;
  }

  std::vector<AnyRule> rules;
  for (const auto& r : sc.rules) rules.push_back(sc.build_rule(r));
  if (rules.size() == 1) {
    if (const auto* f = std::get_if<SeparatingRule>(&rules.front())) {
      const PairwiseHarmfulCase c = pairwise_harmful_cases(reported, *f);
      doc.regions.push_back(c.region);
      doc.excluded_points = c.excluded_points;
      doc.summary["case"] = std::to_string(c.label);
      doc.lines.push_back({"indifference", indifference_hyperplane(f->a_i(), f->a_j()), "rule"});
      doc.lines.push_back({"critical", f->boundary(), "rule"});
    }
  }
  for (const auto& c : sc.queries)
    doc.queries.push_back({c, harmful_intersection_contains<AnyRule>(reported, rules, c)});
  return doc;
}

inline std::vector<Vector> lattice(std::size_t m, std::optional<std::size_t> null, const Rational& res) {
  std::vector<Rational> axis;
  for (Rational v = 0; v <= 2; v += res) axis.push_back(v);
  std::vector<Vector> out;
  std::vector<std::size_t> idx(m, 0);
  while (true) {
    Vector v(m);
    for (std::size_t k = 0; k < m; ++k) v[k] = (null && *null == k) ? Rational(0) : axis[idx[k]];
    out.push_back(std::move(v));
    std::size_t k = 0;
    while (k < m && (++idx[k] == axis.size() || (null && *null == k))) idx[k++] = 0;
    if (k == m) break;
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline ResultDocument run_verify(const Scenario& sc, const RunOptions& opt) {
  ResultDocument doc = header(sc, Verb::Verify);
  if (sc.rules.empty()) throw ValidationError("verify needs at least one 'rule' line");
  std::vector<Vector> grid = sc.grid;
  if (grid.empty()) {
    grid = lattice(sc.dim(), sc.null_index, resolution_of(sc, opt));
  }
  const MechanismClass cls = sc.mechanism_class();
  VerificationSet v = VerificationSet::none();
  if (sc.verification == "all") v = VerificationSet::all();
  else if (sc.verification == "no_overbid") v = VerificationSet::no_overbid();
  else if (sc.verification == "minimal")
    v = VerificationSet([cls](const Vector& t, const Vector& r) { return !harmless_for_class(t, cls).contains(r); });

  bool all_truthful = true;
  for (std::size_t k = 0; k < sc.rules.size(); ++k) {
    const AnyRule rule = sc.build_rule(sc.rules[k]);
    const auto bad = find_unverified_misreport(rule, v, grid);
    const std::string key = "rule_" + std::to_string(k);
    doc.summary[key + "_truthful"] = bad ? "false" : "true";
    if (bad) {
      doc.summary[key + "_violation"] = bad->true_type.str() + " -> " + bad->reported.str();
      all_truthful = false;
    }
  }
  doc.summary["truthful"] = all_truthful ? "true" : "false";
  doc.summary["verification"] = sc.verification;
  doc.summary["grid_points"] = std::to_string(grid.size());
  return doc;
}

}  // namespace detail

inline ResultDocument run_scenario(const Scenario& sc, Verb verb, const RunOptions& opt = {}) {
  switch (verb) {
    case Verb::Harmless:
    case Verb::Witness:
      if (!sc.forward()) throw ValidationError(std::string(verb_name(verb)) + " needs a forward scenario ('theta')");
      return detail::run_forward(sc, verb, opt);
    case Verb::Harmful:
      if (sc.forward()) throw ValidationError("harmful needs a reverse scenario ('reported_theta')");
      return detail::run_reverse(sc, verb);
    case Verb::Verify:
      return detail::run_verify(sc, opt);
    case Verb::Plot:
      return sc.forward() ? detail::run_forward(sc, verb, opt) : detail::run_reverse(sc, verb);
  }
  throw InvariantViolation("unhandled verb");
}

/// Reads a scenario file and answers it in the mode the file declares.
inline ResultDocument run_scenario(const std::string& path, const RunOptions& opt = {}) {
  const Scenario sc = load_scenario(path);
  return run_scenario(sc, sc.forward() ? Verb::Harmless : Verb::Harmful, opt);
}

}  // namespace pverify::io
