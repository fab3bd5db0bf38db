#pragma once

// Scenario files: one "key: value" entry per line, '#' starts a comment.
// Rationals are written as "p/q", integers or finite decimals. The full key
// list is documented in docs/scenario-format.md.

#include "pverify/harmless.hpp"
#include "pverify/multiagent.hpp"
#include "pverify/scenarios.hpp"

#include <fstream>
#include <map>
#include <sstream>

namespace pverify::io {

enum class Application { None, Vcg, PriceFamily, KMinded, SecondPrice, Facility };

struct RuleSpec {
  enum class Kind { Separating, Inverted, Taxation } kind = Kind::Separating;
  // separating / inverted: allocation indices and relative price
  std::size_t i = 0, j = 1;
  Rational relative_price;
  TieSide tie = TieSide::ToI;
  // taxation: one price per allocation, in allocation order
  std::vector<Rational> prices;
};

struct Scenario {
  std::string name = "unnamed";
  std::vector<std::string> assignments;
  std::optional<std::size_t> null_index;
  MechanismKind kind = MechanismKind::Deterministic;
  std::string space_name = "point_masses";
  std::vector<Allocation> allocations;  // explicit or derived point masses
  std::optional<Vector> theta;
  std::optional<Vector> reported_theta;
  std::optional<TypeBox> type_space;
  std::vector<Vector> queries;
  std::vector<Vector> grid;
  Application application = Application::None;
  std::vector<RuleSpec> rules;
  std::string verification = "none";

  // application options
  std::vector<PriceInterval> price_bounds;
  int k = 0;
  std::optional<Rational> threshold;
  bool allocation_dependent = false;
  std::vector<Rational> facility_locations;
  Rational facility_benefit = 0;
  std::set<VerificationKind> verifications;
  bool fixed_tie_breaking = true;
  std::optional<Rational> resolution;

  std::size_t dim() const { return assignments.size(); }
  bool forward() const { return theta.has_value(); }

  AllocationSpace space() const {
    if (space_name == "full_simplex") return FullSimplex{dim()};
    if (space_name == "subsimplex_with_null") return SubsimplexWithNull{dim(), null_index.value_or(0)};
    return ExplicitAllocations{allocations};
  }

  MechanismClass mechanism_class() const { return MechanismClass{kind, space()}; }

  AnyRule build_rule(const RuleSpec& r) const {
    if (r.kind != RuleSpec::Kind::Taxation) {
      if (r.i >= allocations.size() || r.j >= allocations.size())
        throw ValidationError("rule refers to an allocation index out of range");
      SeparatingRule f(allocations[r.i], allocations[r.j], r.relative_price, r.tie);
      if (r.kind == RuleSpec::Kind::Separating) return f;
      // Swaps the two sides of the threshold; not truthful without verification.
      return FunctionRule("inverted", [f](const Vector& x) {
        return f.allocate(x) == f.a_i() ? f.a_j() : f.a_i();
      });
    }
    if (r.prices.size() != allocations.size())
      throw ValidationError("taxation rule needs one price per allocation");
    std::vector<TaxEntry> entries;
    for (std::size_t i = 0; i < allocations.size(); ++i) entries.push_back({allocations[i], r.prices[i]});
    return TaxationRule(std::move(entries));
  }
};

namespace detail {

inline std::vector<std::string> split_words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

struct LineContext {
  std::size_t line = 0;
  std::size_t value_column = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("line " + std::to_string(line) + ", column " + std::to_string(value_column) + ": " + msg);
  }
};

}  // namespace detail

inline Scenario parse_scenario(std::istream& in) {
  Scenario sc;
  std::string raw;
  detail::LineContext ctx;
  std::vector<std::pair<detail::LineContext, std::vector<std::string>>> pending_allocations, pending_rules;
  std::optional<std::pair<detail::LineContext, std::string>> null_label;

  while (std::getline(in, raw)) {
    ++ctx.line;
    std::string line = raw.substr(0, raw.find('#'));
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) {
      ctx.value_column = line.find_first_not_of(" \t") + 1;
      ctx.fail("expected 'key: value'");
    }
    const auto key_words = detail::split_words(line.substr(0, colon));
    if (key_words.size() != 1) {
      ctx.value_column = 1;
      ctx.fail("malformed key");
    }
    const std::string key = key_words[0];
    const std::string value = line.substr(colon + 1);
    ctx.value_column = colon + 2 + (value.find_first_not_of(" \t") == std::string::npos ? 0 : value.find_first_not_of(" \t"));
    const auto words = detail::split_words(value);

    auto rat = [&](const std::string& w) {
      try {
        return parse_rational(w);
      } catch (const ParseError& e) {
        ctx.fail(e.what());
      }
    };
    auto vec = [&] {
      if (words.empty()) ctx.fail("expected at least one coordinate");
      std::vector<Rational> c;
      for (const auto& w : words) c.push_back(rat(w));
      return Vector(std::move(c));
    };
    auto single = [&]() -> const std::string& {
      if (words.size() != 1) ctx.fail("expected a single value for '" + key + "'");
      return words[0];
    };
    auto boolean = [&] {
      const auto& w = single();
      if (w == "true") return true;
      if (w == "false") return false;
      ctx.fail("expected true or false");
    };

    if (key == "name") {
      sc.name = single();
    } else if (key == "assignments") {
      sc.assignments = words;
    } else if (key == "null") {
      null_label = {ctx, single()};
    } else if (key == "class") {
      const auto& w = single();
      if (w == "deterministic") sc.kind = MechanismKind::Deterministic;
      else if (w == "universally_truthful") sc.kind = MechanismKind::UniversallyTruthful;
      else if (w == "truthful_in_expectation") sc.kind = MechanismKind::TruthfulInExpectation;
      else ctx.fail("unknown mechanism class '" + w + "'");
    } else if (key == "space") {
      const auto& w = single();
      if (w != "point_masses" && w != "explicit" && w != "full_simplex" && w != "subsimplex_with_null")
        ctx.fail("unknown allocation space '" + w + "'");
      sc.space_name = w;
    } else if (key == "allocation") {
      pending_allocations.push_back({ctx, words});
    } else if (key == "theta") {
      sc.theta = vec();
    } else if (key == "reported_theta") {
      sc.reported_theta = vec();
    } else if (key == "query") {
      sc.queries.push_back(vec());
    } else if (key == "grid") {
      sc.grid.push_back(vec());
    } else if (key == "type_space") {
      if (words.empty()) ctx.fail("expected all, nonnegative or box bounds");
      if (words[0] == "all") {
        sc.type_space.reset();
      } else if (words[0] == "nonnegative") {
        sc.type_space = TypeBox{};  // sized once assignments are known
      } else if (words[0] == "box") {
        TypeBox box;
        if ((words.size() - 1) % 2 != 0) ctx.fail("box needs lower/upper pairs");
        for (std::size_t i = 1; i + 1 < words.size(); i += 2) {
          box.lower.push_back(words[i] == "*" ? std::nullopt : std::optional<Rational>(rat(words[i])));
          box.upper.push_back(words[i + 1] == "*" ? std::nullopt : std::optional<Rational>(rat(words[i + 1])));
        }
        sc.type_space = box;
      } else {
        ctx.fail("unknown type space '" + words[0] + "'");
      }
    } else if (key == "application") {
      const auto& w = single();
      static const std::map<std::string, Application> apps{
          {"none", Application::None},         {"vcg", Application::Vcg},
          {"price_family", Application::PriceFamily}, {"kminded", Application::KMinded},
          {"second_price", Application::SecondPrice}, {"facility", Application::Facility}};
      auto it = apps.find(w);
      if (it == apps.end()) ctx.fail("unknown application '" + w + "'");
      sc.application = it->second;
    } else if (key == "price_bounds") {
      if (words.empty() || words.size() % 2 != 0) ctx.fail("price_bounds needs low/high pairs");
      sc.price_bounds.clear();
      for (std::size_t i = 0; i < words.size(); i += 2) {
        PriceInterval iv{rat(words[i]), std::nullopt};
        if (words[i + 1] != "inf") iv.high = rat(words[i + 1]);
        sc.price_bounds.push_back(iv);
      }
    } else if (key == "k") {
      const Rational kv = rat(single());
      if (kv.get_den() != 1 || kv < 1 || kv > 1000) ctx.fail("k must be a positive integer");
      sc.k = static_cast<int>(kv.get_num().get_si());
    } else if (key == "threshold") {
      sc.threshold = rat(single());
    } else if (key == "allocation_dependent") {
      sc.allocation_dependent = boolean();
    } else if (key == "facility_locations") {
      sc.facility_locations.clear();
      for (const auto& w : words) sc.facility_locations.push_back(rat(w));
    } else if (key == "facility_benefit") {
      sc.facility_benefit = rat(single());
    } else if (key == "verifications") {
      sc.verifications.clear();
      for (const auto& w : words) {
        if (w == "no_underbid_distance") sc.verifications.insert(VerificationKind::NoUnderbidDistance);
        else if (w == "direction_imposing") sc.verifications.insert(VerificationKind::DirectionImposing);
        else if (w == "no_overbid") sc.verifications.insert(VerificationKind::NoOverbid);
        else if (w == "no_overbid_on_received") sc.verifications.insert(VerificationKind::NoOverbidOnReceived);
        else if (w != "none") ctx.fail("unknown verification '" + w + "'");
      }
    } else if (key == "fixed_tie_breaking") {
      sc.fixed_tie_breaking = boolean();
    } else if (key == "rule") {
      pending_rules.push_back({ctx, words});
    } else if (key == "verification") {
      const auto& w = single();
      if (w != "none" && w != "all" && w != "no_overbid" && w != "minimal")
        ctx.fail("unknown verification set '" + w + "'");
      sc.verification = w;
    } else if (key == "resolution") {
      sc.resolution = rat(single());
      if (*sc.resolution <= 0) ctx.fail("resolution must be positive");
    } else {
      ctx.value_column = raw.find_first_not_of(" \t") + 1;
      ctx.fail("unknown key '" + key + "'");
    }
  }

  // Cross-field validation.
  const bool facility = sc.application == Application::Facility;
  if (!facility && sc.assignments.size() < 2) throw ParseError("scenario needs 'assignments' with at least two labels");
  if (facility && sc.assignments.empty()) sc.assignments = {"left", "right"};
  if (null_label) {
    auto idx = std::find(sc.assignments.begin(), sc.assignments.end(), null_label->second);
    if (idx == sc.assignments.end()) null_label->first.fail("null label is not an assignment");
    sc.null_index = static_cast<std::size_t>(idx - sc.assignments.begin());
  }
  (void)AssignmentSet(sc.assignments, sc.null_index);

  const std::size_t m = sc.dim();
  for (auto& [c, words] : pending_allocations) {
    try {
      sc.allocations.push_back(Allocation(Vector::parse(words)));
      require_same_dim(m, sc.allocations.back().dim());
    } catch (const ValidationError& e) {
      c.fail(e.what());
    }
  }
  if (sc.space_name == "point_masses" || (sc.allocations.empty() && sc.space_name != "explicit"))
    sc.allocations = point_masses(m);
  if (sc.space_name == "explicit" && sc.allocations.size() < 2)
    throw ParseError("explicit allocation space needs at least two 'allocation' lines");
  if (sc.space_name == "subsimplex_with_null" && !sc.null_index)
    throw ParseError("subsimplex_with_null requires a 'null' assignment");

  for (auto& [c, words] : pending_rules) {
    RuleSpec r;
    if (words.empty()) c.fail("empty rule");
    try {
      if ((words[0] == "separating" || words[0] == "inverted") && words.size() == 5) {
        r.kind = words[0] == "separating" ? RuleSpec::Kind::Separating : RuleSpec::Kind::Inverted;
        r.i = std::stoul(words[1]);
        r.j = std::stoul(words[2]);
        r.relative_price = parse_rational(words[3]);
        if (words[4] != "i" && words[4] != "j") c.fail("separating tie side must be i or j");
        r.tie = words[4] == "i" ? TieSide::ToI : TieSide::ToJ;
      } else if (words[0] == "taxation") {
        r.kind = RuleSpec::Kind::Taxation;
        for (std::size_t i = 1; i < words.size(); ++i) r.prices.push_back(parse_rational(words[i]));
      } else {
        c.fail("expected 'separating|inverted <i> <j> <price> <i|j>' or 'taxation <prices...>'");
      }
      (void)sc.build_rule(r);
    } catch (const ParseError& e) {
      throw;
    } catch (const std::exception& e) {
      c.fail(e.what());
    }
    sc.rules.push_back(r);
  }

  if (sc.theta.has_value() == sc.reported_theta.has_value())
    throw ParseError("scenario needs exactly one of 'theta' (forward) or 'reported_theta' (reverse)");
  const Vector& anchor = sc.theta ? *sc.theta : *sc.reported_theta;
  const std::size_t vec_dim = facility ? 1 : m;
  auto check_dim = [&](const Vector& v, const char* what) {
    if (v.size() != vec_dim)
      throw ParseError(std::string(what) + " " + v.str() + " has dimension " + std::to_string(v.size()) +
                       ", expected " + std::to_string(vec_dim));
  };
  check_dim(anchor, sc.theta ? "theta" : "reported_theta");
  for (const auto& q : sc.queries) check_dim(q, "query");
  for (const auto& g : sc.grid) check_dim(g, "grid point");
  if (sc.type_space) {
    if (sc.type_space->lower.empty() && sc.type_space->upper.empty()) *sc.type_space = TypeBox::nonnegative_orthant(m);
    if (sc.type_space->lower.size() != m) throw ParseError("type_space box needs one bound pair per assignment");
  }
  if (sc.application == Application::PriceFamily && sc.price_bounds.empty())
    throw ParseError("price_family application needs 'price_bounds'");
  if (facility && sc.facility_locations.size() != 2)
    throw ParseError("facility application needs two 'facility_locations'");
  if (facility && !sc.forward()) throw ParseError("facility application runs in forward mode ('theta' is the agent position)");
  if (sc.application == Application::SecondPrice && sc.forward())
    throw ParseError("second_price application runs in reverse mode ('reported_theta')");
  if (sc.application == Application::SecondPrice && sc.allocation_dependent && !sc.threshold)
    throw ParseError("allocation-dependent second price needs a 'threshold'");
  return sc;
}

inline Scenario parse_scenario_text(const std::string& text) {
  std::istringstream in(text);
  return parse_scenario(in);
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open scenario file '" + path + "'");
  try {
    return parse_scenario(in);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

}  // namespace pverify::io
