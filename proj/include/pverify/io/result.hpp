#pragma once

// Result documents: JSON Lines, one record per line, every rational written
// as a "p/q" (or integer) string so reading back is exact.

#include "pverify/geometry.hpp"
#include "pverify/mechanisms.hpp"
#include "pverify/multiagent.hpp"
#include "pverify/oracle.hpp"

#include <json.hpp>

#include <map>
#include <sstream>

namespace pverify::io {

inline constexpr const char* kFormatVersion = "pverify-result/1";
inline constexpr const char* kLibraryVersion = "0.1.0";

using Json = nlohmann::ordered_json;

struct LineRecord {
  std::string kind;  // "critical" or "indifference"
  Hyperplane plane;
  std::string label;

  bool operator==(const LineRecord&) const = default;
};

struct QueryRecord {
  Vector point;
  bool member = false;

  bool operator==(const QueryRecord&) const = default;
};

struct WitnessRecord {
  std::size_t query = 0;
  std::string kind;  // "separating" or "price"
  // separating rules
  Vector a_i, a_j;
  Rational relative_price;
  std::string tie;  // "i" or "j"
  std::vector<std::pair<Vector, Vector>> overrides;
  std::optional<Rational> epsilon;
  // posted prices
  std::vector<Rational> prices;
  Vector truthful, misreport;
  Rational benefit;
  std::optional<bool> grid_confirms;

  bool operator==(const WitnessRecord&) const = default;

  static WitnessRecord from(std::size_t query, const Witness& w) {
    WitnessRecord r;
    r.query = query;
    r.kind = "separating";
    r.a_i = w.rule.a_i().probs();
    r.a_j = w.rule.a_j().probs();
    r.relative_price = w.rule.relative_price();
    r.tie = w.rule.tie() == TieSide::ToI ? "i" : "j";
    for (const auto& [p, a] : w.rule.overrides()) r.overrides.push_back({p, a.probs()});
    r.epsilon = w.epsilon;
    r.truthful = w.truthful.probs();
    r.misreport = w.misreport.probs();
    r.benefit = w.benefit;
    return r;
  }

  static WitnessRecord from(std::size_t query, const PriceWitness& w) {
    WitnessRecord r;
    r.query = query;
    r.kind = "price";
    r.prices = w.prices;
    r.truthful = w.truthful.probs();
    r.misreport = w.misreport.probs();
    r.benefit = w.benefit;
    return r;
  }

  /// Rebuilds the separating rule so the benefit can be re-checked.
  SeparatingRule rule() const {
    if (kind != "separating") throw ValidationError("witness is not a separating rule");
    SeparatingRule f(Allocation(a_i), Allocation(a_j), relative_price, tie == "i" ? TieSide::ToI : TieSide::ToJ);
    for (const auto& [p, a] : overrides) f.add_override(p, Allocation(a));
    return f;
  }
};

struct ResultDocument {
  std::string scenario;
  std::string operation;
  std::string mode;  // "forward" or "reverse"
  std::string mechanism_class;
  std::string space;
  std::string application;
  std::vector<std::string> assignments;
  Vector anchor;  // theta, or the reported type in reverse mode
  std::vector<ConvexRegion> regions;
  std::vector<Vector> excluded_points;
  std::vector<LineRecord> lines;
  std::vector<QueryRecord> queries;
  std::vector<WitnessRecord> witnesses;
  std::map<std::string, std::string> summary;

  bool operator==(const ResultDocument&) const = default;
};

namespace detail {

inline Json rat_json(const Rational& r) { return to_string(r); }

inline Rational json_rat(const Json& j) {
  if (!j.is_string()) throw ParseError("expected a rational string, got " + j.dump());
  return parse_rational(j.get<std::string>());
}

inline Json vec_json(const Vector& v) {
  Json a = Json::array();
  for (const auto& c : v) a.push_back(rat_json(c));
  return a;
}

inline Vector json_vec(const Json& j) {
  if (!j.is_array()) throw ParseError("expected an array of rationals, got " + j.dump());
  std::vector<Rational> c;
  for (const auto& e : j) c.push_back(json_rat(e));
  return Vector(std::move(c));
}

inline Json rats_json(const std::vector<Rational>& v) {
  Json a = Json::array();
  for (const auto& c : v) a.push_back(rat_json(c));
  return a;
}

inline Json halfspace_json(const Halfspace& h) {
  return Json{{"normal", vec_json(h.hyperplane.normal())},
              {"offset", rat_json(h.hyperplane.offset())},
              {"sense", sense_symbol(h.sense)}};
}

inline Halfspace json_halfspace(const Json& j) {
  const std::string s = j.at("sense").get<std::string>();
  if (s != ">" && s != ">=") throw ParseError("unknown halfspace sense '" + s + "'");
  return Halfspace{Hyperplane(json_vec(j.at("normal")), json_rat(j.at("offset"))),
                   s == ">" ? Sense::StrictGreater : Sense::GreaterEqual};
}

}  // namespace detail

inline std::string to_jsonl(const ResultDocument& doc) {
  using namespace detail;
  std::ostringstream out;
  auto emit = [&](const Json& j) { out << j.dump() << '\n'; };

  emit(Json{{"record", "header"},
            {"format", kFormatVersion},
            {"scenario", doc.scenario},
            {"operation", doc.operation},
            {"mode", doc.mode},
            {"provenance",
             Json{{"mechanism_class", doc.mechanism_class},
                  {"space", doc.space},
                  {"application", doc.application},
                  {"modules", Json{{"pverify", kLibraryVersion}}}}},
            {"assignments", doc.assignments},
            {"anchor", vec_json(doc.anchor)}});
  for (std::size_t k = 0; k < doc.regions.size(); ++k) {
    const auto& r = doc.regions[k];
    Json hs = Json::array();
    for (const auto& h : r.halfspaces()) hs.push_back(halfspace_json(h));
    Json extra = Json::array();
    for (const auto& p : r.extra_points()) extra.push_back(vec_json(p));
    emit(Json{{"record", "region"}, {"index", k}, {"dim", r.dim()}, {"halfspaces", hs}, {"extra_points", extra}});
  }
  for (const auto& p : doc.excluded_points) emit(Json{{"record", "excluded_point"}, {"point", vec_json(p)}});
  for (const auto& l : doc.lines)
    emit(Json{{"record", "line"},
              {"kind", l.kind},
              {"label", l.label},
              {"normal", vec_json(l.plane.normal())},
              {"offset", rat_json(l.plane.offset())}});
  for (std::size_t i = 0; i < doc.queries.size(); ++i)
    emit(Json{{"record", "query"}, {"index", i}, {"point", vec_json(doc.queries[i].point)}, {"member", doc.queries[i].member}});
  for (const auto& w : doc.witnesses) {
    Json j{{"record", "witness"}, {"query", w.query}, {"kind", w.kind}};
    if (w.kind == "separating") {
      j["a_i"] = vec_json(w.a_i);
      j["a_j"] = vec_json(w.a_j);
      j["relative_price"] = rat_json(w.relative_price);
      j["tie"] = w.tie;
      Json ov = Json::array();
      for (const auto& [p, a] : w.overrides) ov.push_back(Json{{"point", vec_json(p)}, {"allocation", vec_json(a)}});
      j["overrides"] = ov;
      if (w.epsilon) j["epsilon"] = rat_json(*w.epsilon);
    } else {
      j["prices"] = rats_json(w.prices);
    }
    j["truthful"] = vec_json(w.truthful);
    j["misreport"] = vec_json(w.misreport);
    j["benefit"] = rat_json(w.benefit);
    if (w.grid_confirms) j["grid_confirms"] = *w.grid_confirms;
    emit(j);
  }
  for (const auto& [k, v] : doc.summary) emit(Json{{"record", "summary"}, {"key", k}, {"value", v}});
  return out.str();
}

inline ResultDocument from_jsonl(std::istream& in) {
  using namespace detail;
  ResultDocument doc;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const Json j = Json::parse(line);
      const std::string rec = j.at("record").get<std::string>();
      if (rec == "header") {
        if (j.at("format").get<std::string>() != kFormatVersion) throw ParseError("unsupported result format");
        doc.scenario = j.at("scenario").get<std::string>();
        doc.operation = j.at("operation").get<std::string>();
        doc.mode = j.at("mode").get<std::string>();
        const auto& p = j.at("provenance");
        doc.mechanism_class = p.at("mechanism_class").get<std::string>();
        doc.space = p.at("space").get<std::string>();
        doc.application = p.at("application").get<std::string>();
        doc.assignments = j.at("assignments").get<std::vector<std::string>>();
        doc.anchor = json_vec(j.at("anchor"));
        header = true;
      } else if (rec == "region") {
        std::vector<Halfspace> hs;
        for (const auto& h : j.at("halfspaces")) hs.push_back(json_halfspace(h));
        std::vector<Vector> extra;
        for (const auto& p : j.at("extra_points")) extra.push_back(json_vec(p));
        doc.regions.emplace_back(j.at("dim").get<std::size_t>(), std::move(hs), std::move(extra));
      } else if (rec == "excluded_point") {
        doc.excluded_points.push_back(json_vec(j.at("point")));
      } else if (rec == "line") {
        doc.lines.push_back(LineRecord{j.at("kind").get<std::string>(),
                                       Hyperplane(json_vec(j.at("normal")), json_rat(j.at("offset"))),
                                       j.at("label").get<std::string>()});
      } else if (rec == "query") {
        doc.queries.push_back(QueryRecord{json_vec(j.at("point")), j.at("member").get<bool>()});
      } else if (rec == "witness") {
        WitnessRecord w;
        w.query = j.at("query").get<std::size_t>();
        w.kind = j.at("kind").get<std::string>();
        if (w.kind == "separating") {
          w.a_i = json_vec(j.at("a_i"));
          w.a_j = json_vec(j.at("a_j"));
          w.relative_price = json_rat(j.at("relative_price"));
          w.tie = j.at("tie").get<std::string>();
          for (const auto& o : j.at("overrides")) w.overrides.push_back({json_vec(o.at("point")), json_vec(o.at("allocation"))});
          if (j.contains("epsilon")) w.epsilon = json_rat(j.at("epsilon"));
        } else if (w.kind == "price") {
          for (const auto& p : j.at("prices")) w.prices.push_back(json_rat(p));
        } else {
          throw ParseError("unknown witness kind '" + w.kind + "'");
        }
        w.truthful = json_vec(j.at("truthful"));
        w.misreport = json_vec(j.at("misreport"));
        w.benefit = json_rat(j.at("benefit"));
        if (j.contains("grid_confirms")) w.grid_confirms = j.at("grid_confirms").get<bool>();
        doc.witnesses.push_back(std::move(w));
      } else if (rec == "summary") {
        doc.summary[j.at("key").get<std::string>()] = j.at("value").get<std::string>();
      } else {
        throw ParseError("unknown record '" + rec + "'");
      }
    } catch (const ParseError& e) {
      throw ParseError("result line " + std::to_string(lineno) + ": " + e.what());
    } catch (const ValidationError& e) {
      throw ParseError("result line " + std::to_string(lineno) + ": " + e.what());
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("result line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!header) throw ParseError("result document has no header record");
  return doc;
}

inline ResultDocument from_jsonl(const std::string& text) {
  std::istringstream in(text);
  return from_jsonl(in);
}

}  // namespace pverify::io
