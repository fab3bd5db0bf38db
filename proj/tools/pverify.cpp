// pverify: command-line front end for harmless/harmful set queries.
//
// Exit codes: 0 success, 1 invalid input, 2 internal invariant violation.

#include "pverify/io/render.hpp"
#include "pverify/io/run.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

using namespace pverify;

io::SliceAxes parse_axes(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) throw ValidationError("--axes expects 'i,j'");
  try {
    return {std::stoul(s.substr(0, comma)), std::stoul(s.substr(comma + 1))};
  } catch (const std::logic_error&) {
    throw ValidationError("--axes expects two nonnegative integers, got '" + s + "'");
  }
}

io::Bounds2 parse_bounds(const std::string& s) {
  std::vector<Rational> v;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) v.push_back(parse_rational(item));
  if (v.size() != 4) throw ValidationError("--bounds expects 'xmin,xmax,ymin,ymax'");
  io::Bounds2 b{v[0], v[1], v[2], v[3]};
  b.validate();
  return b;
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Harmless and harmful misreport sets for partial verification"};
  app.require_subcommand(1);
  std::string scenario_path, out_path, axes_text = "0,1", bounds_text, resolution_text;
  app.add_option("--scenario", scenario_path, "Scenario file")->required();
  app.add_option("--out", out_path, "Output file (default stdout)");
  app.add_option("--axes", axes_text, "Plot axes as assignment indices i,j");
  app.add_option("--bounds", bounds_text, "Plot box xmin,xmax,ymin,ymax (rationals)");
  app.add_option("--resolution", resolution_text, "Grid resolution p/q for cross-checks and verify");
  app.fallthrough();
  const std::pair<const char*, const char*> verbs[] = {
      {"harmless", "Classify queried reports against theta's harmless set"},
      {"harmful", "Classify queried true types against a fixed report"},
      {"witness", "Like harmless, with every witness cross-checked on a grid"},
      {"verify", "Check the scenario's rules for profitable unverified misreports"},
      {"plot", "Render a 2-D slice of the region as SVG"},
  };
  for (const auto& [verb, help] : verbs) app.add_subcommand(verb, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    const io::Verb verb = io::parse_verb(app.get_subcommands().front()->get_name());
    io::RunOptions opt;
    if (!resolution_text.empty()) opt.resolution = parse_rational(resolution_text);
    const io::Scenario sc = io::load_scenario(scenario_path);
    const io::ResultDocument doc = io::run_scenario(sc, verb, opt);
    if (verb == io::Verb::Plot) {
      io::Bounds2 bounds;
      if (!bounds_text.empty()) bounds = parse_bounds(bounds_text);
      write_output(out_path, io::render_regions(doc, parse_axes(axes_text), bounds));
    } else {
      write_output(out_path, io::to_jsonl(doc));
    }
    return 0;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const InvariantViolation& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 2;
  }
}
