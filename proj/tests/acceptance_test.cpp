// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "pverify/io/render.hpp"
#include "pverify/io/run.hpp"
#include "pverify/scenarios.hpp"
#include "test_support.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numeric>
#include <sys/wait.h>

using namespace pverify;
using pverify::testing::Q;
using pverify::testing::RandomRationals;
using pverify::testing::V;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void fail(const std::string& why) {
    if (ok) detail = why;
    ok = false;
  }
};

using Seconds = std::chrono::duration<double>;

Outcome pairwise_formula() {
  Outcome out;
  RandomRationals rng(101);
  const Allocation s1 = Allocation::point_mass(2, 0), s2 = Allocation::point_mass(2, 1);
  int mismatches = 0;
  const auto start = std::chrono::steady_clock::now();
  for (int n = 0; n < 1000; ++n) {
    Vector theta = rng.vector(2);
    while (theta[0] == theta[1]) theta = rng.vector(2);
    // Mix in reports on theta, on its critical line, and random ones.
    Vector x = rng.vector(2);
    if (n % 10 == 0) x = theta;
    if (n % 10 == 1) x = theta + Vector::ones(2) * rng.next();
    const bool member = pairwise_harmless(theta, s1, s2).contains(x);
    // Stated for theta preferring s2; the mirrored inequality when it prefers s1.
    const Rational dt = theta[0] - theta[1], dx = x[0] - x[1];
    const bool expected = x == theta || (theta[1] > theta[0] ? dt < dx : dx < dt);
    if (member != expected) ++mismatches;
  }
  const double secs = Seconds(std::chrono::steady_clock::now() - start).count();
  if (mismatches) out.fail(std::to_string(mismatches) + " mismatches");
  if (secs >= 5) out.fail("took " + std::to_string(secs) + " s");
  return out;
}

Outcome deterministic_oracle() {
  Outcome out;
  RandomRationals rng(202);
  int mismatches = 0, bad_witnesses = 0, negatives = 0;
  const auto start = std::chrono::steady_clock::now();
  for (int inst = 0; inst < 500; ++inst) {
    const std::size_t m = 2 + rng.index(3);
    const auto allocs = point_masses(m);
    const Vector theta = rng.vector(m);
    const HarmlessResult h = deterministic_harmless(theta, allocs);
    for (int q = 0; q < 50; ++q) {
      Vector x = rng.vector(m);
      if (q == 0) x = theta;
      if (q == 1) x = theta + Vector::ones(m) * rng.next();  // on every indifference translate
      const auto w = search_beneficial_misreport(theta, x, allocs);
      if (h.contains(x) == w.has_value()) ++mismatches;
      if (w) {
        ++negatives;
        if (!verify_witness(*w, theta, x)) ++bad_witnesses;
      }
    }
  }
  const double secs = Seconds(std::chrono::steady_clock::now() - start).count();
  if (mismatches) out.fail(std::to_string(mismatches) + " mismatches");
  if (bad_witnesses) out.fail(std::to_string(bad_witnesses) + " witnesses failed the benefit check");
  if (negatives == 0) out.fail("no negative answers sampled");
  if (secs >= 60) out.fail("took " + std::to_string(secs) + " s");
  return out;
}

Outcome example2_region() {
  Outcome out;
  const Vector theta = V({"0", "1/2", "3/2"});
  const auto allocs = point_masses(3);
  const ConvexRegion got = deterministic_harmless_region(theta, allocs);
  const ConvexRegion want(3,
                          {{Hyperplane(V({"0", "-1", "0"}), Q("-1/2")), Sense::StrictGreater},
                           {Hyperplane(V({"0", "0", "-1"}), Q("-3/2")), Sense::StrictGreater},
                           {Hyperplane(V({"0", "1", "-1"}), Q("-1")), Sense::StrictGreater}},
                          {theta});
  // The golden system lives on the null slice (first coordinate 0): compare
  // on a fine lattice there, including every boundary.
  for (int a = -4; a <= 12; ++a)
    for (int b = -4; b <= 12; ++b) {
      const Vector p({Rational(0), ratio(a, 4), ratio(b, 4)});
      if (got.contains(p) != want.contains(p)) out.fail("membership differs at " + p.str());
    }
  if (!got.contains(theta)) out.fail("theta missing");
  const auto verts = io::slice_vertices(got, {1, 2}, theta, io::Bounds2{0, 2, 0, 2});
  std::set<io::Point2> got_v(verts.begin(), verts.end());
  const std::set<io::Point2> want_v{{0, 0}, {0, 1}, {Q("1/2"), Q("3/2")}, {Q("1/2"), 0}};
  if (got_v != want_v || verts.size() != 4) out.fail("slice vertices differ");
  return out;
}

Outcome tie_characterization() {
  Outcome out;
  RandomRationals rng(404);
  int failures = 0;
  for (int n = 0; n < 500; ++n) {
    const std::size_t m = 3 + rng.index(2);
    const bool with_null = n % 2 == 1;
    const std::size_t null = rng.index(m);
    Vector theta = rng.distinct_vector(m);
    AllocationSpace space = FullSimplex{m};
    if (with_null) {
      theta = theta - Vector::ones(m) * theta[null];
      space = SubsimplexWithNull{m, null};
    }
    const Rational lam_low = -rng.nonnegative(2) + Rational(n % 3 == 0 ? 1 : 0);  // hits lambda = 1
    const Rational lam_low_clamped = lam_low > 1 ? Rational(1) : lam_low;
    const Rational shift = with_null ? Rational(0) : rng.next();
    const Vector inside = theta * lam_low_clamped + Vector::ones(m) * shift;
    if (!tie_harmless_contains(theta, inside, space)) ++failures;
    if (construct_tie_witness(theta, inside, space)) ++failures;

    const Rational lam_high = 1 + rng.nonnegative(3) + ratio(1, 8);
    const Vector outside = theta * lam_high;
    if (tie_harmless_contains(theta, outside, space)) ++failures;
    const auto w = construct_tie_witness(theta, outside, space);
    if (!w || !verify_witness(*w, theta, outside)) ++failures;

    // Off the ray (and off the ones direction) is never harmless.
    Vector off = theta;
    const std::size_t k = (null + 1) % m;
    off[k] += 1;
    if (with_null && tie_harmless_contains(theta, off, space)) {
      const auto ow = construct_tie_witness(theta, off, space);
      if (ow) ++failures;
    }
    if (with_null && !tie_harmless_contains(theta, off, space)) {
      const auto ow = construct_tie_witness(theta, off, space);
      if (!ow || !verify_witness(*ow, theta, off)) ++failures;
    }
  }
  if (failures) out.fail(std::to_string(failures) + " failures");
  return out;
}

Outcome class_separation() {
  Outcome out;
  RandomRationals rng(505);
  int implication_failures = 0, missing_split = 0;
  for (int n = 0; n < 200; ++n) {
    const std::size_t m = 3 + rng.index(2);
    const Vector theta = rng.distinct_vector(m);
    const auto allocs = point_masses(m);
    const HarmlessResult det = deterministic_harmless(theta, allocs);
    const FullSimplex space{m};

    // Random report plus a shrunken-and-shifted one that is always TIE-harmless.
    // lambda = 1 with a shift is the boundary where the two conventions differ.
    const Vector random_x = rng.vector(m);
    Rational lambda = rng.next(1);
    if (lambda == 1) lambda = ratio(1, 2);
    const Vector scaled_x = theta * lambda + Vector::ones(m) * rng.next();
    for (const Vector& x : {random_x, scaled_x})
      if (tie_harmless_contains(theta, x, space) && !det.contains(x)) ++implication_failures;

    // theta - delta with delta ordered like theta keeps every pairwise gap on
    // the harmless side; some such delta is not parallel to theta modulo ones.
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return theta[a] < theta[b]; });
    bool split = false;
    for (int power = 1; power <= 3 && !split; ++power) {
      Vector delta(m);
      for (std::size_t r = 0; r < m; ++r) {
        Rational v = 1;
        for (int p = 0; p < power; ++p) v *= ratio(static_cast<long>(r + 1), 16);
        delta[order[r]] = v;
      }
      const Vector x = theta - delta;
      if (tie_harmless_contains(theta, x, space) && !det.contains(x)) ++implication_failures;
      split = det.contains(x) && !tie_harmless_contains(theta, x, space);
    }
    if (!split) ++missing_split;
  }
  if (implication_failures) out.fail(std::to_string(implication_failures) + " TIE-harmless reports were not deterministic-harmless");
  if (missing_split) out.fail(std::to_string(missing_split) + " types without a separating report");
  return out;
}

Outcome duality() {
  Outcome out;
  RandomRationals rng(606);
  int mismatches = 0;
  for (int n = 0; n < 1000; ++n) {
    const std::size_t m = 2 + rng.index(3);
    const auto allocs = point_masses(m);
    const Vector reported = rng.vector(m);
    Vector candidate = rng.vector(m);
    if (n % 10 == 0) candidate = reported;
    const bool expected = !deterministic_harmless(candidate, allocs).contains(reported);
    if (harmful_union_contains(reported, allocs, candidate) != expected) ++mismatches;
    if (harmful_union(reported, allocs).contains(candidate) != expected) ++mismatches;
    // The witness oracle agrees from the candidate's side.
    if (search_beneficial_misreport(candidate, reported, allocs).has_value() != expected) ++mismatches;
  }
  if (mismatches) out.fail(std::to_string(mismatches) + " mismatches");
  return out;
}

Outcome vcg_corollary() {
  Outcome out;
  const auto allocs = point_masses(3);
  int mismatches = 0;
  for (const Vector& theta : {V({"0", "1/2", "1"}), V({"0", "3/2", "1/2"}), V({"0", "1", "1"})}) {
    const HarmlessResult det = deterministic_harmless(theta, allocs);
    const PriceFamily family = PriceFamily::nonnegative(2);
    for (int a = 0; a < 50; ++a)
      for (int b = 0; b < 50; ++b) {
        const Vector x({Rational(0), ratio(a, 20), ratio(b, 20)});
        if (price_family_harmless_contains(theta, family, x) != det.contains(x)) ++mismatches;
      }
  }
  if (mismatches) out.fail(std::to_string(mismatches) + " grid mismatches with the unbounded family");

  const Vector theta = V({"0", "1/2", "1"});
  const PriceFamily reserves = PriceFamily::with_reserves({Q("3/2"), Q("3/2")});
  for (int a = 0; a < 50; ++a)
    for (int b = 0; b < 50; ++b) {
      const Vector x({Rational(0), ratio(a, 20), ratio(b, 20)});
      if (x[1] < Q("3/2") && x[2] < Q("3/2") && !price_family_harmless_contains(theta, reserves, x))
        out.fail("report " + x.str() + " below both reserves is not harmless");
    }
  const Vector bad = V({"0", "2", "0"});
  const auto w = find_price_witness(theta, reserves, bad);
  if (!w) out.fail("(0, 2, 0) reported harmless under reserves");
  else if (!reserves.admits(w->prices)) out.fail("reserve witness uses inadmissible prices");
  return out;
}

Outcome kminded() {
  Outcome out;
  RandomRationals rng(808);
  int mismatches = 0;
  for (int n = 0; n < 1000; ++n) {
    Rational v = rng.nonnegative();
    while (v == 0) v = rng.nonnegative();
    Rational w = n % 7 == 0 ? v : rng.nonnegative();
    const bool expected = w <= v;  // underbidding on the single bundle
    if (kminded_harmless_contains(1, Vector({Rational(0), v}), Vector({Rational(0), w})) != expected) ++mismatches;
  }
  if (mismatches) out.fail(std::to_string(mismatches) + " k=1 mismatches");

  const Vector theta = V({"0", "1/2", "3/2"});
  const Vector x = V({"0", "1/10", "7/5"});
  for (std::size_t i = 0; i < 3; ++i)
    if (x[i] > theta[i]) out.fail("k=2 report does not underbid");
  if (kminded_harmless_contains(2, theta, x)) out.fail("k=2 underbid reported harmless");
  const auto wit = search_beneficial_misreport(theta, x, point_masses(3));
  if (!wit || !verify_witness(*wit, theta, x)) out.fail("k=2 witness missing or invalid");
  return out;
}

Outcome facility() {
  Outcome out;
  const FacilityLine line{{Rational(0), Rational(1)}, Rational(2)};
  const Rational between = Q("3/10");
  using VK = VerificationKind;
  FacilityCoverageOptions fixed;
  fixed.fixed_tie_breaking = true;
  const bool both = facility_verification_covers(between, line, {VK::NoUnderbidDistance, VK::DirectionImposing}, fixed);
  const bool one = facility_verification_covers(between, line, {VK::NoUnderbidDistance}, fixed);
  const bool outside = facility_verification_covers(Rational(2), line, {}, fixed);
  if (!both) out.fail("between with both verifications not covered");
  if (one) out.fail("between with one verification covered");
  if (!outside) out.fail("outside with fixed tie-breaking not covered");
  return out;
}

std::string slurp_cli(const std::string& args, int& status) {
  const std::string cmd = std::string(PVERIFY_CLI) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) {
    status = -1;
    return {};
  }
  std::string text;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) text.append(buf, n);
  const int raw = pclose(pipe);
  status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return text;
}

Outcome determinism() {
  Outcome out;
  const std::string dir = PVERIFY_SCENARIO_DIR;
  const std::vector<std::string> runs{
      "harmless --scenario " + dir + "/three_assignments.scn",
      "witness --scenario " + dir + "/tie_full_simplex.scn",
      "harmful --scenario " + dir + "/reverse_union.scn",
      "harmless --scenario " + dir + "/reserve_prices.scn",
      "verify --scenario " + dir + "/verify_none.scn",
      "plot --scenario " + dir + "/three_assignments.scn --axes 1,2",
      "plot --scenario " + dir + "/reverse_single_rule.scn",
  };
  for (const auto& args : runs) {
    int s1 = 0, s2 = 0;
    const std::string a = slurp_cli(args, s1);
    const std::string b = slurp_cli(args, s2);
    if (s1 != 0 || s2 != 0) out.fail("'" + args + "' exited with " + std::to_string(s1));
    else if (a != b) out.fail("'" + args + "' output differs between runs");
    else if (a.empty()) out.fail("'" + args + "' produced no output");
  }
  return out;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"pairwise characterization", pairwise_formula},
      {"deterministic oracle equivalence", deterministic_oracle},
      {"three-assignment golden region", example2_region},
      {"expectation characterization", tie_characterization},
      {"class separation", class_separation},
      {"reverse duality", duality},
      {"VCG and reserve prices", vcg_corollary},
      {"k-minded bidders", kminded},
      {"facility coverage", facility},
      {"CLI determinism", determinism},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    const double secs = Seconds(std::chrono::steady_clock::now() - start).count();
    char timing[32];
    std::snprintf(timing, sizeof timing, "%.2fs", secs);
    std::cout << (o.ok ? "PASS" : "FAIL") << " criterion " << (k + 1) << ": " << criteria[k].first << " (" << timing
              << ")" << (o.ok ? "" : " - " + o.detail) << std::endl;
    if (!o.ok) ++failed;
  }
  return failed ? 1 : 0;
}
