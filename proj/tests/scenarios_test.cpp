#include "pverify/oracle.hpp"
#include "pverify/scenarios.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace pverify;
using pverify::testing::Q;
using pverify::testing::V;

namespace {

/// Single-item threshold rule seen by one bidder: win iff value >= t.
bool wins(const Rational& value, const Rational& t) { return value >= t; }

/// Candidate v gains from reporting r under threshold t when the report wins and v would not.
bool gains_at(const Rational& r, const Rational& v, const Rational& t) { return wins(r, t) && !wins(v, t) && v > 0; }

FacilityLine unit_line() { return FacilityLine{{Q("0"), Q("1")}, Q("2")}; }

}  // namespace

TEST(SecondPrice, Examples) {
  EXPECT_TRUE(second_price_harmful_contains(1, Q("1/2"), true, Q("3/10")));
  EXPECT_FALSE(second_price_harmful_contains(1, Q("1/2"), true, Q("7/10")));
  for (const char* c : {"0", "1/10", "1", "2"}) EXPECT_FALSE(second_price_harmful_contains(1, Q("3/2"), true, Q(c)));
  EXPECT_TRUE(second_price_harmful_contains(1, 0, false, Q("7/10")));
  EXPECT_THROW(second_price_harmful_contains(-1, 0, false, 0), ValidationError);
}

TEST(SecondPrice, UnionOverThresholdsOnDenseGrid) {
  // Thresholds on a 1/64 grid; inputs on a 1/8 grid keep every interval visible.
  for (int r8 = 0; r8 <= 16; ++r8) {
    const Rational r(r8, 8);
    for (int v8 = 0; v8 <= 20; ++v8) {
      const Rational v(v8, 8);
      bool some = false;
      for (int t64 = 0; t64 <= 160 && !some; ++t64) some = gains_at(r, v, ratio(t64, 64));
      EXPECT_EQ(second_price_harmful_contains(r, 0, false, v), some) << r << " " << v;
      for (int t8 = 0; t8 <= 20; ++t8) {
        const Rational t(t8, 8);
        if (second_price_harmful_contains(r, t, true, v)) {
          EXPECT_TRUE(second_price_harmful_contains(r, 0, false, v));
          EXPECT_TRUE(gains_at(r, v, t));
        }
      }
    }
  }
}

TEST(KMinded, SingleMinded) {
  EXPECT_TRUE(kminded_harmless_contains(1, V({"0", "5"}), V({"0", "3"})));
  EXPECT_FALSE(kminded_harmless_contains(1, V({"0", "5"}), V({"0", "6"})));
  EXPECT_TRUE(kminded_harmless_contains(1, V({"0", "0"}), V({"0", "6"})));
  EXPECT_THROW(kminded_harmless_contains(1, V({"0", "-1"}), V({"0", "6"})), ValidationError);
  EXPECT_THROW(kminded_harmless_contains(3, V({"0", "1", "2", "3"}), V({"0", "1", "2", "3"})), ValidationError);
}

TEST(KMinded, TwoMindedUnderbidCanHurt) {
  const Vector theta = V({"0", "1/2", "3/2"});
  EXPECT_FALSE(kminded_harmless_contains(2, theta, V({"0", "1/10", "7/5"})));
  EXPECT_TRUE(kminded_harmless_contains(2, theta, V({"0", "1/4", "1"})));
  const auto w = search_beneficial_misreport(theta, V({"0", "1/10", "7/5"}), point_masses(3));
  ASSERT_TRUE(w);
  EXPECT_TRUE(verify_witness(*w, theta, V({"0", "1/10", "7/5"})));
  EXPECT_EQ(w->rule.normal(), V({"0", "1", "-1"}));
}

TEST(KMinded, SingleMindedEqualsPairwise) {
  pverify::testing::RandomRationals rng(0x61);
  for (int trial = 0; trial < 500; ++trial) {
    const Vector theta({Rational(0), rng.nonnegative()});
    const Vector x = rng.vector_with_null(2, 0);
    EXPECT_EQ(kminded_harmless_contains(1, theta, x),
              pairwise_harmless(theta, Allocation::point_mass(2, 0), Allocation::point_mass(2, 1)).contains(x));
    // Positive values: harmless exactly for strict underbids and the truth.
    if (theta[1] > 0) {
      EXPECT_EQ(kminded_harmless_contains(1, theta, x), x[1] < theta[1] || x == theta);
    }
  }
}

TEST(Facility, Types) {
  const FacilityLine line{{Q("-1"), Q("2")}, Q("5")};
  EXPECT_EQ(facility_type(0, line), V({"4", "3"}));
  EXPECT_EQ(facility_type(2, line)[1], 5);
  EXPECT_EQ(facility_type(Q("1/2"), FacilityLine{{Q("0"), Q("1")}, Q("1")}), V({"1/2", "1/2"}));
  EXPECT_THROW(facility_type(0, FacilityLine{{Q("1"), Q("1")}, Q("1")}), ValidationError);
}

TEST(Facility, TypesAreOneLipschitz) {
  pverify::testing::RandomRationals rng(0x62);
  for (int trial = 0; trial < 300; ++trial) {
    FacilityLine line{{rng.next(), rng.next()}, rng.nonnegative()};
    if (line.locations[0] == line.locations[1]) continue;
    const Vector t = facility_type(rng.next(), line);
    EXPECT_LE(abs(t[0] - t[1]), abs(line.locations[0] - line.locations[1]));
  }
}

TEST(Facility, CoverageConfigurations) {
  const auto line = unit_line();
  const std::set<VerificationKind> both{VerificationKind::NoUnderbidDistance, VerificationKind::DirectionImposing};
  EXPECT_TRUE(facility_verification_covers(Q("3/10"), line, both));
  EXPECT_FALSE(facility_verification_covers(Q("3/10"), line, {VerificationKind::NoUnderbidDistance}));
  EXPECT_FALSE(facility_verification_covers(Q("3/10"), line, {VerificationKind::DirectionImposing}));
  EXPECT_TRUE(facility_verification_covers(2, line, {}));
  // Without fixed tie-breaking the far side of the right facility is tied, hence harmful.
  FacilityCoverageOptions loose;
  loose.fixed_tie_breaking = false;
  EXPECT_FALSE(facility_verification_covers(2, line, {}, loose));
  EXPECT_TRUE(facility_verification_covers(Q("1/2"), line, {}));  // indifferent agent
}

TEST(Facility, CoverageErrors) {
  const FacilityLine three{{Q("0"), Q("1"), Q("2")}, Q("2")};
  EXPECT_THROW(facility_verification_covers(0, three, {}), ValidationError);
  EXPECT_THROW(facility_verification_covers(0, unit_line(), {VerificationKind::NoOverbid}), ValidationError);
}

TEST(Facility, HarmlessPositionsForAgentBetween) {
  const auto line = unit_line();
  // Agent at 3/10 prefers the facility at 0; claiming to be closer to it is harmful.
  EXPECT_TRUE(facility_harmless_contains(Q("3/10"), line, Q("1/2"), true));
  EXPECT_FALSE(facility_harmless_contains(Q("3/10"), line, Q("1/10"), true));
  EXPECT_FALSE(facility_harmless_contains(Q("3/10"), line, Q("-1/2"), true));
  EXPECT_TRUE(facility_harmless_contains(Q("3/10"), line, Q("3/10"), false));
}
