#include "pverify/geometry.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace pverify;
using pverify::testing::Q;
using pverify::testing::V;

TEST(Rational, ParsesIntegersFractionsAndDecimals) {
  EXPECT_EQ(parse_rational("3"), Rational(3));
  EXPECT_EQ(parse_rational("-7/14"), ratio(-1, 2));
  EXPECT_EQ(parse_rational("0.25"), ratio(1, 4));
  EXPECT_EQ(parse_rational("-1.5"), ratio(-3, 2));
  EXPECT_THROW(parse_rational("1/0"), ParseError);
  EXPECT_THROW(parse_rational("abc"), ParseError);
  EXPECT_THROW(parse_rational(""), ParseError);
  EXPECT_EQ(to_string(ratio(6, 4)), "3/2");
}

TEST(Halfspace, StrictAndClosedSenses) {
  const Hyperplane p(V({"1", "-1"}), -2);
  EXPECT_TRUE(halfspace_contains({p, Sense::StrictGreater}, V({"2", "3"})));
  EXPECT_FALSE(halfspace_contains({p, Sense::StrictGreater}, V({"1", "3"})));
  EXPECT_TRUE(halfspace_contains({p, Sense::GreaterEqual}, V({"1", "3"})));
}

TEST(Hyperplane, RejectsZeroNormalAndMismatchedDimension) {
  EXPECT_THROW(Hyperplane(V({"0", "0"}), 1), ValidationError);
  const Hyperplane p(V({"1", "0"}), 0);
  EXPECT_THROW(p.signed_value(V({"1", "2", "3"})), DimensionMismatch);
}

TEST(ConvexRegion, WholeSpaceAndExtraPoints) {
  EXPECT_TRUE(ConvexRegion::whole_space().contains(V({"-9", "4"})));
  ConvexRegion r(2, {{Hyperplane(V({"1", "0"}), 1), Sense::StrictGreater}});
  EXPECT_FALSE(r.contains(V({"0", "5"})));
  r.add_extra_point(V({"0", "5"}));
  EXPECT_TRUE(r.contains(V({"0", "5"})));
  EXPECT_TRUE(region_contains(r, V({"2", "0"})));
  EXPECT_THROW(r.contains(V({"1"})), DimensionMismatch);
}

TEST(IntersectRegions, Examples) {
  const ConvexRegion whole = intersect_regions({ConvexRegion::whole_space(), ConvexRegion::whole_space()});
  EXPECT_TRUE(whole.is_whole_space());

  const ConvexRegion a(2, {{Hyperplane(V({"1", "0"}), 0), Sense::StrictGreater}});
  const ConvexRegion b(2, {{Hyperplane(V({"0", "1"}), 0), Sense::StrictGreater}});
  const ConvexRegion both = intersect_regions({a, b});
  EXPECT_TRUE(both.contains(V({"1", "1"})));
  EXPECT_FALSE(both.contains(V({"1", "-1"})));

  // The three pairwise regions of the three-assignment example, written out by hand.
  const ConvexRegion p01(3, {{Hyperplane(V({"1", "-1", "0"}), Q("-1/2")), Sense::StrictGreater}});
  const ConvexRegion p02(3, {{Hyperplane(V({"1", "0", "-1"}), Q("-3/2")), Sense::StrictGreater}});
  const ConvexRegion p12(3, {{Hyperplane(V({"0", "1", "-1"}), Q("-1")), Sense::StrictGreater}});
  EXPECT_TRUE(intersect_regions({p01, p02, p12}).contains(V({"0", "1/4", "1"})));
}

TEST(IntersectRegions, ExtraPointKeptOnlyWhenEveryInputHasIt) {
  ConvexRegion a(1, {{Hyperplane(V({"1"}), 0), Sense::StrictGreater}}, {V({"0"})});
  ConvexRegion b(1, {{Hyperplane(V({"-1"}), -5), Sense::StrictGreater}}, {V({"0"})});
  ConvexRegion c(1, {{Hyperplane(V({"-1"}), -5), Sense::StrictGreater}});
  EXPECT_TRUE(intersect_regions({a, b}).contains(V({"0"})));
  // c contains 0 through its halfspace, so the point survives.
  EXPECT_TRUE(intersect_regions({a, c}).contains(V({"0"})));
  ConvexRegion d(1, {{Hyperplane(V({"1"}), 1), Sense::StrictGreater}});
  EXPECT_FALSE(intersect_regions({a, d}).contains(V({"0"})));
}

TEST(Projection, Examples) {
  EXPECT_EQ(project_onto_span(Span{{V({"1", "1"})}}, V({"2", "0"})), V({"1", "1"}));
  EXPECT_EQ(project_onto_span(Span{{V({"1", "0"}), V({"0", "1"})}}, V({"3", "7"})), V({"3", "7"}));
  // Dependent basis vectors are reduced first.
  EXPECT_EQ(project_onto_span(Span{{V({"1", "1"}), V({"2", "2"})}}, V({"2", "0"})), V({"1", "1"}));
  EXPECT_EQ(project_onto_span(Span{}, V({"2", "0"})), V({"0", "0"}));
}

TEST(Rank, CountsIndependentVectors) {
  const std::vector<Vector> vs{V({"1", "0", "1"}), V({"2", "0", "2"}), V({"0", "1", "0"}), V({"1", "1", "1"})};
  EXPECT_EQ(rank(vs), 2u);
}

TEST(ProjectionProperties, IdempotentAndOrthogonal) {
  pverify::testing::RandomRationals rng(0x9e0);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t m = 2 + rng.index(4);
    Span s;
    const std::size_t k = 1 + rng.index(m + 1);
    for (std::size_t i = 0; i < k; ++i) s.basis.push_back(rng.vector(m));
    const Vector x = rng.vector(m);
    const Vector px = project_onto_span(s, x);
    EXPECT_EQ(project_onto_span(s, px), px);
    for (const auto& b : s.basis) EXPECT_EQ((x - px).dot(b), 0);
  }
}

TEST(IntersectProperties, ContainsDistributesOverIntersection) {
  pverify::testing::RandomRationals rng(0x1e5);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t m = 2 + rng.index(3);
    std::vector<ConvexRegion> rs;
    const std::size_t n = 1 + rng.index(4);
    for (std::size_t i = 0; i < n; ++i) {
      ConvexRegion r(m);
      const std::size_t h = rng.index(3);
      for (std::size_t j = 0; j < h; ++j) {
        Vector normal = rng.vector(m);
        if (normal.is_zero()) normal[0] = 1;
        r.add_halfspace({Hyperplane(normal, rng.next()), rng.coin() ? Sense::StrictGreater : Sense::GreaterEqual});
      }
      if (rng.coin()) r.add_extra_point(rng.vector(m, 2, 2));
      rs.push_back(std::move(r));
    }
    const ConvexRegion all = intersect_regions(rs);
    for (int q = 0; q < 10; ++q) {
      const Vector x = rng.vector(m, 2, 2);
      const bool expected = std::all_of(rs.begin(), rs.end(), [&](const ConvexRegion& r) { return r.contains(x); });
      EXPECT_EQ(all.contains(x), expected) << x.str();
    }
  }
}
