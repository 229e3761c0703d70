#include "airy/domain.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace airy;

namespace {

DefectConfiguration two_defects() {
  DefectConfiguration cfg;
  cfg.add(Dislocation{{-0.4, 0.0}, {1.0, 0.0}}).add(Disclination{{0.4, 0.1}, 0.5});
  return cfg;
}

} // namespace

TEST(OuterBoundary, DiskGeometry) {
  const OuterBoundary d = OuterBoundary::disk({1.0, -1.0}, 2.0);
  EXPECT_TRUE(d.is_disk());
  EXPECT_TRUE(d.contains({1.5, -1.0}));
  EXPECT_FALSE(d.contains({3.5, -1.0}));
  EXPECT_NEAR(d.distance_to_boundary({1.5, -1.0}), 1.5, 1e-15);
  EXPECT_NEAR(d.area(), 4 * std::numbers::pi, 1e-13);
  const auto [lo, hi] = d.bounding_box();
  EXPECT_EQ(lo, Vec2(-1.0, -3.0));
  EXPECT_EQ(hi, Vec2(3.0, 1.0));
}

TEST(OuterBoundary, PolygonValidation) {
  EXPECT_THROW(OuterBoundary::polygon({{0, 0}, {1, 0}}), ValidationError);
  EXPECT_THROW(OuterBoundary::polygon({{0, 0}, {0, 1}, {1, 1}, {1, 0}}), ValidationError); // clockwise
  EXPECT_THROW(OuterBoundary::polygon({{0, 0}, {1, 1}, {1, 0}, {0, 1}}), ValidationError); // bow tie
  const OuterBoundary sq = OuterBoundary::polygon({{0, 0}, {2, 0}, {2, 1}, {0, 1}});
  EXPECT_NEAR(sq.area(), 2.0, 1e-15);
  EXPECT_TRUE(sq.contains({1.0, 0.5}));
  EXPECT_NEAR(sq.distance_to_boundary({1.0, 0.3}), 0.3, 1e-15);
}

TEST(PerforatedDomain, ExcludesClosedCoreDisks) {
  const PerforatedDomain dom = build_perforated_domain(OuterBoundary::disk({0, 0}, 1), two_defects(), 0.15);
  EXPECT_EQ(dom.num_cores(), 2u);
  EXPECT_EQ(dom.num_loops(), 3);
  EXPECT_FALSE(dom.contains({-0.4, 0.0}));
  EXPECT_FALSE(dom.contains({-0.4, 0.15})); // on the circle
  EXPECT_TRUE(dom.contains({0.0, 0.0}));
  EXPECT_EQ(dom.core_containing({0.45, 0.1}), 1);
  EXPECT_EQ(dom.core_containing({0.0, 0.0}), -1);
  EXPECT_NEAR(dom.distance_to_cores({0.0, 0.0}), 0.25, 1e-15);
}

TEST(PerforatedDomain, CoreRadiusMustBeStrictlyBelowBound) {
  const auto outer = OuterBoundary::disk({0, 0}, 1);
  DefectConfiguration cfg;
  cfg.add(Disclination{{-0.2, 0}, 0.1}).add(Disclination{{0.2, 0}, 0.1});
  EXPECT_NO_THROW(build_perforated_domain(outer, cfg, 0.19));
  try {
    build_perforated_domain(outer, cfg, 0.2);
    FAIL() << "eps = eps0 accepted";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("defects 0 and 1"), std::string::npos) << e.what();
  }
  EXPECT_THROW(build_perforated_domain(outer, DefectConfiguration{}, 0.1), ValidationError);
  EXPECT_THROW(build_perforated_domain(outer, cfg, 0.0), ValidationError);
}

TEST(BoundaryLoop, CircleOrientationConventions) {
  const Vec2 c(0.4, 0.1);
  const BoundaryLoop ccw = circle_loop(c, 0.3, 64);
  const BoundaryLoop cw = circle_loop(c, 0.3, 64, Traversal::Clockwise);
  EXPECT_NEAR(ccw.length(), 2 * std::numbers::pi * 0.3, 1e-13);
  for (const auto& p : ccw.nodes) {
    EXPECT_NEAR((p.x - c).norm(), 0.3, 1e-15);
    EXPECT_TRUE(p.n.isApprox(rotate_quarter_cw(p.t)));
    EXPECT_GT(p.n.dot(p.x - c), 0.0); // counter-clockwise: Pi t points away from the centre
  }
  for (const auto& p : cw.nodes) EXPECT_LT(p.n.dot(p.x - c), 0.0); // clockwise: toward the centre
}

TEST(BoundaryLoop, DomainLoopsFollowTheRequestedTraversal) {
  const PerforatedDomain dom = build_perforated_domain(OuterBoundary::disk({0, 0}, 1), two_defects(), 0.15);
  const BoundaryLoop core = boundary_loop(dom, PerforatedDomain::core_loop_id(1), 128, Traversal::Clockwise);
  EXPECT_EQ(core.loop_id, 2);
  EXPECT_TRUE(core.center.isApprox(Vec2(0.4, 0.1)));
  EXPECT_NEAR(core.radius, 0.15, 1e-15);
  // signed area through the line integral int x dy
  const double area = line_integral(core, [](const Vec2& x, const Vec2&, const Vec2& t) { return x[0] * t[1]; });
  EXPECT_NEAR(area, -std::numbers::pi * 0.15 * 0.15, 1e-12);
}

TEST(BoundaryLoop, PolygonLoopsIntegrateExactly) {
  const OuterBoundary sq = OuterBoundary::polygon({{0, 0}, {2, 0}, {2, 1}, {0, 1}});
  DefectConfiguration cfg;
  cfg.add(Disclination{{1.0, 0.5}, 0.2});
  const PerforatedDomain dom = build_perforated_domain(sq, cfg, 0.2);
  const BoundaryLoop outer = boundary_loop(dom, PerforatedDomain::outer_loop_id(), 8);
  EXPECT_NEAR(outer.length(), 6.0, 1e-14);
  // int x^3 dy = int 3x^2 dA = 8 over the rectangle (Green)
  const double g = line_integral(outer, [](const Vec2& x, const Vec2&, const Vec2& t) { return x[0] * x[0] * x[0] * t[1]; });
  EXPECT_NEAR(g, 8.0, 1e-13);
}

TEST(GaussLegendre, ExactThroughDegreeTwoMMinusOne) {
  for (int m = 1; m <= 12; ++m) {
    const auto rule = gauss_legendre(m);
    ASSERT_EQ(rule.size(), static_cast<std::size_t>(m));
    for (int d = 0; d <= 2 * m - 1; ++d) {
      double s = 0.0;
      for (const auto& [x, w] : rule) s += w * std::pow(x, d);
      const double exact = d % 2 ? 0.0 : 2.0 / (d + 1);
      EXPECT_NEAR(s, exact, 1e-13) << "m=" << m << " d=" << d;
    }
  }
  EXPECT_THROW(gauss_legendre(0), std::invalid_argument);
}
