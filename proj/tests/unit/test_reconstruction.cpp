#include "airy/reconstruction.hpp"

#include <gtest/gtest.h>

using namespace airy;

namespace {

const MaterialParams kMat(1.0, 0.3);

struct Solved {
  std::shared_ptr<const PerforatedDomain> domain;
  EquilibriumRun run;
};

Solved solve(const DefectConfiguration& cfg, double eps, double h) {
  auto dom = std::make_shared<PerforatedDomain>(build_perforated_domain(OuterBoundary::disk({0, 0}, 1), cfg, eps));
  auto mesh = std::make_shared<Mesh>(generate_mesh(*dom, h));
  return {dom, solve_on_mesh(dom, mesh, kMat)};
}

DefectConfiguration mixed() {
  DefectConfiguration cfg;
  cfg.add(Dislocation{{-0.35, 0.05}, {1.0, 0.5}}).add(Disclination{{0.3, -0.1}, 0.4});
  return cfg;
}

} // namespace

TEST(Reconstruction, CompatibleStrainClosesExactly) {
  // u = (x^2 + 2xy, y^2 - xy)
  CompatibilityField f;
  f.strain = [](const Vec2& x) { return SymTensor2{2 * x[0] + 2 * x[1], (2 * x[0] - x[1]) / 2, 2 * x[1] - x[0]}; };
  f.rotation_gradient = [](const Vec2&) { return Vec2(1.0, 0.5); };
  const Solved s = solve(mixed(), 0.12, 0.06);
  const Mesh& mesh = s.run.space->mesh();
  const Vec2 base = deepest_interior_point(*s.domain);
  ReconstructionOptions opt;
  opt.closure_tolerance = 1e-10;
  const Reconstruction r = reconstruct_displacement(f, mesh, *s.domain, base, {}, opt);
  ASSERT_EQ(r.mismatch.size(), 2u);
  for (const LoopMismatch& m : r.mismatch) {
    EXPECT_GT(m.crossings, 0);
    EXPECT_NEAR(m.rotation_jump, 0.0, 1e-12);
    EXPECT_LT(m.displacement_jump.norm(), 1e-12);
    EXPECT_LT(m.raw_jump.norm(), 1e-12);
  }
  // u itself, up to the rigid motion fixed at the base vertex
  const Vec2 b = mesh.vertices[r.base_vertex];
  const auto u = [](const Vec2& x) { return Vec2(x[0] * x[0] + 2 * x[0] * x[1], x[1] * x[1] - x[0] * x[1]); };
  const double omega_b = (2 * b[0] + b[1]) / 2;
  for (std::size_t v = 0; v < mesh.num_vertices(); v += 17) {
    const Vec2 d = mesh.vertices[v] - b;
    const Vec2 expect = u(mesh.vertices[v]) - u(b) - omega_b * rotate_quarter_cw(d);
    EXPECT_LT((r.displacement[v] - expect).norm(), 1e-12);
  }
}

TEST(Reconstruction, PlasticStrainJumpsByTheCharges) {
  const Solved s = solve(mixed(), 0.12, 0.03);
  const CompatibilityField f = compatibility_from_airy(plastic_jets(s.run.solution), kMat);
  const Reconstruction r =
      reconstruct_displacement(f, s.run.space->mesh(), *s.domain, deepest_interior_point(*s.domain));
  EXPECT_NEAR(r.mismatch[0].rotation_jump, 0.0, 1e-8);
  EXPECT_LT((r.mismatch[0].displacement_jump - Vec2(1.0, 0.5)).norm(), 1e-8);
  EXPECT_NEAR(r.mismatch[1].rotation_jump, 0.4, 1e-8);
  EXPECT_LT(r.mismatch[1].displacement_jump.norm(), 1e-8);
}

TEST(Reconstruction, ElasticPartIsCompatibleAndTotalCarriesTheCharges) {
  const Solved s = solve(mixed(), 0.12, 0.03);
  const auto recovery = std::make_shared<GradLaplacianRecovery>(s.run.solution.potential, plastic_jets(s.run.solution));
  const Mesh& mesh = s.run.space->mesh();
  const Vec2 base = deepest_interior_point(*s.domain);
  const Reconstruction el = reconstruct_displacement(elastic_compatibility(s.run.solution, recovery), mesh, *s.domain, base);
  for (const LoopMismatch& m : el.mismatch) {
    EXPECT_NEAR(m.rotation_jump, 0.0, 1e-3);
    EXPECT_LT(m.displacement_jump.norm(), 1e-2);
  }
  EXPECT_LT(el.closure_defect, 0.05);
  const Reconstruction tot = reconstruct_displacement(total_compatibility(s.run.solution, recovery), mesh, *s.domain, base);
  EXPECT_NEAR(tot.mismatch[0].rotation_jump, 0.0, 1e-3);
  EXPECT_LT((tot.mismatch[0].displacement_jump - Vec2(1.0, 0.5)).norm(), 0.02 * Vec2(1.0, 0.5).norm());
  EXPECT_NEAR(tot.mismatch[1].rotation_jump, 0.4, 0.02 * 0.4);
}

TEST(LoopCharges, MatchTheInputCharges) {
  const Solved s = solve(mixed(), 0.12, 0.03);
  const auto recovery = std::make_shared<GradLaplacianRecovery>(s.run.solution.potential, plastic_jets(s.run.solution));
  const LoopCharges lc = loop_charges(s.run.solution, recovery);
  ASSERT_EQ(lc.radius.size(), 2u);
  for (double r : lc.radius) {
    EXPECT_GT(r, 0.12);
    EXPECT_LE(r, 1.5 * 0.12 + 1e-15);
  }
  EXPECT_NEAR(lc.charges.frank[0], 0.0, 1e-2);
  EXPECT_LT((lc.charges.burgers[0] - Vec2(1.0, 0.5)).norm(), 0.02 * Vec2(1.0, 0.5).norm());
  EXPECT_NEAR(lc.charges.frank[1], 0.4, 0.02 * 0.4);
  EXPECT_LT(lc.charges.burgers[1].norm(), 1e-2);
}

TEST(GradLaplacianRecovery, IsExactForCubics) {
  const Solved s = solve(mixed(), 0.12, 0.06);
  const auto cubic = [](const Vec2& x) {
    return std::pair<double, Vec2>(x[0] * x[0] * x[0] - 2 * x[0] * x[1] * x[1],
                                   Vec2(3 * x[0] * x[0] - 2 * x[1] * x[1], -4 * x[0] * x[1]));
  };
  const DiscreteField f(s.run.space, interpolate(*s.run.space, cubic));
  const GradLaplacianRecovery rec(f);
  // lap = 6x - 4x = 2x
  for (const Vec2& g : rec.vertex_values()) EXPECT_LT((g - Vec2(2.0, 0.0)).norm(), 1e-8);
  EXPECT_LT((rec({0.0, 0.5}) - Vec2(2.0, 0.0)).norm(), 1e-8);
}

TEST(CutDirections, RaysAreDisjoint) {
  const Solved s = solve(mixed(), 0.12, 0.06);
  const auto dirs = choose_cut_directions(*s.domain);
  ASSERT_EQ(dirs.size(), 2u);
  for (const Vec2& d : dirs) EXPECT_NEAR(d.norm(), 1.0, 1e-12);
  const Vec2 p = s.domain->cores()[0].center, q = s.domain->cores()[1].center;
  // parametric intersection of the two rays
  const double den = cross(dirs[0], dirs[1]);
  if (std::abs(den) > 1e-12) {
    const double t = cross(q - p, dirs[1]) / den, u = cross(q - p, dirs[0]) / den;
    EXPECT_FALSE(t > 0 && u > 0 && t < 2 && u < 2);
  }
  const Vec2 base = deepest_interior_point(*s.domain);
  EXPECT_GT(s.domain->distance_to_cores(base), 0.2);
}
