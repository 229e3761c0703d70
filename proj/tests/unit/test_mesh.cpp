#include "airy/delaunay.hpp"
#include "airy/mesh.hpp"

#include <gtest/gtest.h>

#include <numbers>
#include <random>
#include <sstream>

using namespace airy;

namespace {

PerforatedDomain two_defect_domain() {
  DefectConfiguration cfg;
  cfg.add(Dislocation{{-0.4, 0.0}, {1.0, 0.0}}).add(Disclination{{0.4, 0.1}, 0.5});
  return build_perforated_domain(OuterBoundary::disk({0, 0}, 1), cfg, 0.15);
}

double signed_area(const Mesh& m, std::size_t t) {
  const auto& tr = m.triangles[t];
  return 0.5 * cross(m.vertices[tr[1]] - m.vertices[tr[0]], m.vertices[tr[2]] - m.vertices[tr[0]]);
}

} // namespace

TEST(Delaunay, EmptyCircumcircles) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<Vec2> pts(300);
  for (auto& p : pts) p = {u(rng), u(rng)};
  const auto tris = delaunay_triangulate(pts);
  ASSERT_FALSE(tris.empty());
  for (const auto& t : tris) {
    const Vec2 a = pts[t[0]], b = pts[t[1]], c = pts[t[2]];
    ASSERT_GT(cross(b - a, c - a), 0.0);
    // circumcentre
    const double d = 2 * (a[0] * (b[1] - c[1]) + b[0] * (c[1] - a[1]) + c[0] * (a[1] - b[1]));
    const Vec2 o((a.squaredNorm() * (b[1] - c[1]) + b.squaredNorm() * (c[1] - a[1]) + c.squaredNorm() * (a[1] - b[1])) / d,
                 (a.squaredNorm() * (c[0] - b[0]) + b.squaredNorm() * (a[0] - c[0]) + c.squaredNorm() * (b[0] - a[0])) / d);
    const double r = (a - o).norm();
    for (std::size_t k = 0; k < pts.size(); ++k) {
      if (static_cast<int>(k) == t[0] || static_cast<int>(k) == t[1] || static_cast<int>(k) == t[2]) continue;
      EXPECT_GT((pts[k] - o).norm(), r * (1 - 1e-9));
    }
  }
}

TEST(Delaunay, RejectsDuplicates) {
  EXPECT_THROW(delaunay_triangulate({{0, 0}, {1, 0}, {0, 1}, {0, 0}}), std::invalid_argument);
}

TEST(GenerateMesh, ConformsToTheDomain) {
  const PerforatedDomain dom = two_defect_domain();
  const double h = 0.15 / 4;
  const Mesh m = generate_mesh(dom, h);
  EXPECT_GT(m.min_angle_deg(), 20.0);
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    EXPECT_GT(signed_area(m, t), 0.0);
    const auto& tr = m.triangles[t];
    const Vec2 c = (m.vertices[tr[0]] + m.vertices[tr[1]] + m.vertices[tr[2]]) / 3.0;
    EXPECT_TRUE(dom.contains(c));
  }
  // boundary vertices sit on the exact circles
  for (std::size_t v = 0; v < m.num_vertices(); ++v) {
    const int loop = m.vertex_loop[v];
    if (loop < 0) continue;
    const Vec2 centre = loop == 0 ? Vec2::Zero() : dom.cores()[loop - 1].center;
    const double radius = loop == 0 ? 1.0 : 0.15;
    EXPECT_NEAR((m.vertices[v] - centre).norm(), radius, 1e-12);
  }
  const double exact = std::numbers::pi * (1.0 - 2 * 0.15 * 0.15);
  EXPECT_NEAR(m.area(), exact, 2e-3 * exact);
  EXPECT_NEAR(m.loop_length(1), 2 * std::numbers::pi * 0.15, 1e-3);
}

TEST(GenerateMesh, BoundaryEdgesKeepTheDomainOnTheLeft) {
  const PerforatedDomain dom = two_defect_domain();
  const Mesh m = generate_mesh(dom, 0.05);
  for (const auto& e : m.boundary_edges) {
    const Vec2 a = m.vertices[e.a], b = m.vertices[e.b];
    const Vec2 mid = 0.5 * (a + b);
    // a chord sags by |b - a|^2 / (8 r) into the core, so step well past it
    const Vec2 left = mid + 0.3 * Vec2(-(b - a)[1], (b - a)[0]);
    EXPECT_TRUE(dom.contains(left)) << "loop " << e.loop;
  }
}

TEST(GenerateMesh, GradesTowardTheCores) {
  const PerforatedDomain dom = two_defect_domain();
  const MeshOptions opt;
  const double h = 0.04;
  EXPECT_NEAR(mesh_size_at(dom, h, opt, {-0.4 + 0.15, 0.0}), 0.25 * h, 1e-12);
  EXPECT_NEAR(mesh_size_at(dom, h, opt, {0.0, 0.9}), h, 1e-12);
}

TEST(GenerateMesh, IsDeterministicAndRejectsCoarseSizes) {
  const PerforatedDomain dom = two_defect_domain();
  const Mesh a = generate_mesh(dom, 0.05), b = generate_mesh(dom, 0.05);
  EXPECT_EQ(a.vertices, b.vertices);
  EXPECT_EQ(a.triangles, b.triangles);
  EXPECT_THROW(generate_mesh(dom, 0.15), ValidationError);
}

TEST(RefineUniform, QuadruplesAndKeepsCirclesExact) {
  const PerforatedDomain dom = two_defect_domain();
  const Mesh m = generate_mesh(dom, 0.05);
  const Mesh r = refine_uniform(m, dom);
  EXPECT_EQ(r.num_triangles(), 4 * m.num_triangles());
  EXPECT_EQ(r.boundary_edges.size(), 2 * m.boundary_edges.size());
  const double exact = std::numbers::pi * (1.0 - 2 * 0.15 * 0.15);
  EXPECT_LT(std::abs(r.area() - exact), std::abs(m.area() - exact));
  for (std::size_t v = 0; v < r.num_vertices(); ++v) {
    if (r.vertex_loop[v] == 2) {
      EXPECT_NEAR((r.vertices[v] - Vec2(0.4, 0.1)).norm(), 0.15, 1e-12);
    }
  }
}

TEST(TriangleLocator, FindsContainingTriangles) {
  const PerforatedDomain dom = two_defect_domain();
  const Mesh m = generate_mesh(dom, 0.05);
  const TriangleLocator loc(m);
  for (std::size_t t = 0; t < m.num_triangles(); t += 37) {
    const auto& tr = m.triangles[t];
    const Vec2 c = (m.vertices[tr[0]] + 2 * m.vertices[tr[1]] + 3 * m.vertices[tr[2]]) / 6.0;
    const auto p = loc.locate(c);
    ASSERT_TRUE(p.has_value());
    EXPECT_EQ(p->triangle, static_cast<int>(t));
    EXPECT_NEAR(p->bary[2], 0.5, 1e-12);
  }
  EXPECT_FALSE(loc.locate({-0.4, 0.0}).has_value());
  EXPECT_FALSE(loc.locate({2.0, 0.0}).has_value());
}

TEST(WriteMesh, ListsVerticesTrianglesAndBoundary) {
  const PerforatedDomain dom = two_defect_domain();
  const Mesh m = generate_mesh(dom, 0.1);
  std::ostringstream os;
  write_mesh(os, m);
  std::istringstream is(os.str());
  std::string word;
  std::size_t nv = 0, nt = 0, nb = 0;
  std::string line;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    ls >> word;
    nv += word == "vertex";
    nt += word == "triangle";
    nb += word == "boundary";
  }
  EXPECT_EQ(nv, m.num_vertices());
  EXPECT_EQ(nt, m.num_triangles());
  EXPECT_EQ(nb, m.boundary_edges.size());
}
