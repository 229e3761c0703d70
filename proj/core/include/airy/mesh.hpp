#pragma once

#include "airy/domain.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

namespace airy {

/// Boundary edge oriented as in its (counter-clockwise) triangle, so the
/// domain lies to its left.
struct BoundaryEdge {
  int a = 0;
  int b = 0;
  int loop = 0;
};

struct Mesh {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<BoundaryEdge> boundary_edges;
  std::vector<int> vertex_loop; // -1 for interior vertices
  double h = 0.0;

  std::size_t num_vertices() const noexcept { return vertices.size(); }
  std::size_t num_triangles() const noexcept { return triangles.size(); }

  double triangle_area(std::size_t t) const;
  double area() const;
  double min_angle_deg() const;
  double loop_length(int loop) const;
};

struct MeshOptions {
  double core_size_factor = 0.25;   // element size on core boundaries, relative to h
  double grading_distance = 2.0;    // ramp length to size h, in units of eps
  std::uint64_t seed = 0x5eed;
  int smoothing_passes = 3;
  double min_angle_deg = 10.0;
};

/// Target element size at x.
double mesh_size_at(const PerforatedDomain& dom, double h, const MeshOptions& opt, const Vec2& x);

/// Conforming Delaunay triangulation of the perforated domain. Circles are
/// replaced by inscribed polygons whose vertices lie exactly on the circles.
/// Throws ValidationError if h >= eps and std::runtime_error if the result
/// has a triangle with an angle below opt.min_angle_deg.
Mesh generate_mesh(const PerforatedDomain& dom, double h, const MeshOptions& opt = {});

/// Red refinement (every triangle into four); new boundary vertices are
/// projected onto the exact boundary circles.
Mesh refine_uniform(const Mesh& mesh, const PerforatedDomain& dom);

/// Plain-text dump: "vertex i x y", "triangle i a b c", "boundary a b loop".
void write_mesh(std::ostream& os, const Mesh& mesh);

struct PointLocation {
  int triangle = -1;
  std::array<double, 3> bary{};
};

/// Uniform-grid point location over the triangles of a mesh.
class TriangleLocator {
public:
  explicit TriangleLocator(const Mesh& mesh);

  /// Containing triangle; points within `tolerance` of the mesh are snapped to
  /// the nearest triangle (with barycentrics clamped to it).
  std::optional<PointLocation> locate(const Vec2& x, double tolerance = 0.0) const;

private:
  const Mesh* mesh_;
  Vec2 lo_;
  double cell_ = 1.0;
  int nx_ = 1, ny_ = 1;
  std::vector<int> start_;
  std::vector<int> items_;
};

std::array<double, 3> barycentric(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& x);

} // namespace airy
