#pragma once

#include "airy/defects.hpp"
#include "airy/geometry.hpp"

#include <functional>
#include <vector>

namespace airy {

struct Core {
  Vec2 center = Vec2::Zero();
  double radius = 0.0;
};

/// Outer body minus N core disks of common radius eps. Core i hosts the
/// i-th extended defect; boundary loop ids are 0 for the outer boundary and
/// i + 1 for core i.
class PerforatedDomain {
public:
  PerforatedDomain(OuterBoundary outer, std::vector<ExtendedDefect> defects, double eps);

  const OuterBoundary& outer() const noexcept { return outer_; }
  const std::vector<Core>& cores() const noexcept { return cores_; }
  const std::vector<ExtendedDefect>& defects() const noexcept { return defects_; }
  std::size_t num_cores() const noexcept { return cores_.size(); }
  double eps() const noexcept { return eps_; }
  int num_loops() const noexcept { return static_cast<int>(cores_.size()) + 1; }

  static constexpr int outer_loop_id() noexcept { return 0; }
  static constexpr int core_loop_id(std::size_t core) noexcept { return static_cast<int>(core) + 1; }

  /// Inside the outer boundary and outside every (closed) core disk.
  bool contains(const Vec2& x) const;
  /// Index of the core whose closed disk contains x, or -1.
  int core_containing(const Vec2& x) const;
  /// Distance from x to the nearest core circle (negative inside a core).
  double distance_to_cores(const Vec2& x) const;

private:
  OuterBoundary outer_;
  std::vector<ExtendedDefect> defects_;
  std::vector<Core> cores_;
  double eps_;
};

/// Validates 0 < eps < core_radius_bound and builds the domain. Errors name the
/// offending pair of defects or the defect closest to the outer boundary.
PerforatedDomain build_perforated_domain(const OuterBoundary& outer, const DefectConfiguration& cfg,
                                         double eps);

enum class Traversal { CounterClockwise, Clockwise };

struct LoopNode {
  Vec2 x;
  Vec2 t; // unit tangent along the traversal
  Vec2 n; // n = Pi t
};

/// Sampled parametrization of one boundary loop. Circles are sampled exactly
/// with uniform nodes and trapezoidal weights; polygon edges use Gauss-Legendre.
struct BoundaryLoop {
  int loop_id = 0;
  Traversal traversal = Traversal::CounterClockwise;
  Vec2 center = Vec2::Zero(); // circle centre (polygon: vertex centroid)
  double radius = 0.0;        // 0 for polygons
  std::vector<LoopNode> nodes;
  std::vector<double> weights;

  double length() const;
};

BoundaryLoop boundary_loop(const PerforatedDomain& dom, int loop_id, int n_quad,
                           Traversal traversal = Traversal::CounterClockwise);

/// Circle of given centre and radius, independent of any domain.
BoundaryLoop circle_loop(const Vec2& center, double radius, int n_quad,
                         Traversal traversal = Traversal::CounterClockwise);

/// Gauss-Legendre nodes and weights on [-1, 1].
std::vector<std::pair<double, double>> gauss_legendre(int m);

/// Quadrature of a closed line integral; f(x, n, t) may return a double or an
/// Eigen vector. A form integral of f dx_r is obtained with f * t[r].
template <class F>
auto line_integral(const BoundaryLoop& loop, F&& f) {
  using R = std::decay_t<decltype(f(loop.nodes[0].x, loop.nodes[0].n, loop.nodes[0].t))>;
  R acc = f(loop.nodes[0].x, loop.nodes[0].n, loop.nodes[0].t) * loop.weights[0];
  for (std::size_t k = 1; k < loop.nodes.size(); ++k) {
    const auto& p = loop.nodes[k];
    acc += f(p.x, p.n, p.t) * loop.weights[k];
  }
  if constexpr (std::is_arithmetic_v<R>) {
    return acc;
  } else {
    return typename R::PlainObject(acc);
  }
}

} // namespace airy
