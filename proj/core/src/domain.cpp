#include "airy/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>

namespace airy {

// ---------------------------------------------------------------- geometry

double polygon_signed_area(const std::vector<Vec2>& poly) {
  double a = 0.0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) a += cross(poly[i], poly[(i + 1) % n]);
  return 0.5 * a;
}

bool point_in_polygon(const Vec2& x, const std::vector<Vec2>& poly) {
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[j];
    if ((a[1] > x[1]) != (b[1] > x[1])) {
      const double xc = a[0] + (x[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
      if (x[0] < xc) inside = !inside;
    }
  }
  return inside;
}

double distance_to_segment(const Vec2& x, const Vec2& a, const Vec2& b) {
  const Vec2 d = b - a;
  const double len2 = d.squaredNorm();
  double t = len2 > 0.0 ? (x - a).dot(d) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (x - (a + t * d)).norm();
}

namespace {

bool segments_cross(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  auto orient = [](const Vec2& p, const Vec2& q, const Vec2& r) { return cross(q - p, r - p); };
  const double o1 = orient(a, b, c), o2 = orient(a, b, d);
  const double o3 = orient(c, d, a), o4 = orient(c, d, b);
  return ((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0)) && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0;
}

} // namespace

OuterBoundary OuterBoundary::disk(const Vec2& center, double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius) || !center.allFinite()) {
    throw ValidationError("disk radius must be positive and finite");
  }
  return OuterBoundary(Disk{center, radius});
}

OuterBoundary OuterBoundary::polygon(std::vector<Vec2> vertices) {
  const std::size_t n = vertices.size();
  if (n < 3) throw ValidationError("polygon needs at least three vertices");
  for (const auto& v : vertices) {
    if (!v.allFinite()) throw ValidationError("polygon vertex is not finite");
  }
  if (!(polygon_signed_area(vertices) > 0.0)) {
    throw ValidationError("polygon must be listed counter-clockwise with positive area");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (segments_cross(vertices[i], vertices[(i + 1) % n], vertices[j], vertices[(j + 1) % n])) {
        throw ValidationError("polygon edges " + std::to_string(i) + " and " + std::to_string(j) +
                              " intersect; the polygon must be simple");
      }
    }
  }
  return OuterBoundary(std::move(vertices));
}

bool OuterBoundary::contains(const Vec2& x) const {
  if (is_disk()) {
    const Disk& d = as_disk();
    return (x - d.center).norm() < d.radius;
  }
  return point_in_polygon(x, as_polygon());
}

double OuterBoundary::distance_to_boundary(const Vec2& x) const {
  if (is_disk()) {
    const Disk& d = as_disk();
    return std::abs((x - d.center).norm() - d.radius);
  }
  const auto& p = as_polygon();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < p.size(); ++i) {
    best = std::min(best, distance_to_segment(x, p[i], p[(i + 1) % p.size()]));
  }
  return best;
}

double OuterBoundary::area() const {
  if (is_disk()) return std::numbers::pi * as_disk().radius * as_disk().radius;
  return polygon_signed_area(as_polygon());
}

std::pair<Vec2, Vec2> OuterBoundary::bounding_box() const {
  if (is_disk()) {
    const Disk& d = as_disk();
    const Vec2 r(d.radius, d.radius);
    return {d.center - r, d.center + r};
  }
  Vec2 lo = as_polygon().front(), hi = lo;
  for (const auto& v : as_polygon()) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  return {lo, hi};
}

// ---------------------------------------------------------------- domain

PerforatedDomain::PerforatedDomain(OuterBoundary outer, std::vector<ExtendedDefect> defects, double eps)
    : outer_(std::move(outer)), defects_(std::move(defects)), eps_(eps) {
  cores_.reserve(defects_.size());
  for (const auto& d : defects_) cores_.push_back({d.position, eps_});
}

bool PerforatedDomain::contains(const Vec2& x) const {
  return outer_.contains(x) && core_containing(x) < 0;
}

int PerforatedDomain::core_containing(const Vec2& x) const {
  for (std::size_t i = 0; i < cores_.size(); ++i) {
    if ((x - cores_[i].center).norm() <= cores_[i].radius) return static_cast<int>(i);
  }
  return -1;
}

double PerforatedDomain::distance_to_cores(const Vec2& x) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : cores_) best = std::min(best, (x - c.center).norm() - c.radius);
  return best;
}

PerforatedDomain build_perforated_domain(const OuterBoundary& outer, const DefectConfiguration& cfg,
                                         double eps) {
  if (cfg.empty()) throw ValidationError("at least one defect is required");
  if (!(eps > 0.0) || !std::isfinite(eps)) throw ValidationError("core radius must be positive");
  auto ext = extend_defects(cfg);
  const double eps0 = core_radius_bound(cfg, outer);
  if (!(eps < eps0)) {
    std::ostringstream msg;
    msg << "core radius " << eps << " must be strictly smaller than the admissible bound " << eps0;
    // name the binding constraint
    for (std::size_t i = 0; i < ext.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        const double half = 0.5 * (ext[i].position - ext[j].position).norm();
        if (half <= eps) {
          msg << "; cores of defects " << j << " and " << i << " (half distance " << half << ") overlap";
        }
      }
      const double wall = outer.distance_to_boundary(ext[i].position);
      if (wall <= eps) {
        msg << "; core of defect " << i << " (distance " << wall << " to the outer boundary) leaves the body";
      }
    }
    throw ValidationError(msg.str());
  }
  return PerforatedDomain(outer, std::move(ext), eps);
}

// ---------------------------------------------------------------- loops

double BoundaryLoop::length() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

BoundaryLoop circle_loop(const Vec2& center, double radius, int n_quad, Traversal traversal) {
  if (n_quad < 3) throw ValidationError("circle quadrature needs at least 3 nodes");
  BoundaryLoop loop;
  loop.traversal = traversal;
  loop.center = center;
  loop.radius = radius;
  loop.nodes.reserve(n_quad);
  const double sign = traversal == Traversal::CounterClockwise ? 1.0 : -1.0;
  const double w = 2.0 * std::numbers::pi * radius / n_quad;
  for (int k = 0; k < n_quad; ++k) {
    const double th = sign * 2.0 * std::numbers::pi * k / n_quad;
    const Vec2 e(std::cos(th), std::sin(th));
    LoopNode p;
    p.x = center + radius * e;
    p.t = sign * Vec2(-e[1], e[0]);
    p.n = rotate_quarter_cw(p.t);
    loop.nodes.push_back(p);
    loop.weights.push_back(w);
  }
  return loop;
}

std::vector<std::pair<double, double>> gauss_legendre(int m) {
  if (m < 1) throw std::invalid_argument("Gauss-Legendre rule needs at least one node");
  // Golub-Welsch
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(m, m);
  for (int i = 1; i < m; ++i) {
    const double b = i / std::sqrt(4.0 * i * i - 1.0);
    J(i, i - 1) = J(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  std::vector<std::pair<double, double>> out;
  for (int i = 0; i < m; ++i) {
    const double v0 = es.eigenvectors()(0, i);
    out.emplace_back(es.eigenvalues()[i], 2.0 * v0 * v0);
  }
  return out;
}

namespace {

BoundaryLoop polygon_loop(const std::vector<Vec2>& poly, int n_quad, Traversal traversal) {
  BoundaryLoop loop;
  loop.traversal = traversal;
  Vec2 c = Vec2::Zero();
  for (const auto& v : poly) c += v;
  loop.center = c / static_cast<double>(poly.size());

  std::vector<Vec2> verts = poly;
  if (traversal == Traversal::Clockwise) std::reverse(verts.begin(), verts.end());

  double perimeter = 0.0;
  for (std::size_t i = 0; i < verts.size(); ++i) perimeter += (verts[(i + 1) % verts.size()] - verts[i]).norm();

  for (std::size_t i = 0; i < verts.size(); ++i) {
    const Vec2 a = verts[i];
    const Vec2 b = verts[(i + 1) % verts.size()];
    const double len = (b - a).norm();
    const int m = std::max(2, static_cast<int>(std::ceil(n_quad * len / perimeter)));
    const Vec2 t = (b - a) / len;
    for (const auto& [xi, wi] : gauss_legendre(m)) {
      LoopNode p;
      p.x = a + 0.5 * (xi + 1.0) * (b - a);
      p.t = t;
      p.n = rotate_quarter_cw(t);
      loop.nodes.push_back(p);
      loop.weights.push_back(0.5 * wi * len);
    }
  }
  return loop;
}

} // namespace

BoundaryLoop boundary_loop(const PerforatedDomain& dom, int loop_id, int n_quad, Traversal traversal) {
  if (loop_id < 0 || loop_id >= dom.num_loops()) {
    throw std::out_of_range("unknown boundary loop id " + std::to_string(loop_id));
  }
  BoundaryLoop loop;
  if (loop_id == 0) {
    if (dom.outer().is_disk()) {
      loop = circle_loop(dom.outer().as_disk().center, dom.outer().as_disk().radius, n_quad, traversal);
    } else {
      loop = polygon_loop(dom.outer().as_polygon(), n_quad, traversal);
    }
  } else {
    const Core& c = dom.cores()[loop_id - 1];
    loop = circle_loop(c.center, c.radius, n_quad, traversal);
  }
  loop.loop_id = loop_id;
  return loop;
}

} // namespace airy
