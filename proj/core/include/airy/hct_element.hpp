#pragma once

#include "airy/elasticity.hpp"

#include <Eigen/Core>

#include <array>
#include <functional>

namespace airy {

/// Derivatives through third order of the twelve HCT basis functions at a point.
struct HctBasisJets {
  Eigen::Matrix<double, 12, 1> value;
  Eigen::Matrix<double, 12, 2> gradient;
  Eigen::Matrix<double, 12, 3> hessian;        // (xx, xy, yy)
  Eigen::Matrix<double, 12, 2> grad_laplacian; // constant on each sub-triangle
};

/// Hsieh-Clough-Tocher macro-element: the triangle is split at its centroid
/// into three sub-triangles carrying cubics joined with C1 continuity.
///
/// Local degrees of freedom, in order: for each vertex i the value and the two
/// Cartesian derivatives (3i, 3i+1, 3i+2), then for each edge j (opposite
/// vertex j) the derivative along the supplied edge normal at its midpoint (9+j).
class HctElement {
public:
  HctElement(const std::array<Vec2, 3>& vertices, const std::array<Vec2, 3>& edge_normals);

  const std::array<Vec2, 3>& vertices() const noexcept { return p_; }
  const Vec2& centroid() const noexcept { return c_; }
  double area() const noexcept { return area_; }

  /// Sub-triangle k has vertices (p[k+1], p[k+2], centroid).
  std::array<Vec2, 3> subtriangle(int k) const;
  /// Sub-triangle containing a point given by macro barycentrics.
  static int subtriangle_of(const std::array<double, 3>& bary);

  /// Cubic coefficients of every basis function on sub-triangle k, in the
  /// scaled monomial basis (1, u, w, u^2, uw, w^2, u^3, u^2 w, u w^2, w^3)
  /// with (u, w) = (x - centroid) / scale.
  Eigen::Matrix<double, 10, 12> coefficients(int k) const { return coef_.block<10, 12>(10 * k, 0); }
  double scale() const noexcept { return s_; }

  HctBasisJets basis(const Vec2& x, int sub) const;
  HctBasisJets basis(const Vec2& x) const;

  /// Element matrices on the twelve local dofs: int hess u : hess w and
  /// int lap u lap w, both exact (the integrands are quadratic per sub-triangle).
  Eigen::Matrix<double, 12, 12> hessian_stiffness() const;
  Eigen::Matrix<double, 12, 12> laplacian_stiffness() const;
  /// int f phi_k, degree-5 quadrature per sub-triangle.
  Eigen::Matrix<double, 12, 1> load(const std::function<double(const Vec2&)>& f) const;

private:
  std::array<Vec2, 3> p_;
  std::array<Vec2, 3> n_;
  Vec2 c_;
  double s_ = 1.0;
  double area_ = 0.0;
  Eigen::Matrix<double, 30, 12> coef_;
};

/// Scaled-monomial jets: rows (value, d/dx, d/dy, xx, xy, yy, lap_x, lap_y) of
/// the ten cubic monomials at x, already converted to physical derivatives.
Eigen::Matrix<double, 8, 10> cubic_monomial_jets(const Vec2& x, const Vec2& origin, double scale);

/// Symmetric 7-point rule of degree 5 on a triangle: barycentrics and weights
/// (weights sum to 1; multiply by the triangle area).
struct TriangleRule {
  std::array<std::array<double, 3>, 7> bary;
  std::array<double, 7> weight;
};
const TriangleRule& degree5_rule();

} // namespace airy
