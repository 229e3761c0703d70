#pragma once

#include "airy/defects.hpp"
#include "airy/hct_element.hpp"
#include "airy/mesh.hpp"

#include <Eigen/Core>

#include <array>
#include <functional>
#include <memory>
#include <mutex>
#include <vector>

namespace airy {

/// C1 HCT space on a mesh. Global dofs: value and gradient at every vertex
/// (3v, 3v+1, 3v+2), then one normal derivative per edge (3 nv + e). Edge
/// e = (a, b) with a < b uses the normal Pi((x_b - x_a)/|x_b - x_a|).
class FeSpace {
public:
  explicit FeSpace(std::shared_ptr<const Mesh> mesh);

  const Mesh& mesh() const noexcept { return *mesh_; }
  std::shared_ptr<const Mesh> mesh_ptr() const noexcept { return mesh_; }

  std::size_t num_dofs() const noexcept { return 3 * mesh_->num_vertices() + edges_.size(); }
  std::size_t num_edges() const noexcept { return edges_.size(); }
  const std::array<int, 2>& edge(std::size_t e) const { return edges_[e]; }
  Vec2 edge_normal(std::size_t e) const;
  int edge_dof(std::size_t e) const { return static_cast<int>(3 * mesh_->num_vertices() + e); }

  const std::array<int, 12>& element_dofs(std::size_t t) const { return dofs_[t]; }
  const HctElement& element(std::size_t t) const { return elements_[t]; }

  /// Loop id of every boundary-constrained dof, -1 for free dofs.
  const std::vector<int>& dof_loop() const noexcept { return dof_loop_; }
  std::size_t num_boundary_dofs() const noexcept { return num_boundary_; }
  std::size_t num_interior_dofs() const noexcept { return num_dofs() - num_boundary_; }
  std::size_t num_loop_dofs(int loop) const;

  const TriangleLocator& locator() const noexcept { return locator_; }

private:
  std::shared_ptr<const Mesh> mesh_;
  std::vector<std::array<int, 2>> edges_;
  std::vector<std::array<int, 12>> dofs_;
  std::vector<HctElement> elements_;
  std::vector<int> dof_loop_;
  std::size_t num_boundary_ = 0;
  TriangleLocator locator_;
};

/// Coefficient vector on an FeSpace.
class DiscreteField {
public:
  DiscreteField(std::shared_ptr<const FeSpace> space, Eigen::VectorXd coeffs);

  const FeSpace& space() const noexcept { return *space_; }
  std::shared_ptr<const FeSpace> space_ptr() const noexcept { return space_; }
  const Eigen::VectorXd& coeffs() const noexcept { return coeffs_; }

  /// Jet at x. grad_laplacian is the piecewise-constant third derivative of
  /// the containing sub-triangle (approximate). Throws std::out_of_range when
  /// x is farther than `tolerance` from the mesh.
  ScalarJet3 jet(const Vec2& x, double tolerance = 0.0) const;
  /// Jet at x inside element t with sub-triangle k (no point location).
  ScalarJet3 jet_in(std::size_t t, int sub, const Vec2& x) const;

  DiscreteField operator+(const DiscreteField& o) const;
  DiscreteField operator*(double s) const;

private:
  const Eigen::Matrix<double, 30, 1>& local_poly(std::size_t t) const;

  struct PolyCache {
    std::once_flag once;
    std::vector<Eigen::Matrix<double, 30, 1>> poly;
  };

  std::shared_ptr<const FeSpace> space_;
  Eigen::VectorXd coeffs_;
  std::shared_ptr<PolyCache> cache_ = std::make_shared<PolyCache>();
};

/// Interpolates a smooth function given by value and gradient into the space.
Eigen::VectorXd interpolate(const FeSpace& space, const std::function<std::pair<double, Vec2>(const Vec2&)>& f);

} // namespace airy
