#pragma once

#include "airy/domain.hpp"
#include "airy/fe_space.hpp"

#include <Eigen/SparseCore>

#include <functional>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace airy {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

/// a(x) = a0 + a1 (x1 - o1) + a2 (x2 - o2). The origin defaults to 0.
struct AffineTrace {
  double a0 = 0.0;
  double a1 = 0.0;
  double a2 = 0.0;
  Vec2 origin = Vec2::Zero();

  double value(const Vec2& x) const { return a0 + a1 * (x[0] - origin[0]) + a2 * (x[1] - origin[1]); }
  Vec2 gradient() const { return {a1, a2}; }
};

/// Boundary datum sampled from a smooth function: (value, gradient) at x.
using BoundaryFunction = std::function<std::pair<double, Vec2>(const Vec2&)>;
using BoundaryDatum = std::variant<AffineTrace, BoundaryFunction>;

/// int hess u : hess w over the mesh.
SparseMatrix assemble_hessian_form(const FeSpace& space);
/// int lap u lap w over the mesh.
SparseMatrix assemble_laplacian_form(const FeSpace& space);
/// int f w over the mesh.
Eigen::VectorXd assemble_load(const FeSpace& space, const std::function<double(const Vec2&)>& f);

/// Sparse symmetric positive definite factorization (CHOLMOD supernodal when
/// available, Eigen simplicial LDL^T otherwise). Immutable after construction.
class SpdSolver {
public:
  explicit SpdSolver(const SparseMatrix& a);
  ~SpdSolver();
  SpdSolver(const SpdSolver&) = delete;
  SpdSolver& operator=(const SpdSolver&) = delete;

  Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const;
  static std::string backend();

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Clamped biharmonic problem on an FeSpace: every boundary dof is prescribed
/// and the free block of the Hessian form is factored once.
class ClampedProblem {
public:
  explicit ClampedProblem(std::shared_ptr<const FeSpace> space);

  const FeSpace& space() const noexcept { return *space_; }
  std::shared_ptr<const FeSpace> space_ptr() const noexcept { return space_; }
  const SparseMatrix& stiffness() const noexcept { return k_; }
  const std::vector<int>& free_dofs() const noexcept { return free_; }

  /// Full-length vector holding the prescribed boundary dofs, zero elsewhere.
  /// `per_loop[l]` is the datum on loop l.
  Eigen::VectorXd boundary_vector(const std::vector<BoundaryDatum>& per_loop) const;

  /// Solves with the given boundary columns (full-length) and optional loads.
  std::vector<DiscreteField> solve(const Eigen::MatrixXd& boundary, const Eigen::MatrixXd* load = nullptr) const;
  DiscreteField solve(const Eigen::VectorXd& boundary, const Eigen::VectorXd* load = nullptr) const;

private:
  std::shared_ptr<const FeSpace> space_;
  SparseMatrix k_;
  SparseMatrix k_ff_;
  std::vector<int> free_;
  std::vector<int> free_index_;
  std::unique_ptr<SpdSolver> solver_;
};

/// Affine datum of cell problem (core, r): 1 for r = 0, x_r - xi_r for r = 1, 2
/// (core-centred coordinates).
AffineTrace cell_trace(const PerforatedDomain& dom, std::size_t core, int r);
/// Boundary data of cell problem (core, r): its affine datum on loop core+1,
/// clamped elsewhere.
std::vector<BoundaryDatum> cell_boundary_data(const PerforatedDomain& dom, std::size_t core, int r);

DiscreteField solve_cell_problem(const ClampedProblem& problem, const PerforatedDomain& dom, std::size_t core, int r);

/// Discrete solution of lap^2 v = load with clamped data per loop.
DiscreteField solve_dirichlet(const ClampedProblem& problem, const std::vector<BoundaryDatum>& per_loop,
                              const std::function<double(const Vec2&)>& load = {});

/// Jet of a discrete field at x (grad_laplacian approximate).
ScalarJet3 evaluate_field(const DiscreteField& field, const Vec2& x);

/// Energy-norm error (int |hess v - hess v*|^2)^(1/2) against an exact Hessian.
double energy_norm_error(const DiscreteField& v, const std::function<SymTensor2(const Vec2&)>& exact_hessian);

} // namespace airy
