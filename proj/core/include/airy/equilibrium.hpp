#pragma once

#include "airy/biharmonic.hpp"

#include <Eigen/Core>

#include <memory>
#include <vector>

namespace airy {

/// The 3N cell fields kappa_r^i, ordered core by core with r = 0, 1, 2 inside
/// each block (the same ordering as the forcing vector and the coefficients).
struct CellBasis {
  std::shared_ptr<const ClampedProblem> problem;
  std::vector<DiscreteField> fields;
  Eigen::MatrixXd coeffs; // num_dofs x 3N, column k is fields[k]

  std::size_t num_cores() const noexcept { return fields.size() / 3; }
  const DiscreteField& field(std::size_t core, int r) const { return fields[3 * core + static_cast<std::size_t>(r)]; }
};

/// Solves all 3N cell problems with one factorization.
CellBasis solve_cell_basis(std::shared_ptr<const ClampedProblem> problem, const PerforatedDomain& dom);

/// M_(i,r),(j,s) = int hess kappa_r^i : hess kappa_s^j, by element quadrature.
Eigen::MatrixXd assemble_influence_matrix(const CellBasis& basis);
/// Same matrix as coeffs^T K coeffs with the assembled Hessian form.
Eigen::MatrixXd influence_matrix_from_stiffness(const CellBasis& basis);

struct ForcingVector {
  Eigen::VectorXd dislocation_part;   // blocks (0, b2, -b1)
  Eigen::VectorXd disclination_part;  // blocks (s, 0, 0)

  Eigen::VectorXd total() const { return dislocation_part + disclination_part; }
};

ForcingVector build_forcing(const std::vector<ExtendedDefect>& defects);

struct EquilibriumSolution {
  std::shared_ptr<const PerforatedDomain> domain;
  MaterialParams material;
  Eigen::MatrixXd influence;
  Eigen::VectorXd forcing;
  Eigen::VectorXd coefficients; // A-hat
  DiscreteField potential;      // v-hat
  double energy = 0.0;          // closed-form minimum -E/(2(1-nu^2)) <M^-1 Phi, Phi>
};

/// A-hat = -E/(1-nu^2) M^-1 Phi and v-hat = sum A-hat_k kappa_k. Throws
/// SolverError when M is not positive definite.
EquilibriumSolution solve_equilibrium(const CellBasis& basis, const Eigen::MatrixXd& influence,
                                      const ForcingVector& forcing, const MaterialParams& mat,
                                      std::shared_ptr<const PerforatedDomain> domain);

/// Mesh -> space -> cell basis -> M, Phi -> solution, in one call.
struct EquilibriumRun {
  std::shared_ptr<const FeSpace> space;
  CellBasis basis;
  EquilibriumSolution solution;
};
EquilibriumRun solve_on_mesh(std::shared_ptr<const PerforatedDomain> domain, std::shared_ptr<const Mesh> mesh,
                             const MaterialParams& mat);

/// Elastic energy G(v) = (1+nu)/(2E) int |hess v|^2 - nu (lap v)^2 by element quadrature.
double elastic_energy(const DiscreteField& v, const MaterialParams& mat);

/// I(v) = G(v) + the averaged core terms of every defect, the latter by
/// quadrature on the exact core circles with n_quad nodes.
double evaluate_functional(const DiscreteField& v, const PerforatedDomain& dom, const MaterialParams& mat,
                           int n_quad = 256);

struct FieldSample {
  double potential = 0.0;    // v-hat
  SymTensor2 stress;         // cof(hess v-hat)
  SymTensor2 strain;         // C^-1 stress
  SymTensor2 elastic_stress; // stress - sigma^p
  SymTensor2 elastic_strain; // C^-1 elastic_stress
  SymTensor2 plastic_strain;
};

/// Fields of the solution at x. Points within `tolerance` of the mesh are
/// snapped onto it; farther ones throw std::out_of_range.
FieldSample extract_fields(const EquilibriumSolution& sol, const Vec2& x, double tolerance = 1e-9);

/// (1+nu)/E int hess u : hess w - nu lap u lap w over the mesh.
double bilinear_form(const DiscreteField& u, const DiscreteField& w, const MaterialParams& mat);

/// Affine coefficients (a0, a1, a2) per core of an admissible test field, in
/// core-centred coordinates, fitted from its boundary dofs.
struct TraceFit {
  Eigen::VectorXd coefficients; // 3N
  double core_residual = 0.0;   // max deviation of the boundary dofs from the fit
  double outer_residual = 0.0;  // max |dof| on the outer boundary
};
TraceFit fit_affine_traces(const DiscreteField& phi, const PerforatedDomain& dom);

/// Right-hand side of the weak Euler-Lagrange equation for test field phi:
/// B(v-hat, phi) + Phi . A_phi. Throws ValidationError when phi's traces are
/// not affine on the cores or not clamped on the outer boundary (relative
/// tolerance `trace_tolerance`).
double weak_el_residual(const EquilibriumSolution& sol, const DiscreteField& phi, double trace_tolerance = 1e-9);

/// Per-core charges recovered from the weak residual with the cell fields as
/// test functions: s = -B(v, kappa_0), b2 = -B(v, kappa_1), b1 = B(v, kappa_2).
struct RecoveredCharges {
  std::vector<double> frank;
  std::vector<Vec2> burgers;
};
RecoveredCharges recover_charges(const EquilibriumSolution& sol, const CellBasis& basis);

/// Minimizes I directly over the admissible HCT space (free dofs plus one
/// affine trace per core) as a bordered sparse system. A nonzero seed permutes
/// the unknowns before factorization.
DiscreteField minimize_directly(const ClampedProblem& problem, const PerforatedDomain& dom, const MaterialParams& mat,
                                unsigned seed = 0);

} // namespace airy
