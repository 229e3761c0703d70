#pragma once

#include "airy/equilibrium.hpp"
#include "airy/verification.hpp"

#include <functional>
#include <vector>

namespace airy {

/// A strain field together with the gradient of its rotation. The rotation
/// omega is the scalar with du = eps dx + omega Pi(dx), so that its counter-
/// clockwise jump around a disclination equals the Frank angle.
struct CompatibilityField {
  std::function<SymTensor2(const Vec2&)> strain;
  std::function<Vec2(const Vec2&)> rotation_gradient;
};

/// d_k omega = e_k1,2 - e_k2,1 from a strain with derivatives.
CompatibilityField compatibility_from_strain(StrainFunction eps);
/// Strain C^-1 cof(hess v) of an Airy potential; grad omega = (1-nu^2)/E (d2 lap v, -d1 lap v).
CompatibilityField compatibility_from_airy(JetFunction v, const MaterialParams& mat);
/// a - b
CompatibilityField difference(CompatibilityField a, CompatibilityField b);

/// Continuous gradient of the Laplacian of an HCT field: least-squares
/// quadratic fits of the Laplacian over vertex patches, interpolated linearly.
/// When a singular part g is given, only v - g is fitted and the exact
/// gradient of lap g is added back.
class GradLaplacianRecovery {
public:
  explicit GradLaplacianRecovery(const DiscreteField& v, JetFunction singular = {});

  Vec2 operator()(const Vec2& x) const;
  const std::vector<Vec2>& vertex_values() const noexcept { return nodal_; }

private:
  std::shared_ptr<const FeSpace> space_;
  JetFunction singular_;
  std::vector<Vec2> nodal_;
};

/// Superposed defect potential of a solution's domain.
JetFunction plastic_jets(const EquilibriumSolution& sol);

/// Airy potential jets of a discrete field, with the recovered gradient of the
/// Laplacian in place of the piecewise-constant one.
JetFunction recovered_jets(const DiscreteField& v, std::shared_ptr<const GradLaplacianRecovery> recovery);

/// Strain and rotation gradient of the elastic part of an equilibrium solution
/// (v-hat minus the plastic potential), and of the full solution.
CompatibilityField elastic_compatibility(const EquilibriumSolution& sol,
                                         std::shared_ptr<const GradLaplacianRecovery> recovery);
CompatibilityField total_compatibility(const EquilibriumSolution& sol,
                                       std::shared_ptr<const GradLaplacianRecovery> recovery);

/// Charges of each core from the Michell integrals of the solution (jets with
/// the recovered third derivatives) on a circle around the core. The circle
/// radius is 1.5 eps, pulled in when another core or the outer boundary is
/// closer.
struct LoopCharges {
  RecoveredCharges charges;
  std::vector<double> radius;
};
LoopCharges loop_charges(const EquilibriumSolution& sol, std::shared_ptr<const GradLaplacianRecovery> recovery,
                         int n_quad = 1024);

struct LoopMismatch {
  double rotation_jump = 0.0;        // counter-clockwise jump of omega
  Vec2 displacement_jump = Vec2::Zero(); // translational charge about the core centre
  Vec2 raw_jump = Vec2::Zero();      // jump of u at the crossing point
  double spread = 0.0;               // largest deviation of a crossing edge from the median
  int crossings = 0;
};

struct ReconstructionOptions {
  int gauss_points = 4;
  /// Largest accepted loop-closure defect per triangle, relative to
  /// max|eps| times the mesh diameter. Negative disables the check.
  double closure_tolerance = -1.0;
};

struct Reconstruction {
  std::vector<Vec2> displacement; // per mesh vertex, in the cut domain
  std::vector<double> rotation;
  std::vector<LoopMismatch> mismatch; // one per core
  std::vector<Vec2> cut_directions;
  int base_vertex = 0;
  double closure_defect = 0.0; // worst relative triangle closure
};

/// Grid point of the domain farthest from every boundary (a good base point:
/// paths from it stay clear of the core boundary layers).
Vec2 deepest_interior_point(const PerforatedDomain& dom, int resolution = 64);

/// Pairwise disjoint rays from each core centre to the outer boundary.
std::vector<Vec2> choose_cut_directions(const PerforatedDomain& dom);

/// Integrates du = eps dx + omega Pi(dx), d omega = grad omega . dx along a
/// spanning tree of mesh edges that avoids the cut rays, starting from the mesh
/// vertex closest to base_point (u = 0, omega = 0 there). Mismatches come from
/// the edges crossing each cut (componentwise median). Throws SolverError when
/// the closure check is enabled and fails. An empty cut list picks the rays
/// automatically.
Reconstruction reconstruct_displacement(const CompatibilityField& field, const Mesh& mesh, const PerforatedDomain& dom,
                                        const Vec2& base_point, std::vector<Vec2> cut_directions = {},
                                        const ReconstructionOptions& opt = {});

} // namespace airy
