#pragma once

#include "airy/domain.hpp"

#include <functional>
#include <string>
#include <vector>

namespace airy {

using JetFunction = std::function<ScalarJet3(const Vec2&)>;

/// Boundary functionals of an Airy potential on one loop, with positions
/// measured from a reference point.
///   i0 = int d_n lap v
///   i1 = int x1 d_t lap v - x2 d_n lap v + (hess v t)_1 / (1 - nu)
///   i2 = int x1 d_n lap v + x2 d_t lap v + (hess v t)_2 / (1 - nu)
/// The loop's traversal decides t and n = Pi t. With the clockwise traversal
/// around a core (n pointing at the core centre), (1-nu^2)/E (i0, i1, i2)
/// equals (s, b1, b2) for the potential of a defect inside the loop.
struct MichellIntegrals {
  double i0 = 0.0;
  double i1 = 0.0;
  double i2 = 0.0;

  /// (1-nu^2)/E (i0, i1, i2)
  Eigen::Vector3d scaled(const MaterialParams& mat) const;
};

MichellIntegrals michell_integrals(const JetFunction& v, const BoundaryLoop& loop, const MaterialParams& mat,
                                   const Vec2& reference);
inline MichellIntegrals michell_integrals(const JetFunction& v, const BoundaryLoop& loop, const MaterialParams& mat) {
  return michell_integrals(v, loop, mat, loop.center);
}

/// Strain and its two partial derivatives.
struct StrainJet {
  SymTensor2 strain;
  SymTensor2 d1; // d/dx1
  SymTensor2 d2; // d/dx2
};
using StrainFunction = std::function<StrainJet(const Vec2&)>;

/// Strain-form line integrals of one loop:
///   rotational    = int sum_q (e_1q,2 - e_q2,1) dx_q
///   translational = int sum_{c,q} [e_rc - x_q (e_rc,q - e_cq,r)] dx_c,  r = 1, 2
/// With the counter-clockwise traversal these give (s, b) for the plastic strain
/// of a defect inside the loop.
struct YavariIntegrals {
  double rotational = 0.0;
  Vec2 translational = Vec2::Zero();
};

YavariIntegrals yavari_integrals(const StrainFunction& eps, const BoundaryLoop& loop, const Vec2& reference);
inline YavariIntegrals yavari_integrals(const StrainFunction& eps, const BoundaryLoop& loop) {
  return yavari_integrals(eps, loop, loop.center);
}

/// eps = C^-1 cof(hess v) with the strain gradient from fourth-order central
/// differences of the exact Hessian (step h).
StrainFunction airy_strain(const JetFunction& v, const MaterialParams& mat, double h);

/// Both sides of the strain/Airy equivalence on one loop:
/// -E/(1-nu^2) x (rotational, translational_1, translational_2) against (i0, i1, i2).
struct EquivalenceReport {
  MichellIntegrals airy;
  YavariIntegrals strain;
  double max_relative = 0.0; // max component gap over the largest component magnitude
};
EquivalenceReport check_strain_airy_equivalence(const JetFunction& v, const BoundaryLoop& loop,
                                                const MaterialParams& mat, double fd_step);

/// |Div cof(hess v)| at each sample with nested central differences of v
/// (Hessian with step h, then its divergence with step h). Returns the max.
double divergence_identity_check(const std::function<double(const Vec2&)>& v, const std::vector<Vec2>& samples,
                                 double h = 1e-2);
/// Same identity from an exact Hessian, differenced to fourth order.
double divergence_identity_check(const std::function<SymTensor2(const Vec2&)>& hessian,
                                 const std::vector<Vec2>& samples, double h);

/// int (hess v t)_r over the loop, r = 1, 2.
Vec2 tangential_hessian_integral(const JetFunction& v, const BoundaryLoop& loop);

/// Lemma-style identity int f dx_r = -int x_r d_t f for a closed loop: returns
/// the larger of the two component gaps.
double form_identity_gap(const std::function<std::pair<double, Vec2>(const Vec2&)>& f, const BoundaryLoop& loop);

/// One verification line of a run report.
struct CheckResult {
  std::string name;
  double expected = 0.0;
  double computed = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string note;
};

/// |computed - expected| <= tolerance.
CheckResult make_check(std::string name, double expected, double computed, double tolerance, std::string note = {});

/// Analytic suites that need no mesh.
std::vector<CheckResult> annulus_suite();
std::vector<CheckResult> monge_ampere_suite();

} // namespace airy
