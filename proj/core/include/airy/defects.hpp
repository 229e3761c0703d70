#pragma once

#include "airy/elasticity.hpp"
#include "airy/geometry.hpp"

#include <array>
#include <variant>
#include <vector>

namespace airy {

/// Edge dislocation with a nonzero Burgers vector.
struct Dislocation {
  Vec2 position = Vec2::Zero();
  Vec2 burgers = Vec2::Zero();
};

/// Wedge disclination with a nonzero Frank angle (radians).
struct Disclination {
  Vec2 position = Vec2::Zero();
  double frank_angle = 0.0;
};

using Defect = std::variant<Dislocation, Disclination>;

/// Ordered collection of point defects. The insertion order is the core
/// order used everywhere downstream (cell problems, forcing vector, reports).
class DefectConfiguration {
public:
  DefectConfiguration() = default;
  explicit DefectConfiguration(std::vector<Defect> defects);

  DefectConfiguration& add(const Dislocation& d);
  DefectConfiguration& add(const Disclination& d);

  const std::vector<Defect>& defects() const noexcept { return defects_; }
  std::size_t size() const noexcept { return defects_.size(); }
  bool empty() const noexcept { return defects_.empty(); }

  std::vector<Dislocation> dislocations() const;
  std::vector<Disclination> disclinations() const;

  /// Throws ValidationError on zero charges or coincident positions.
  void validate() const;

  /// Sum of all Burgers vectors (the total of the dislocation measure).
  Vec2 total_burgers() const;
  /// Sum of all Frank angles.
  double total_frank() const;

  DefectConfiguration translated(const Vec2& shift) const;
  DefectConfiguration negated() const;

private:
  std::vector<Defect> defects_;
};

Vec2 defect_position(const Defect& d);

/// One entry of the extended defect list: b = 0 for disclinations, s = 0 for
/// dislocations.
struct ExtendedDefect {
  Vec2 position = Vec2::Zero();
  Vec2 burgers = Vec2::Zero();
  double frank = 0.0;

  bool is_dislocation() const noexcept { return frank == 0.0; }
};

std::vector<ExtendedDefect> extend_defects(const DefectConfiguration& cfg);

/// Value, gradient, Hessian and gradient of the Laplacian of a scalar field.
struct ScalarJet3 {
  double value = 0.0;
  Vec2 gradient = Vec2::Zero();
  SymTensor2 hessian;
  Vec2 grad_laplacian = Vec2::Zero();

  ScalarJet3& operator+=(const ScalarJet3& o);
  ScalarJet3& operator*=(double s);
  friend ScalarJet3 operator+(ScalarJet3 a, const ScalarJet3& b) { return a += b; }
  friend ScalarJet3 operator*(double s, ScalarJet3 a) { return a *= s; }
  friend ScalarJet3 operator-(ScalarJet3 a, const ScalarJet3& b) { return a += (-1.0) * b; }
};

/// Disclination Green's function E/(1-nu^2) |x|^2 log|x|^2 / (16 pi).
/// Throws std::domain_error at x = 0.
ScalarJet3 eval_v_d(const Vec2& x, const MaterialParams& mat);
/// Value only; returns 0 at the origin.
double v_d_value(const Vec2& x, const MaterialParams& mat) noexcept;

/// Dislocation Green's function E/(1-nu^2) x (log|x|^2 + 1) / (8 pi), one jet
/// per vector component. Throws std::domain_error at x = 0.
std::array<ScalarJet3, 2> eval_v_D(const Vec2& x, const MaterialParams& mat);
Vec2 v_D_value(const Vec2& x, const MaterialParams& mat) noexcept;

/// Minimum admissible distance between an evaluation point and a defect.
inline constexpr double kDefectExclusionRadius = 1e-12;

/// Superposed singular potential of all defects.
ScalarJet3 eval_plastic_potential(const Vec2& x, const DefectConfiguration& cfg,
                                  const MaterialParams& mat);

ScalarJet3 eval_plastic_potential(const Vec2& x, const std::vector<ExtendedDefect>& defects,
                                  const MaterialParams& mat);

struct PlasticFields {
  SymTensor2 stress;
  SymTensor2 strain;
};

/// sigma^p = cof(hess v^p), eps^p = C^{-1} sigma^p.
PlasticFields plastic_stress_strain(const Vec2& x, const DefectConfiguration& cfg,
                                    const MaterialParams& mat);
PlasticFields plastic_stress_strain(const Vec2& x, const std::vector<ExtendedDefect>& defects,
                                    const MaterialParams& mat);

/// Largest admissible core radius: min(half the smallest pairwise distance,
/// smallest distance to the outer boundary).
double core_radius_bound(const DefectConfiguration& cfg, const OuterBoundary& outer);

} // namespace airy
