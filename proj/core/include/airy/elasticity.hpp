#pragma once

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>

namespace airy {

using Vec2 = Eigen::Vector2d;

/// Thrown when user-facing input violates a documented precondition.
class ValidationError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a numerical stage fails (singular or indefinite systems, ...).
class SolverError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Isotropic plane-strain material.
///
/// The constructor enforces E > 0 and -1 < nu < 1/2; every kernel in this
/// header assumes a validated instance.
class MaterialParams {
public:
  MaterialParams(double young_modulus, double poisson_ratio);

  double young_modulus() const noexcept { return young_; }
  double poisson_ratio() const noexcept { return poisson_; }

  /// E / (1 - nu^2), the factor in front of the defect Green's functions.
  double plane_strain_modulus() const noexcept {
    return young_ / (1.0 - poisson_ * poisson_);
  }

private:
  double young_;
  double poisson_;
};

/// Symmetric 2x2 tensor stored as (t11, t12, t22).
struct SymTensor2 {
  double t11 = 0.0;
  double t12 = 0.0;
  double t22 = 0.0;

  static SymTensor2 identity() { return {1.0, 0.0, 1.0}; }
  static SymTensor2 zero() { return {}; }

  double trace() const noexcept { return t11 + t22; }
  /// Frobenius norm squared, counting the off-diagonal twice.
  double norm2() const noexcept { return t11 * t11 + 2.0 * t12 * t12 + t22 * t22; }
  double determinant() const noexcept { return t11 * t22 - t12 * t12; }

  Vec2 apply(const Vec2& w) const { return {t11 * w[0] + t12 * w[1], t12 * w[0] + t22 * w[1]}; }
  Eigen::Matrix2d matrix() const {
    Eigen::Matrix2d m;
    m << t11, t12, t12, t22;
    return m;
  }

  SymTensor2& operator+=(const SymTensor2& o) {
    t11 += o.t11;
    t12 += o.t12;
    t22 += o.t22;
    return *this;
  }
  SymTensor2& operator-=(const SymTensor2& o) {
    t11 -= o.t11;
    t12 -= o.t12;
    t22 -= o.t22;
    return *this;
  }
  SymTensor2& operator*=(double s) {
    t11 *= s;
    t12 *= s;
    t22 *= s;
    return *this;
  }
  friend SymTensor2 operator+(SymTensor2 a, const SymTensor2& b) { return a += b; }
  friend SymTensor2 operator-(SymTensor2 a, const SymTensor2& b) { return a -= b; }
  friend SymTensor2 operator*(double s, SymTensor2 a) { return a *= s; }
  friend SymTensor2 operator*(SymTensor2 a, double s) { return a *= s; }
  friend SymTensor2 operator-(SymTensor2 a) { return a *= -1.0; }
  friend bool operator==(const SymTensor2&, const SymTensor2&) = default;
};

/// Full contraction a : b.
inline double contract(const SymTensor2& a, const SymTensor2& b) noexcept {
  return a.t11 * b.t11 + 2.0 * a.t12 * b.t12 + a.t22 * b.t22;
}

/// In-plane stress plus the out-of-plane component of the plane-strain state.
struct PlaneStrainStress {
  SymTensor2 in_plane;
  double sigma33 = 0.0;
};

/// cof(m): swaps the diagonal and negates the off-diagonal entry.
SymTensor2 cofactor(const SymTensor2& m) noexcept;

/// sigma = E nu / ((1+nu)(1-2nu)) cof(eps) + E (1-nu) / ((1+nu)(1-2nu)) eps, the exact
/// inverse of constitutive_strain (plane-strain Lame form).
SymTensor2 constitutive_stress(const SymTensor2& eps, const MaterialParams& mat) noexcept;

/// eps = (1-nu^2)/E sigma - nu(1+nu)/E cof(sigma); inverse of constitutive_stress.
SymTensor2 constitutive_strain(const SymTensor2& sigma, const MaterialParams& mat) noexcept;

/// sigma33 = nu (sigma11 + sigma22). Reported only; never enters an energy.
double out_of_plane_stress(const SymTensor2& sigma, const MaterialParams& mat) noexcept;

PlaneStrainStress plane_strain_stress(const SymTensor2& eps, const MaterialParams& mat) noexcept;

/// Stress of an Airy potential from its Hessian: cof(hessian).
SymTensor2 airy_stress(const SymTensor2& hessian) noexcept;

/// (1/2)(1+nu)/E (|sigma|^2 - nu tr(sigma)^2).
double energy_density_from_stress(const SymTensor2& sigma, const MaterialParams& mat) noexcept;

/// (1/2)(1+nu)/E (|hess v|^2 - nu (lap v)^2).
double energy_density_from_hessian(const SymTensor2& hessian, const MaterialParams& mat) noexcept;

/// Monge-Ampere bracket [xi, eta] = cof(hess xi) : hess eta.
double monge_ampere_bracket(const SymTensor2& h_xi, const SymTensor2& h_eta) noexcept;

/// Rotation by -pi/2: (w1, w2) -> (w2, -w1).
inline Vec2 rotate_quarter_cw(const Vec2& w) noexcept { return {w[1], -w[0]}; }

/// a x w = a1 w2 - a2 w1.
inline double cross(const Vec2& a, const Vec2& w) noexcept { return a[0] * w[1] - a[1] * w[0]; }

} // namespace airy
