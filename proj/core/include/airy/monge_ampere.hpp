#pragma once

#include "airy/elasticity.hpp"
#include "airy/geometry.hpp"

#include <array>
#include <functional>
#include <random>
#include <vector>

namespace airy {

/// Dense bivariate polynomial sum c_ij x^i y^j with i + j <= degree.
class Polynomial2 {
public:
  Polynomial2() : Polynomial2(0) {}
  explicit Polynomial2(int degree);

  static Polynomial2 constant(double c);
  static Polynomial2 monomial(int i, int j, double c = 1.0);
  static Polynomial2 x() { return monomial(1, 0); }
  static Polynomial2 y() { return monomial(0, 1); }
  /// Coefficients uniform in [-1, 1].
  static Polynomial2 random(int degree, std::mt19937_64& rng);

  int degree() const noexcept { return deg_; }
  double coeff(int i, int j) const;
  void set_coeff(int i, int j, double c);

  double operator()(const Vec2& p) const;
  Vec2 gradient(const Vec2& p) const;
  SymTensor2 hessian(const Vec2& p) const;

  Polynomial2 dx() const;
  Polynomial2 dy() const;

  Polynomial2& operator+=(const Polynomial2& o);
  Polynomial2& operator*=(double s);
  friend Polynomial2 operator+(Polynomial2 a, const Polynomial2& b) { return a += b; }
  friend Polynomial2 operator-(Polynomial2 a, const Polynomial2& b) { return a += (-1.0) * b; }
  friend Polynomial2 operator*(double s, Polynomial2 a) { return a *= s; }
  friend Polynomial2 operator*(const Polynomial2& a, const Polynomial2& b);

private:
  int deg_;
  std::vector<double> c_; // (deg+1)^2, index i*(deg+1)+j; entries with i+j > deg stay 0
};

/// Polar tensor Gauss rule on a disk, exact for polynomials of the given degree.
double integrate_disk(const Disk& disk, int poly_degree, const std::function<double(const Vec2&)>& f);

/// Max deviation of (value, gradient) from the best affine fit over n boundary
/// samples of the disk, and the max of |value|, |gradient| (clamped test).
struct TraceDeviation {
  double from_affine = 0.0;
  double from_zero = 0.0;
};
TraceDeviation first_order_trace(const Polynomial2& p, const Disk& disk, int n_samples = 64);

/// Integrals of [xi, eta] chi under the cyclic permutations
/// (xi, eta, chi), (chi, xi, eta), (eta, chi, xi), and their largest pairwise gap.
struct CyclicIntegrals {
  std::array<double, 3> integrals{};
  double max_discrepancy = 0.0;
};

/// Requires one argument with zero value and gradient on the boundary;
/// throws ValidationError otherwise.
CyclicIntegrals monge_ampere_symmetry_check(const Polynomial2& xi, const Polynomial2& eta, const Polynomial2& chi,
                                            const Disk& disk, double trace_tolerance = 1e-10);

/// int [xi, eta] chi versus int [xi, chi] eta for xi with affine value and
/// gradient on the boundary (throws ValidationError otherwise).
struct PairSwap {
  double forward = 0.0;
  double swapped = 0.0;
  double discrepancy = 0.0;
};
PairSwap affine_trace_swap_check(const Polynomial2& xi, const Polynomial2& eta, const Polynomial2& chi,
                                 const Disk& disk, double trace_tolerance = 1e-10);

} // namespace airy
