#include "airy/monge_ampere.hpp"

#include "airy/domain.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace airy {

Polynomial2::Polynomial2(int degree) : deg_(degree) {
  if (degree < 0) throw std::invalid_argument("polynomial degree must be non-negative");
  c_.assign(static_cast<std::size_t>((degree + 1) * (degree + 1)), 0.0);
}

Polynomial2 Polynomial2::constant(double c) {
  Polynomial2 p(0);
  p.c_[0] = c;
  return p;
}

Polynomial2 Polynomial2::monomial(int i, int j, double c) {
  Polynomial2 p(i + j);
  p.set_coeff(i, j, c);
  return p;
}

Polynomial2 Polynomial2::random(int degree, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Polynomial2 p(degree);
  for (int i = 0; i <= degree; ++i)
    for (int j = 0; i + j <= degree; ++j) p.set_coeff(i, j, u(rng));
  return p;
}

double Polynomial2::coeff(int i, int j) const {
  if (i < 0 || j < 0 || i + j > deg_) return 0.0;
  return c_[static_cast<std::size_t>(i * (deg_ + 1) + j)];
}

void Polynomial2::set_coeff(int i, int j, double c) {
  if (i < 0 || j < 0 || i + j > deg_) throw std::out_of_range("monomial exceeds polynomial degree");
  c_[static_cast<std::size_t>(i * (deg_ + 1) + j)] = c;
}

double Polynomial2::operator()(const Vec2& p) const {
  // Horner in y inside Horner in x
  double acc = 0.0;
  for (int i = deg_; i >= 0; --i) {
    double row = 0.0;
    for (int j = deg_ - i; j >= 0; --j) row = row * p[1] + coeff(i, j);
    acc = acc * p[0] + row;
  }
  return acc;
}

Polynomial2 Polynomial2::dx() const {
  Polynomial2 d(std::max(deg_ - 1, 0));
  for (int i = 1; i <= deg_; ++i)
    for (int j = 0; i + j <= deg_; ++j) d.set_coeff(i - 1, j, i * coeff(i, j));
  return d;
}

Polynomial2 Polynomial2::dy() const {
  Polynomial2 d(std::max(deg_ - 1, 0));
  for (int i = 0; i <= deg_; ++i)
    for (int j = 1; i + j <= deg_; ++j) d.set_coeff(i, j - 1, j * coeff(i, j));
  return d;
}

Vec2 Polynomial2::gradient(const Vec2& p) const { return {dx()(p), dy()(p)}; }

SymTensor2 Polynomial2::hessian(const Vec2& p) const {
  const Polynomial2 gx = dx(), gy = dy();
  return {gx.dx()(p), gx.dy()(p), gy.dy()(p)};
}

Polynomial2& Polynomial2::operator+=(const Polynomial2& o) {
  if (o.deg_ > deg_) {
    Polynomial2 r(o.deg_);
    for (int i = 0; i <= deg_; ++i)
      for (int j = 0; i + j <= deg_; ++j) r.set_coeff(i, j, coeff(i, j));
    *this = std::move(r);
  }
  for (int i = 0; i <= o.deg_; ++i)
    for (int j = 0; i + j <= o.deg_; ++j) set_coeff(i, j, coeff(i, j) + o.coeff(i, j));
  return *this;
}

Polynomial2& Polynomial2::operator*=(double s) {
  for (double& c : c_) c *= s;
  return *this;
}

Polynomial2 operator*(const Polynomial2& a, const Polynomial2& b) {
  Polynomial2 r(a.deg_ + b.deg_);
  for (int i = 0; i <= a.deg_; ++i)
    for (int j = 0; i + j <= a.deg_; ++j) {
      const double ca = a.coeff(i, j);
      if (ca == 0.0) continue;
      for (int k = 0; k <= b.deg_; ++k)
        for (int l = 0; k + l <= b.deg_; ++l) {
          r.set_coeff(i + k, j + l, r.coeff(i + k, j + l) + ca * b.coeff(k, l));
        }
    }
  return r;
}

double integrate_disk(const Disk& disk, int poly_degree, const std::function<double(const Vec2&)>& f) {
  // r^(d+1) in the radius, trigonometric degree d in the angle
  const int nr = poly_degree / 2 + 2;
  const int nt = poly_degree + 2;
  const auto gl = gauss_legendre(nr);
  const double dth = 2.0 * std::numbers::pi / nt;
  double acc = 0.0;
  for (const auto& [xi, wi] : gl) {
    const double r = 0.5 * (xi + 1.0) * disk.radius;
    const double wr = 0.5 * wi * disk.radius * r;
    for (int k = 0; k < nt; ++k) {
      const double th = k * dth;
      acc += wr * dth * f(disk.center + r * Vec2(std::cos(th), std::sin(th)));
    }
  }
  return acc;
}

TraceDeviation first_order_trace(const Polynomial2& p, const Disk& disk, int n_samples) {
  const Polynomial2 gx = p.dx(), gy = p.dy();
  Eigen::MatrixXd a(3 * n_samples, 3);
  Eigen::VectorXd b(3 * n_samples);
  TraceDeviation dev;
  for (int k = 0; k < n_samples; ++k) {
    const double th = 2.0 * std::numbers::pi * k / n_samples;
    const Vec2 x = disk.center + disk.radius * Vec2(std::cos(th), std::sin(th));
    const Vec2 r = x - disk.center;
    a.row(3 * k) << 1.0, r[0], r[1];
    a.row(3 * k + 1) << 0.0, 1.0, 0.0;
    a.row(3 * k + 2) << 0.0, 0.0, 1.0;
    b[3 * k] = p(x);
    b[3 * k + 1] = gx(x);
    b[3 * k + 2] = gy(x);
  }
  dev.from_zero = b.cwiseAbs().maxCoeff();
  const Eigen::Vector3d c = a.colPivHouseholderQr().solve(b);
  dev.from_affine = (a * c - b).cwiseAbs().maxCoeff();
  return dev;
}

namespace {

double bracket_integral(const Polynomial2& a, const Polynomial2& b, const Polynomial2& c, const Disk& disk) {
  const int degree = std::max(a.degree() - 2, 0) + std::max(b.degree() - 2, 0) + c.degree();
  return integrate_disk(disk, degree, [&](const Vec2& x) {
    return monge_ampere_bracket(a.hessian(x), b.hessian(x)) * c(x);
  });
}

double scale_of(const std::array<double, 3>& v) {
  return std::max({std::abs(v[0]), std::abs(v[1]), std::abs(v[2]), 1.0});
}

} // namespace

CyclicIntegrals monge_ampere_symmetry_check(const Polynomial2& xi, const Polynomial2& eta, const Polynomial2& chi,
                                            const Disk& disk, double trace_tolerance) {
  const bool clamped = std::ranges::any_of(std::array{&xi, &eta, &chi}, [&](const Polynomial2* p) {
    return first_order_trace(*p, disk).from_zero <= trace_tolerance;
  });
  if (!clamped) {
    throw ValidationError("none of the three fields vanishes with its gradient on the boundary");
  }
  CyclicIntegrals out;
  out.integrals = {bracket_integral(xi, eta, chi, disk), bracket_integral(chi, xi, eta, disk),
                   bracket_integral(eta, chi, xi, disk)};
  const auto& v = out.integrals;
  out.max_discrepancy = std::max({std::abs(v[0] - v[1]), std::abs(v[1] - v[2]), std::abs(v[0] - v[2])}) / scale_of(v);
  return out;
}

PairSwap affine_trace_swap_check(const Polynomial2& xi, const Polynomial2& eta, const Polynomial2& chi,
                                 const Disk& disk, double trace_tolerance) {
  const TraceDeviation d = first_order_trace(xi, disk);
  if (d.from_affine > trace_tolerance) {
    throw ValidationError("first field is not affine (value and gradient) on the boundary");
  }
  PairSwap out;
  out.forward = bracket_integral(xi, eta, chi, disk);
  out.swapped = bracket_integral(xi, chi, eta, disk);
  out.discrepancy = std::abs(out.forward - out.swapped) / scale_of({out.forward, out.swapped, 0.0});
  return out;
}

} // namespace airy
