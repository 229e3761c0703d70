#include "airy/hct_element.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace airy {

namespace {

constexpr int kExp[10][2] = {{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}, {3, 0}, {2, 1}, {1, 2}, {0, 3}};

double falling(int a, int i) {
  double f = 1.0;
  for (int k = 0; k < i; ++k) f *= (a - k);
  return f;
}

double ipow(double x, int n) {
  double r = 1.0;
  for (int k = 0; k < n; ++k) r *= x;
  return r;
}

// d^i/du^i d^j/dw^j of u^a w^b
double mono_derivative(int m, int i, int j, double u, double w) {
  const int a = kExp[m][0], b = kExp[m][1];
  if (i > a || j > b) return 0.0;
  return falling(a, i) * falling(b, j) * ipow(u, a - i) * ipow(w, b - j);
}

} // namespace

Eigen::Matrix<double, 8, 10> cubic_monomial_jets(const Vec2& x, const Vec2& origin, double scale) {
  const double u = (x[0] - origin[0]) / scale;
  const double w = (x[1] - origin[1]) / scale;
  const double s1 = 1.0 / scale, s2 = s1 * s1, s3 = s2 * s1;
  Eigen::Matrix<double, 8, 10> J;
  for (int m = 0; m < 10; ++m) {
    J(0, m) = mono_derivative(m, 0, 0, u, w);
    J(1, m) = s1 * mono_derivative(m, 1, 0, u, w);
    J(2, m) = s1 * mono_derivative(m, 0, 1, u, w);
    J(3, m) = s2 * mono_derivative(m, 2, 0, u, w);
    J(4, m) = s2 * mono_derivative(m, 1, 1, u, w);
    J(5, m) = s2 * mono_derivative(m, 0, 2, u, w);
    J(6, m) = s3 * (mono_derivative(m, 3, 0, u, w) + mono_derivative(m, 1, 2, u, w));
    J(7, m) = s3 * (mono_derivative(m, 2, 1, u, w) + mono_derivative(m, 0, 3, u, w));
  }
  return J;
}

const TriangleRule& degree5_rule() {
  static const TriangleRule rule = [] {
    TriangleRule r;
    const double a1 = 0.059715871789770, b1 = 0.470142064105115;
    const double a2 = 0.797426985353087, b2 = 0.101286507323456;
    const double w0 = 0.225, w1 = 0.132394152788506, w2 = 0.125939180544827;
    r.bary = {{{1.0 / 3, 1.0 / 3, 1.0 / 3},
               {a1, b1, b1},
               {b1, a1, b1},
               {b1, b1, a1},
               {a2, b2, b2},
               {b2, a2, b2},
               {b2, b2, a2}}};
    r.weight = {w0, w1, w1, w1, w2, w2, w2};
    return r;
  }();
  return rule;
}

HctElement::HctElement(const std::array<Vec2, 3>& vertices, const std::array<Vec2, 3>& edge_normals)
    : p_(vertices), n_(edge_normals) {
  c_ = (p_[0] + p_[1] + p_[2]) / 3.0;
  area_ = 0.5 * cross(p_[1] - p_[0], p_[2] - p_[0]);
  s_ = std::max({(p_[1] - p_[0]).norm(), (p_[2] - p_[1]).norm(), (p_[0] - p_[2]).norm()});

  // Rows: 21 C1 matching conditions on the interior edges, then 12 dof rows.
  // Derivative rows are written in scaled units (times s) for conditioning.
  Eigen::Matrix<double, 33, 30> A = Eigen::Matrix<double, 33, 30>::Zero();
  Eigen::Matrix<double, 33, 12> B = Eigen::Matrix<double, 33, 12>::Zero();
  int row = 0;
  for (int j = 0; j < 3; ++j) {
    const int left = (j + 1) % 3, right = (j + 2) % 3; // sub-triangles sharing segment c -> p_j
    const Vec2 d = p_[j] - c_;
    const Vec2 nrm = rotate_quarter_cw(d.normalized());
    for (double tau : {0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0}) {
      const auto J = cubic_monomial_jets(c_ + tau * d, c_, s_);
      A.block<1, 10>(row, 10 * left) = J.row(0);
      A.block<1, 10>(row, 10 * right) = -J.row(0);
      ++row;
    }
    for (double tau : {0.0, 0.5, 1.0}) {
      const auto J = cubic_monomial_jets(c_ + tau * d, c_, s_);
      const Eigen::Matrix<double, 1, 10> dn = s_ * (nrm[0] * J.row(1) + nrm[1] * J.row(2));
      A.block<1, 10>(row, 10 * left) = dn;
      A.block<1, 10>(row, 10 * right) = -dn;
      ++row;
    }
  }
  for (int i = 0; i < 3; ++i) {
    const int sub = (i + 1) % 3; // contains p_i
    const auto J = cubic_monomial_jets(p_[i], c_, s_);
    A.block<1, 10>(row, 10 * sub) = J.row(0);
    B(row++, 3 * i) = 1.0;
    A.block<1, 10>(row, 10 * sub) = s_ * J.row(1);
    B(row++, 3 * i + 1) = 1.0;
    A.block<1, 10>(row, 10 * sub) = s_ * J.row(2);
    B(row++, 3 * i + 2) = 1.0;
  }
  for (int j = 0; j < 3; ++j) {
    const Vec2 mid = 0.5 * (p_[(j + 1) % 3] + p_[(j + 2) % 3]);
    const auto J = cubic_monomial_jets(mid, c_, s_);
    A.block<1, 10>(row, 10 * j) = s_ * (n_[j][0] * J.row(1) + n_[j][1] * J.row(2));
    B(row++, 9 + j) = 1.0;
  }

  Eigen::HouseholderQR<Eigen::Matrix<double, 33, 30>> qr(A);
  coef_ = qr.solve(B);
  // undo the derivative scaling of the dof rows
  for (int i = 0; i < 3; ++i) {
    coef_.col(3 * i + 1) *= s_;
    coef_.col(3 * i + 2) *= s_;
    coef_.col(9 + i) *= s_;
  }
}

std::array<Vec2, 3> HctElement::subtriangle(int k) const { return {p_[(k + 1) % 3], p_[(k + 2) % 3], c_}; }

int HctElement::subtriangle_of(const std::array<double, 3>& bary) {
  int k = 0;
  if (bary[1] < bary[k]) k = 1;
  if (bary[2] < bary[k]) k = 2;
  return k;
}

HctBasisJets HctElement::basis(const Vec2& x, int sub) const {
  const auto J = cubic_monomial_jets(x, c_, s_);
  const Eigen::Matrix<double, 8, 12> P = J * coefficients(sub);
  HctBasisJets out;
  out.value = P.row(0).transpose();
  out.gradient = P.block<2, 12>(1, 0).transpose();
  out.hessian = P.block<3, 12>(3, 0).transpose();
  out.grad_laplacian = P.block<2, 12>(6, 0).transpose();
  return out;
}

HctBasisJets HctElement::basis(const Vec2& x) const {
  const double det = cross(p_[1] - p_[0], p_[2] - p_[0]);
  const double l1 = cross(x - p_[0], p_[2] - p_[0]) / det;
  const double l2 = cross(p_[1] - p_[0], x - p_[0]) / det;
  return basis(x, subtriangle_of({1.0 - l1 - l2, l1, l2}));
}

Eigen::Matrix<double, 12, 12> HctElement::hessian_stiffness() const {
  Eigen::Matrix<double, 12, 12> K = Eigen::Matrix<double, 12, 12>::Zero();
  const auto& rule = degree5_rule();
  for (int k = 0; k < 3; ++k) {
    const auto t = subtriangle(k);
    const double a = 0.5 * std::abs(cross(t[1] - t[0], t[2] - t[0]));
    Eigen::Matrix<double, 10, 10> G = Eigen::Matrix<double, 10, 10>::Zero();
    for (std::size_t q = 0; q < rule.weight.size(); ++q) {
      const Vec2 x = rule.bary[q][0] * t[0] + rule.bary[q][1] * t[1] + rule.bary[q][2] * t[2];
      const auto J = cubic_monomial_jets(x, c_, s_);
      const double w = a * rule.weight[q];
      G.noalias() += w * (J.row(3).transpose() * J.row(3) + 2.0 * J.row(4).transpose() * J.row(4) +
                          J.row(5).transpose() * J.row(5));
    }
    const auto C = coefficients(k);
    K.noalias() += C.transpose() * G * C;
  }
  return K;
}

Eigen::Matrix<double, 12, 12> HctElement::laplacian_stiffness() const {
  Eigen::Matrix<double, 12, 12> K = Eigen::Matrix<double, 12, 12>::Zero();
  const auto& rule = degree5_rule();
  for (int k = 0; k < 3; ++k) {
    const auto t = subtriangle(k);
    const double a = 0.5 * std::abs(cross(t[1] - t[0], t[2] - t[0]));
    Eigen::Matrix<double, 10, 10> G = Eigen::Matrix<double, 10, 10>::Zero();
    for (std::size_t q = 0; q < rule.weight.size(); ++q) {
      const Vec2 x = rule.bary[q][0] * t[0] + rule.bary[q][1] * t[1] + rule.bary[q][2] * t[2];
      const auto J = cubic_monomial_jets(x, c_, s_);
      const Eigen::Matrix<double, 1, 10> lap = J.row(3) + J.row(5);
      G.noalias() += (a * rule.weight[q]) * lap.transpose() * lap;
    }
    const auto C = coefficients(k);
    K.noalias() += C.transpose() * G * C;
  }
  return K;
}

Eigen::Matrix<double, 12, 1> HctElement::load(const std::function<double(const Vec2&)>& f) const {
  Eigen::Matrix<double, 12, 1> b = Eigen::Matrix<double, 12, 1>::Zero();
  const auto& rule = degree5_rule();
  for (int k = 0; k < 3; ++k) {
    const auto t = subtriangle(k);
    const double a = 0.5 * std::abs(cross(t[1] - t[0], t[2] - t[0]));
    Eigen::Matrix<double, 10, 1> m = Eigen::Matrix<double, 10, 1>::Zero();
    for (std::size_t q = 0; q < rule.weight.size(); ++q) {
      const Vec2 x = rule.bary[q][0] * t[0] + rule.bary[q][1] * t[1] + rule.bary[q][2] * t[2];
      m += (a * rule.weight[q] * f(x)) * cubic_monomial_jets(x, c_, s_).row(0).transpose();
    }
    b.noalias() += coefficients(k).transpose() * m;
  }
  return b;
}

} // namespace airy
