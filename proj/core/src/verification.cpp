#include "airy/verification.hpp"

#include "airy/monge_ampere.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

namespace airy {

namespace {

double comp(const SymTensor2& m, int i, int j) {
  if (i != j) return m.t12;
  return i == 0 ? m.t11 : m.t22;
}

std::string fmt(const char* pattern, double a, double b, double c) {
  char buf[160];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

} // namespace

Eigen::Vector3d MichellIntegrals::scaled(const MaterialParams& mat) const {
  return Eigen::Vector3d(i0, i1, i2) / mat.plane_strain_modulus();
}

MichellIntegrals michell_integrals(const JetFunction& v, const BoundaryLoop& loop, const MaterialParams& mat,
                                   const Vec2& reference) {
  const double k = 1.0 / (1.0 - mat.poisson_ratio());
  const Eigen::Vector3d r = line_integral(loop, [&](const Vec2& x, const Vec2& n, const Vec2& t) {
    const ScalarJet3 j = v(x);
    const Vec2 p = x - reference;
    const double dn = j.grad_laplacian.dot(n);
    const double dt = j.grad_laplacian.dot(t);
    const Vec2 ht = j.hessian.apply(t);
    return Eigen::Vector3d(dn, p[0] * dt - p[1] * dn + k * ht[0], p[0] * dn + p[1] * dt + k * ht[1]);
  });
  return {r[0], r[1], r[2]};
}

YavariIntegrals yavari_integrals(const StrainFunction& eps, const BoundaryLoop& loop, const Vec2& reference) {
  const Eigen::Vector3d r = line_integral(loop, [&](const Vec2& x, const Vec2&, const Vec2& t) {
    const StrainJet e = eps(x);
    const Vec2 p = x - reference;
    const SymTensor2* d[2] = {&e.d1, &e.d2};
    // e_{ij,k} = comp(*d[k], i, j)
    auto de = [&](int i, int j, int k) { return comp(*d[k], i, j); };
    double rot = 0.0;
    for (int q = 0; q < 2; ++q) rot += (de(0, q, 1) - de(q, 1, 0)) * t[q];
    Vec2 tr = Vec2::Zero();
    for (int rr = 0; rr < 2; ++rr) {
      for (int c = 0; c < 2; ++c) {
        double term = comp(e.strain, rr, c);
        for (int q = 0; q < 2; ++q) term -= p[q] * (de(rr, c, q) - de(c, q, rr));
        tr[rr] += term * t[c];
      }
    }
    return Eigen::Vector3d(rot, tr[0], tr[1]);
  });
  return {r[0], {r[1], r[2]}};
}

StrainFunction airy_strain(const JetFunction& v, const MaterialParams& mat, double h) {
  return [v, mat, h](const Vec2& x) {
    auto strain_at = [&](const Vec2& y) { return constitutive_strain(airy_stress(v(y).hessian), mat); };
    auto diff = [&](const Vec2& dir) {
      const SymTensor2 f = (-1.0) * strain_at(x + 2.0 * h * dir) + 8.0 * strain_at(x + h * dir) -
                           8.0 * strain_at(x - h * dir) + strain_at(x - 2.0 * h * dir);
      return (1.0 / (12.0 * h)) * f;
    };
    return StrainJet{strain_at(x), diff({1.0, 0.0}), diff({0.0, 1.0})};
  };
}

EquivalenceReport check_strain_airy_equivalence(const JetFunction& v, const BoundaryLoop& loop,
                                                const MaterialParams& mat, double fd_step) {
  EquivalenceReport rep;
  rep.airy = michell_integrals(v, loop, mat, loop.center);
  rep.strain = yavari_integrals(airy_strain(v, mat, fd_step), loop, loop.center);
  const double k = -mat.plane_strain_modulus();
  const Eigen::Vector3d lhs = k * Eigen::Vector3d(rep.strain.rotational, rep.strain.translational[0],
                                                  rep.strain.translational[1]);
  const Eigen::Vector3d rhs(rep.airy.i0, rep.airy.i1, rep.airy.i2);
  const double scale = std::max(rhs.cwiseAbs().maxCoeff(), 1e-300);
  rep.max_relative = (lhs - rhs).cwiseAbs().maxCoeff() / scale;
  return rep;
}

double divergence_identity_check(const std::function<double(const Vec2&)>& v, const std::vector<Vec2>& samples,
                                 double h) {
  auto hess = [&](const Vec2& x) {
    const Vec2 e1(h, 0.0), e2(0.0, h);
    const double f0 = v(x);
    const double xx = (v(x + e1) - 2.0 * f0 + v(x - e1)) / (h * h);
    const double yy = (v(x + e2) - 2.0 * f0 + v(x - e2)) / (h * h);
    const double xy = (v(x + e1 + e2) - v(x + e1 - e2) - v(x - e1 + e2) + v(x - e1 - e2)) / (4.0 * h * h);
    return SymTensor2{xx, xy, yy};
  };
  double worst = 0.0;
  for (const Vec2& x : samples) {
    const Vec2 e1(h, 0.0), e2(0.0, h);
    const SymTensor2 d1 = (0.5 / h) * (hess(x + e1) - hess(x - e1));
    const SymTensor2 d2 = (0.5 / h) * (hess(x + e2) - hess(x - e2));
    // rows of cof(H) = [[H22, -H12], [-H12, H11]]
    const Vec2 div(d1.t22 - d2.t12, -d1.t12 + d2.t11);
    worst = std::max(worst, div.norm());
  }
  return worst;
}

double divergence_identity_check(const std::function<SymTensor2(const Vec2&)>& hessian,
                                 const std::vector<Vec2>& samples, double h) {
  double worst = 0.0;
  for (const Vec2& x : samples) {
    auto diff = [&](const Vec2& dir) {
      return (1.0 / (12.0 * h)) * ((-1.0) * hessian(x + 2.0 * h * dir) + 8.0 * hessian(x + h * dir) -
                                   8.0 * hessian(x - h * dir) + hessian(x - 2.0 * h * dir));
    };
    const SymTensor2 d1 = diff({1.0, 0.0});
    const SymTensor2 d2 = diff({0.0, 1.0});
    const Vec2 div(d1.t22 - d2.t12, -d1.t12 + d2.t11);
    worst = std::max(worst, div.norm());
  }
  return worst;
}

Vec2 tangential_hessian_integral(const JetFunction& v, const BoundaryLoop& loop) {
  return line_integral(loop, [&](const Vec2& x, const Vec2&, const Vec2& t) { return v(x).hessian.apply(t); });
}

double form_identity_gap(const std::function<std::pair<double, Vec2>(const Vec2&)>& f, const BoundaryLoop& loop) {
  const Eigen::Vector4d r = line_integral(loop, [&](const Vec2& x, const Vec2&, const Vec2& t) {
    const auto [val, g] = f(x);
    const double dt = g.dot(t);
    return Eigen::Vector4d(val * t[0], val * t[1], -x[0] * dt, -x[1] * dt);
  });
  return std::max(std::abs(r[0] - r[2]), std::abs(r[1] - r[3]));
}

CheckResult make_check(std::string name, double expected, double computed, double tolerance, std::string note) {
  const bool pass = std::isfinite(computed) && std::abs(computed - expected) <= tolerance;
  return {std::move(name), expected, computed, tolerance, pass, std::move(note)};
}

std::vector<CheckResult> annulus_suite() {
  std::vector<CheckResult> out;
  const int n_quad = 512;
  const Vec2 centre(0.0, 0.0);
  for (double nu : {0.0, 0.3}) {
    const MaterialParams mat(1.0, nu);
    for (double rho : {0.2, 0.5}) {
      const BoundaryLoop cw = circle_loop(centre, rho, n_quad, Traversal::Clockwise);
      const BoundaryLoop ccw = circle_loop(centre, rho, n_quad, Traversal::CounterClockwise);

      auto run = [&](const DefectConfiguration& cfg, const std::string& tag, const Eigen::Vector3d& charges) {
        const JetFunction v = [&cfg, &mat](const Vec2& x) { return eval_plastic_potential(x, cfg, mat); };
        const Eigen::Vector3d m = michell_integrals(v, cw, mat).scaled(mat);
        const char* comps[3] = {"theta", "alpha_1", "alpha_2"};
        for (int c = 0; c < 3; ++c) {
          out.push_back(make_check("michell " + tag + fmt(" rho=%g nu=%g", rho, nu, 0) + " " + comps[c], charges[c],
                                   m[c], 1e-8, "clockwise circle, analytic jets"));
        }
        const EquivalenceReport eq = check_strain_airy_equivalence(v, ccw, mat, 1e-4 * rho);
        out.push_back(make_check("strain/airy equivalence " + tag + fmt(" rho=%g nu=%g", rho, nu, 0), 0.0,
                                 eq.max_relative, 1e-6, "relative, strain gradient by finite differences"));
        const YavariIntegrals y = yavari_integrals(airy_strain(v, mat, 1e-4 * rho), ccw);
        out.push_back(make_check("strain-form rotational " + tag + fmt(" rho=%g nu=%g", rho, nu, 0), charges[0],
                                 y.rotational, 1e-6));
        out.push_back(make_check("strain-form translational " + tag + fmt(" rho=%g nu=%g", rho, nu, 0), 0.0,
                                 (y.translational - Vec2(charges[1], charges[2])).norm(), 1e-6));
        out.push_back(make_check("tangential hessian " + tag + fmt(" rho=%g nu=%g", rho, nu, 0), 0.0,
                                 tangential_hessian_integral(v, ccw).norm(), 1e-10));
      };

      for (double s : {0.3, -1.0}) {
        DefectConfiguration cfg;
        cfg.add(Disclination{centre, s});
        run(cfg, fmt("disclination s=%g", s, 0, 0), {s, 0.0, 0.0});
      }
      for (const Vec2& b : {Vec2(1.0, 0.0), Vec2(0.3, -0.7)}) {
        DefectConfiguration cfg;
        cfg.add(Dislocation{centre, b});
        run(cfg, fmt("dislocation b=(%g,%g)", b[0], b[1], 0), {0.0, b[0], b[1]});
      }
    }
  }

  // defects outside the loop contribute nothing
  const MaterialParams mat(1.0, 0.3);
  DefectConfiguration far;
  far.add(Dislocation{{0.8, 0.1}, {0.4, 1.0}}).add(Disclination{{-0.7, 0.5}, 0.6});
  const JetFunction vf = [&](const Vec2& x) { return eval_plastic_potential(x, far, mat); };
  const Eigen::Vector3d cross_terms = michell_integrals(vf, circle_loop(centre, 0.3, n_quad, Traversal::Clockwise), mat).scaled(mat);
  out.push_back(make_check("cross terms vanish", 0.0, cross_terms.cwiseAbs().maxCoeff(), 1e-8));

  // same charges on two radii around an off-centre pair of defects
  DefectConfiguration pair;
  pair.add(Dislocation{{0.05, -0.02}, {0.3, -0.7}}).add(Disclination{{-0.04, 0.03}, 0.2});
  const JetFunction vp = [&](const Vec2& x) { return eval_plastic_potential(x, pair, mat); };
  const Eigen::Vector3d a = michell_integrals(vp, circle_loop(centre, 0.2, n_quad, Traversal::Clockwise), mat).scaled(mat);
  const Eigen::Vector3d b = michell_integrals(vp, circle_loop(centre, 0.5, n_quad, Traversal::Clockwise), mat).scaled(mat);
  out.push_back(make_check("radius independence", 0.0, (a - b).cwiseAbs().maxCoeff(), 1e-8));

  std::mt19937_64 rng(42);
  const Polynomial2 p = Polynomial2::random(5, rng);
  const double gap = form_identity_gap([&](const Vec2& x) { return std::pair{p(x), p.gradient(x)}; },
                                       circle_loop({0.1, -0.2}, 0.7, n_quad));
  out.push_back(make_check("line integral identity f dx_r = -x_r d_t f", 0.0, gap, 1e-10));
  return out;
}

std::vector<CheckResult> monge_ampere_suite() {
  std::vector<CheckResult> out;
  const Disk disk{Vec2::Zero(), 1.0};
  const Polynomial2 x = Polynomial2::x(), y = Polynomial2::y();
  const Polynomial2 bump = Polynomial2::constant(1.0) - x * x - y * y;
  const Polynomial2 bump2 = bump * bump;

  const CyclicIntegrals c = monge_ampere_symmetry_check(bump2, x * x, y * y, disk);
  out.push_back(make_check("cyclic symmetry, bump^2 x1^2 x2^2", 0.0, c.max_discrepancy, 1e-8));

  std::mt19937_64 rng(2024);
  for (int k = 0; k < 5; ++k) {
    const Polynomial2 xi = bump2 * Polynomial2::random(2, rng);
    const Polynomial2 eta = Polynomial2::random(4, rng), chi = Polynomial2::random(3, rng);
    const CyclicIntegrals r = monge_ampere_symmetry_check(eta, xi, chi, disk);
    out.push_back(make_check("cyclic symmetry, random set " + std::to_string(k), 0.0, r.max_discrepancy, 1e-8));

    Polynomial2 aff = Polynomial2::random(1, rng);
    const PairSwap s = affine_trace_swap_check(aff + bump2 * Polynomial2::random(2, rng), eta, chi, disk);
    out.push_back(make_check("pair swap, affine trace, random set " + std::to_string(k), 0.0, s.discrepancy, 1e-8));
  }
  const CyclicIntegrals z = monge_ampere_symmetry_check(bump2, Polynomial2::constant(0.0), y * y, disk);
  out.push_back(make_check("zero argument", 0.0, std::abs(z.integrals[0]) + std::abs(z.integrals[1]) + std::abs(z.integrals[2]), 1e-14));
  return out;
}

} // namespace airy
