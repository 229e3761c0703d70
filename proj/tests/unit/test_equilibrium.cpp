#include "airy/equilibrium.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <gtest/gtest.h>

#include <numbers>
#include <random>

using namespace airy;

namespace {

constexpr double kPi = std::numbers::pi;
const MaterialParams kMat(1.0, 0.3);

std::shared_ptr<const PerforatedDomain> make_domain(const DefectConfiguration& cfg, double eps) {
  return std::make_shared<PerforatedDomain>(build_perforated_domain(OuterBoundary::disk({0, 0}, 1), cfg, eps));
}

EquilibriumRun run(const std::shared_ptr<const PerforatedDomain>& dom, double h, int refine = 0) {
  auto mesh = std::make_shared<Mesh>(generate_mesh(*dom, h));
  for (int k = 0; k < refine; ++k) mesh = std::make_shared<Mesh>(refine_uniform(*mesh, *dom));
  return solve_on_mesh(dom, mesh, kMat);
}

DefectConfiguration random_configuration(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> pos(-0.55, 0.55), charge(-1.0, 1.0);
  DefectConfiguration cfg;
  std::vector<Vec2> placed;
  while (static_cast<int>(placed.size()) < n) {
    const Vec2 x(pos(rng), pos(rng));
    bool ok = x.norm() < 0.6;
    for (const Vec2& p : placed) ok = ok && (p - x).norm() > 0.35;
    if (!ok) continue;
    placed.push_back(x);
    if (placed.size() % 2)
      cfg.add(Disclination{x, charge(rng)});
    else
      cfg.add(Dislocation{x, {charge(rng), charge(rng)}});
  }
  return cfg;
}

// Integrates g over [a, b] with a composite Gauss-Legendre rule.
double integrate(const std::function<double(double)>& g, double a, double b) {
  const auto rule = gauss_legendre(20);
  double s = 0.0;
  const int pieces = 16;
  for (int k = 0; k < pieces; ++k) {
    const double lo = a + (b - a) * k / pieces, hi = a + (b - a) * (k + 1) / pieces;
    for (const auto& [x, w] : rule) s += 0.5 * (hi - lo) * w * g(0.5 * (lo + hi) + 0.5 * (hi - lo) * x);
  }
  return s;
}

// Centred core of radius e in the unit disk. The r = 0 cell field is radial,
// f = A + B r^2 + C ln r + D r^2 ln r; the r = 1 field is g(r) cos(theta),
// g = A r^3 + B r + C / r + D r ln r.
double exact_m00(double e) {
  Eigen::Matrix4d a;
  Eigen::Vector4d rhs(1, 0, 0, 0);
  const auto row = [](double r, bool deriv) {
    return deriv ? Eigen::RowVector4d(0, 2 * r, 1 / r, 2 * r * std::log(r) + r)
                 : Eigen::RowVector4d(1, r * r, std::log(r), r * r * std::log(r));
  };
  a << row(e, false), row(e, true), row(1, false), row(1, true);
  const Eigen::Vector4d c = a.partialPivLu().solve(rhs);
  return 2 * kPi * integrate(
                       [&](double r) {
                         const double f1 = 2 * c[1] * r + c[2] / r + c[3] * (2 * r * std::log(r) + r);
                         const double f2 = 2 * c[1] - c[2] / (r * r) + c[3] * (2 * std::log(r) + 3);
                         return (f2 * f2 + f1 * f1 / (r * r)) * r;
                       },
                       e, 1.0);
}

double exact_m11(double e) {
  Eigen::Matrix4d a;
  Eigen::Vector4d rhs(e, 1, 0, 0);
  const auto row = [](double r, bool deriv) {
    return deriv ? Eigen::RowVector4d(3 * r * r, 1, -1 / (r * r), std::log(r) + 1)
                 : Eigen::RowVector4d(r * r * r, r, 1 / r, r * std::log(r));
  };
  a << row(e, false), row(e, true), row(1, false), row(1, true);
  const Eigen::Vector4d c = a.partialPivLu().solve(rhs);
  return kPi * integrate(
                   [&](double r) {
                     const double g = c[0] * r * r * r + c[1] * r + c[2] / r + c[3] * r * std::log(r);
                     const double g1 = 3 * c[0] * r * r + c[1] - c[2] / (r * r) + c[3] * (std::log(r) + 1);
                     const double g2 = 6 * c[0] * r + 2 * c[2] / (r * r * r) + c[3] / r;
                     const double t = g1 / r - g / (r * r);
                     const double q = (g1 - g / r) / r;
                     return (g2 * g2 + t * t + 2 * q * q) * r;
                   },
                   e, 1.0);
}

} // namespace

TEST(InfluenceMatrix, SymmetricPositiveDefiniteForRandomConfigurations) {
  std::mt19937_64 rng(21);
  for (int n = 1; n <= 3; ++n) {
    const auto dom = make_domain(random_configuration(rng, n), 0.1);
    const EquilibriumRun r = run(dom, 0.08);
    const Eigen::MatrixXd& m = r.solution.influence;
    ASSERT_EQ(m.rows(), 3 * n);
    EXPECT_LT((m - m.transpose()).cwiseAbs().maxCoeff(), 1e-10 * m.cwiseAbs().maxCoeff()) << "N=" << n;
    EXPECT_EQ(Eigen::LLT<Eigen::MatrixXd>(m).info(), Eigen::Success) << "N=" << n;
    const Eigen::MatrixXd from_k = influence_matrix_from_stiffness(r.basis);
    EXPECT_LT((m - from_k).cwiseAbs().maxCoeff(), 1e-10 * m.cwiseAbs().maxCoeff()) << "N=" << n;
  }
}

TEST(InfluenceMatrix, MatchesTheRadialOracle) {
  const double e = 0.2;
  DefectConfiguration cfg;
  cfg.add(Disclination{{0, 0}, 0.3});
  const auto dom = make_domain(cfg, e);
  const double m00 = exact_m00(e), m11 = exact_m11(e);
  EXPECT_NEAR(m00, 95.1484306864733, 1e-9);
  EXPECT_NEAR(m11, 18.3086900468053, 1e-9);
  double prev = std::numeric_limits<double>::infinity();
  for (int level = 0; level < 2; ++level) {
    const EquilibriumRun r = run(dom, e / 4, level);
    const Eigen::MatrixXd& m = r.solution.influence;
    const double err = std::abs(m(0, 0) - m00) / m00;
    EXPECT_LT(err, 1e-3) << "level " << level;
    EXPECT_LT(err, prev);
    prev = err;
    EXPECT_NEAR(m(1, 1), m11, 1e-3 * m11);
    EXPECT_NEAR(m(2, 2), m11, 1e-3 * m11);
    EXPECT_NEAR(m(0, 1), 0.0, 1e-6 * m00);
    EXPECT_NEAR(m(1, 2), 0.0, 1e-6 * m00);
    // minimum energy -(c/2) s^2 / M00
    const double c = kMat.plane_strain_modulus();
    EXPECT_NEAR(r.solution.energy, -0.5 * c * 0.09 / m00, 1e-3 * 0.5 * c * 0.09 / m00);
  }
}

TEST(Equilibrium, ForcingCarriesTheChargeBlocks) {
  DefectConfiguration cfg;
  cfg.add(Dislocation{{0, 0}, {0.4, -0.7}}).add(Disclination{{0.5, 0}, 0.2});
  const ForcingVector f = build_forcing(extend_defects(cfg));
  Eigen::VectorXd expect(6);
  expect << 0, -0.7, -0.4, 0.2, 0, 0;
  EXPECT_LT((f.total() - expect).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(f.disclination_part[0], 0.0);
  EXPECT_EQ(f.dislocation_part[3], 0.0);
}

TEST(Equilibrium, RecoversTheChargesAndMinimizes) {
  DefectConfiguration cfg;
  cfg.add(Dislocation{{-0.35, 0.05}, {1.0, 0.5}}).add(Disclination{{0.3, -0.1}, -0.4});
  const auto dom = make_domain(cfg, 0.12);
  const EquilibriumRun r = run(dom, 0.03);
  const RecoveredCharges rec = recover_charges(r.solution, r.basis);
  EXPECT_NEAR(rec.frank[0], 0.0, 1e-8);
  EXPECT_LT((rec.burgers[0] - Vec2(1.0, 0.5)).norm(), 1e-8);
  EXPECT_NEAR(rec.frank[1], -0.4, 1e-8);
  EXPECT_LT(rec.burgers[1].norm(), 1e-8);

  // the closed form is the minimum of the discrete functional
  const double closed = r.solution.energy;
  EXPECT_LT(closed, 0.0);
  const double quad = evaluate_functional(r.solution.potential, *dom, kMat);
  EXPECT_NEAR(quad, closed, 5e-3 * std::abs(closed));
  const DiscreteField direct = minimize_directly(*r.basis.problem, *dom, kMat);
  const double diff = (direct.coeffs() - r.solution.potential.coeffs()).cwiseAbs().maxCoeff();
  EXPECT_LT(diff, 1e-8 * r.solution.potential.coeffs().cwiseAbs().maxCoeff());
  const DiscreteField permuted = minimize_directly(*r.basis.problem, *dom, kMat, 7);
  EXPECT_LT((permuted.coeffs() - direct.coeffs()).cwiseAbs().maxCoeff(),
            1e-8 * direct.coeffs().cwiseAbs().maxCoeff());
  // perturbing v-hat along an admissible direction raises the functional
  const DiscreteField bumped = r.solution.potential + r.basis.field(1, 0) * 1e-2;
  EXPECT_GT(evaluate_functional(bumped, *dom, kMat), quad);
}

TEST(Equilibrium, WeakResidualVanishesOnAdmissibleTestFields) {
  DefectConfiguration cfg;
  cfg.add(Disclination{{0.0, 0.0}, 0.5});
  const auto dom = make_domain(cfg, 0.2);
  const EquilibriumRun r = run(dom, 0.05);
  const double scale = std::abs(r.solution.energy);
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(weak_el_residual(r.solution, r.basis.fields[k]), 0.0, 1e-9 * (1 + scale));
  const DiscreteField combo = r.basis.fields[0] * 0.3 + r.basis.fields[2] * -1.1;
  EXPECT_NEAR(weak_el_residual(r.solution, combo), 0.0, 1e-9 * (1 + scale));
  const TraceFit fit = fit_affine_traces(combo, *dom);
  EXPECT_NEAR(fit.coefficients[0], 0.3, 1e-12);
  EXPECT_NEAR(fit.coefficients[2], -1.1, 1e-12);

  // not clamped on the outer boundary
  const DiscreteField one(r.space, interpolate(*r.space, [](const Vec2&) { return std::pair<double, Vec2>(1.0, Vec2::Zero()); }));
  EXPECT_THROW(weak_el_residual(r.solution, one), ValidationError);
  // not affine on the core
  const DiscreteField bump(r.space, interpolate(*r.space, [](const Vec2& x) {
    const double q = 1 - x.squaredNorm();
    return std::pair<double, Vec2>(q * q * x[0] * x[0], Vec2(q * q * 2 * x[0] - 4 * q * x[0] * x[0] * x[0], -4 * q * x[0] * x[0] * x[1]));
  }));
  EXPECT_THROW(weak_el_residual(r.solution, bump), ValidationError);
}

TEST(Equilibrium, FieldsFollowTheAiryRelations) {
  DefectConfiguration cfg;
  cfg.add(Dislocation{{0.1, 0.0}, {0.0, 1.0}});
  const auto dom = make_domain(cfg, 0.2);
  const EquilibriumRun r = run(dom, 0.05);
  const Vec2 x(-0.5, 0.3);
  const FieldSample s = extract_fields(r.solution, x);
  const ScalarJet3 j = r.solution.potential.jet(x);
  EXPECT_NEAR(s.potential, j.value, 1e-14);
  EXPECT_LT((s.stress - cofactor(j.hessian)).norm2(), 1e-28);
  const PlasticFields p = plastic_stress_strain(x, dom->defects(), kMat);
  EXPECT_LT((s.elastic_stress - (s.stress - p.stress)).norm2(), 1e-26);
  EXPECT_LT((s.elastic_strain - constitutive_strain(s.elastic_stress, kMat)).norm2(), 1e-26);
  EXPECT_LT((s.plastic_strain - p.strain).norm2(), 1e-26);
  EXPECT_THROW(extract_fields(r.solution, {0.1, 0.0}), std::out_of_range);
}
