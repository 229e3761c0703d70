// One PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

#include "airy/equilibrium.hpp"
#include "airy/monge_ampere.hpp"
#include "airy/reconstruction.hpp"
#include "airy/verification.hpp"

#include <Eigen/Cholesky>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

using namespace airy;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(int n, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("criterion %d: %s  %s  [%.2fs]\n", n, o.pass ? "PASS" : "FAIL", o.detail.c_str(), sec);
  std::fflush(stdout);
  failures += !o.pass;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

// relative tolerance, or an absolute 1e-3 for a zero charge
double charge_tolerance(double rel, double charge) { return charge == 0.0 ? 1e-3 : rel * std::abs(charge); }

JetFunction potential_of(const DefectConfiguration& cfg, const MaterialParams& mat) {
  return [cfg, mat](const Vec2& x) { return eval_plastic_potential(x, cfg, mat); };
}

struct Sweep {
  std::vector<double> nu{0.0, 0.3};
  std::vector<double> rho{0.2, 0.5};
};

// ---- annulus sweeps ------------------------------------------------------

Outcome michell_sweep(bool dislocations) {
  double worst = 0.0;
  for (double nu : Sweep{}.nu) {
    const MaterialParams mat(1.0, nu);
    for (double rho : Sweep{}.rho) {
      const BoundaryLoop loop = circle_loop({0, 0}, rho, 512, Traversal::Clockwise);
      std::vector<std::pair<DefectConfiguration, Eigen::Vector3d>> cases;
      if (dislocations) {
        for (const Vec2& b : {Vec2(1.0, 0.0), Vec2(0.3, -0.7)})
          cases.push_back({DefectConfiguration({Dislocation{{0, 0}, b}}), Eigen::Vector3d(0, b[0], b[1])});
      } else {
        for (double s : {0.3, -1.0}) cases.push_back({DefectConfiguration({Disclination{{0, 0}, s}}), Eigen::Vector3d(s, 0, 0)});
      }
      for (const auto& [cfg, expect] : cases) {
        const Eigen::Vector3d got = michell_integrals(potential_of(cfg, mat), loop, mat).scaled(mat);
        worst = std::max(worst, (got - expect).cwiseAbs().maxCoeff());
      }
    }
  }
  return {worst < 1e-8, fmt("max component error %.2e (tol 1e-8, 8 cases, 512 nodes)", worst)};
}

Outcome equivalence_sweep() {
  double worst = 0.0;
  int n = 0;
  for (double nu : Sweep{}.nu) {
    const MaterialParams mat(1.0, nu);
    for (double rho : Sweep{}.rho) {
      const BoundaryLoop loop = circle_loop({0, 0}, rho, 512);
      std::vector<DefectConfiguration> cases;
      for (double s : {0.3, -1.0}) cases.push_back(DefectConfiguration({Disclination{{0, 0}, s}}));
      for (const Vec2& b : {Vec2(1.0, 0.0), Vec2(0.3, -0.7)}) cases.push_back(DefectConfiguration({Dislocation{{0, 0}, b}}));
      for (const auto& cfg : cases) {
        worst = std::max(worst, check_strain_airy_equivalence(potential_of(cfg, mat), loop, mat, 1e-4 * rho).max_relative);
        ++n;
      }
    }
  }
  return {worst < 1e-6, fmt("max relative gap %.2e over %g cases (tol 1e-6)", worst, n)};
}

// ---- discrete solver -----------------------------------------------------

const MaterialParams kMat(1.0, 0.3);

struct Case {
  std::string name;
  DefectConfiguration defects;
  double eps;
};

Case single_disclination() { return {"single", DefectConfiguration({Disclination{{0, 0}, 0.5}}), 0.2}; }
Case two_defects() {
  return {"two-defect", DefectConfiguration({Dislocation{{-0.4, 0.0}, {1.0, 0.0}}, Disclination{{0.4, 0.1}, 0.5}}), 0.15};
}

struct Levels {
  std::shared_ptr<const PerforatedDomain> domain;
  std::vector<std::shared_ptr<const Mesh>> meshes;
};

Levels build_levels(const Case& c, int count) {
  Levels l;
  l.domain = std::make_shared<PerforatedDomain>(build_perforated_domain(OuterBoundary::disk({0, 0}, 1), c.defects, c.eps));
  l.meshes.push_back(std::make_shared<Mesh>(generate_mesh(*l.domain, c.eps / 4)));
  while (static_cast<int>(l.meshes.size()) < count)
    l.meshes.push_back(std::make_shared<Mesh>(refine_uniform(*l.meshes.back(), *l.domain)));
  return l;
}

Outcome energy_gap() {
  const Levels l = build_levels(single_disclination(), 3);
  std::vector<double> gap;
  for (const auto& mesh : l.meshes) {
    const EquilibriumRun r = solve_on_mesh(l.domain, mesh, kMat);
    const double quad = evaluate_functional(r.solution.potential, *l.domain, kMat);
    gap.push_back(std::abs(quad - r.solution.energy) / std::abs(r.solution.energy));
  }
  const bool ok = gap[0] <= 5e-3 && gap[1] < gap[0] && gap[2] < gap[1];
  return {ok, fmt("relative gap %.2e -> %.2e -> %.2e (tol 5e-3 at h = eps/4, decreasing)", gap[0], gap[1], gap[2])};
}

// max over cores of |(s~, b~) - (s, b)| / |(s, b)|
double charge_error(const RecoveredCharges& got, const PerforatedDomain& dom) {
  double worst = 0.0;
  for (std::size_t i = 0; i < dom.num_cores(); ++i) {
    const ExtendedDefect& d = dom.defects()[i];
    const Eigen::Vector3d expect(d.frank, d.burgers[0], d.burgers[1]);
    const Eigen::Vector3d g(got.frank[i], got.burgers[i][0], got.burgers[i][1]);
    worst = std::max(worst, (g - expect).norm() / expect.norm());
  }
  return worst;
}

Outcome boundary_conditions() {
  std::string detail;
  bool ok = true;
  for (const Case& c : {single_disclination(), two_defects()}) {
    const Levels l = build_levels(c, 2);
    double weak = 0.0;
    std::vector<double> loop;
    for (const auto& mesh : l.meshes) {
      const EquilibriumRun r = solve_on_mesh(l.domain, mesh, kMat);
      weak = std::max(weak, charge_error(recover_charges(r.solution, r.basis), *l.domain));
      const auto recovery = std::make_shared<const GradLaplacianRecovery>(r.solution.potential, plastic_jets(r.solution));
      loop.push_back(charge_error(loop_charges(r.solution, recovery).charges, *l.domain));
    }
    ok = ok && weak < 0.02 && loop[0] < 0.02 && loop[1] < loop[0];
    detail += c.name + fmt(": weak residual %.1e, loop %.2e -> %.2e; ", weak, loop[0], loop[1]);
  }
  return {ok, detail + "(tol 2%, loop error decreasing)"};
}

Outcome liftability() {
  std::string detail;
  bool ok = true;
  for (const Case& c : {single_disclination(), two_defects()}) {
    const Levels l = build_levels(c, 1);
    const EquilibriumRun r = solve_on_mesh(l.domain, l.meshes[0], kMat);
    const PerforatedDomain& dom = *l.domain;
    const auto recovery = std::make_shared<const GradLaplacianRecovery>(r.solution.potential, plastic_jets(r.solution));
    const Vec2 base = deepest_interior_point(dom);
    const auto cuts = choose_cut_directions(dom);
    const Reconstruction el = reconstruct_displacement(elastic_compatibility(r.solution, recovery), *l.meshes[0], dom, base, cuts);
    const Reconstruction tot = reconstruct_displacement(total_compatibility(r.solution, recovery), *l.meshes[0], dom, base, cuts);
    double el_ratio = 0.0, tot_ratio = 0.0; // worst error / tolerance
    for (std::size_t i = 0; i < dom.num_cores(); ++i) {
      const ExtendedDefect& d = dom.defects()[i];
      const double bn = d.burgers.norm();
      el_ratio = std::max({el_ratio, std::abs(el.mismatch[i].rotation_jump) / charge_tolerance(0.01, d.frank),
                           el.mismatch[i].displacement_jump.norm() / charge_tolerance(0.01, bn)});
      tot_ratio = std::max({tot_ratio, std::abs(tot.mismatch[i].rotation_jump - d.frank) / charge_tolerance(0.02, d.frank),
                            (tot.mismatch[i].displacement_jump - d.burgers).norm() / charge_tolerance(0.02, bn)});
    }
    ok = ok && el_ratio < 1.0 && tot_ratio < 1.0;
    detail += c.name + fmt(": elastic %.2f, total %.2f of tolerance; ", el_ratio, tot_ratio);
  }
  return {ok, detail + "(elastic 1% / 1e-3, total 2%)"};
}

Outcome monge_ampere() {
  double worst = 0.0;
  bool all = true;
  const auto suite = monge_ampere_suite();
  for (const CheckResult& c : suite) {
    worst = std::max(worst, std::abs(c.computed - c.expected));
    all = all && c.pass;
  }
  return {all && worst < 1e-8, fmt("max discrepancy %.2e over %g checks (tol 1e-8)", worst, suite.size())};
}

Outcome structural() {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> pos(-0.55, 0.55), q(-1.0, 1.0);
  double sym = 0.0;
  bool chol = true;
  for (int n = 1; n <= 3; ++n) {
    DefectConfiguration cfg;
    std::vector<Vec2> placed;
    while (static_cast<int>(placed.size()) < n) {
      const Vec2 x(pos(rng), pos(rng));
      bool fine = x.norm() < 0.6;
      for (const Vec2& p : placed) fine = fine && (p - x).norm() > 0.35;
      if (!fine) continue;
      placed.push_back(x);
      if (placed.size() % 2)
        cfg.add(Disclination{x, q(rng)});
      else
        cfg.add(Dislocation{x, {q(rng), q(rng)}});
    }
    auto dom = std::make_shared<PerforatedDomain>(build_perforated_domain(OuterBoundary::disk({0, 0}, 1), cfg, 0.1));
    const EquilibriumRun r = solve_on_mesh(dom, std::make_shared<Mesh>(generate_mesh(*dom, 0.08)), kMat);
    const Eigen::MatrixXd& m = r.solution.influence;
    sym = std::max(sym, (m - m.transpose()).cwiseAbs().maxCoeff() / m.cwiseAbs().maxCoeff());
    chol = chol && Eigen::LLT<Eigen::MatrixXd>(m).info() == Eigen::Success;
  }

  std::uniform_real_distribution<double> u(-1, 1), nu(-0.9, 0.49);
  double round_trip = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const MaterialParams mat(0.5 + 2 * (u(rng) + 1), nu(rng));
    const SymTensor2 eps{u(rng), u(rng), u(rng)};
    const SymTensor2 back = constitutive_strain(constitutive_stress(eps, mat), mat);
    round_trip = std::max(round_trip, std::sqrt((back - eps).norm2()));
  }

  std::vector<Vec2> samples(10);
  for (auto& s : samples) s = {u(rng), u(rng)};
  double div = 0.0;
  for (int k = 0; k < 20; ++k) {
    const Polynomial2 p = Polynomial2::random(4, rng);
    div = std::max(div, divergence_identity_check([&](const Vec2& x) { return p(x); }, samples));
  }
  const bool ok = sym < 1e-10 && chol && round_trip < 1e-12 && div < 1e-7;
  return {ok, fmt("M asymmetry %.1e (1e-10), Cholesky ", sym) + (chol ? "ok" : "failed") +
                  fmt("; round trip %.1e (1e-12); div residual %.1e (1e-7)", round_trip, div)};
}

Outcome manufactured() {
  const PerforatedDomain dom(OuterBoundary::disk({0, 0}, 1.0), {}, 1.0);
  const BoundaryFunction data = [](const Vec2& x) {
    const double r2 = x.squaredNorm();
    return std::pair<double, Vec2>((1 - r2) * (1 - r2), -4 * (1 - r2) * x);
  };
  const auto hess = [](const Vec2& x) {
    const double r2 = x.squaredNorm();
    return SymTensor2{-4 * (1 - r2) + 8 * x[0] * x[0], 8 * x[0] * x[1], -4 * (1 - r2) + 8 * x[1] * x[1]};
  };
  auto mesh = std::make_shared<Mesh>(generate_mesh(dom, 0.2));
  std::vector<double> err;
  for (int level = 0; level < 4; ++level) {
    if (level) mesh = std::make_shared<Mesh>(refine_uniform(*mesh, dom));
    const ClampedProblem problem(std::make_shared<FeSpace>(mesh));
    err.push_back(energy_norm_error(solve_dirichlet(problem, {data}, [](const Vec2&) { return 64.0; }), hess));
  }
  double worst = 1e300;
  std::string rates;
  for (std::size_t k = 1; k < err.size(); ++k) {
    const double rate = std::log2(err[k - 1] / err[k]);
    worst = std::min(worst, rate);
    rates += fmt(k == 1 ? "%.2f" : ", %.2f", rate);
  }
  return {worst >= 0.9 * 2.0, "energy-norm rates " + rates + fmt(" (need >= %.1f)", 0.9 * 2.0)};
}

} // namespace

int main() {
  report(1, [] { return michell_sweep(false); });
  report(2, [] { return michell_sweep(true); });
  report(3, equivalence_sweep);
  report(4, energy_gap);
  report(5, boundary_conditions);
  report(6, liftability);
  report(7, monge_ampere);
  report(8, structural);
  report(9, manufactured);
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
