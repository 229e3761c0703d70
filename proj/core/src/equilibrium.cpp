#include "airy/equilibrium.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace airy {

namespace {

// Local dof values of column block U on element t: 12 x cols.
Eigen::MatrixXd local_block(const FeSpace& s, std::size_t t, const Eigen::MatrixXd& u) {
  Eigen::MatrixXd out(12, u.cols());
  const auto& d = s.element_dofs(t);
  for (int k = 0; k < 12; ++k) out.row(k) = u.row(d[k]);
  return out;
}

std::array<Vec2, 3> sub_points(const HctElement& el, int k) { return el.subtriangle(k); }

// (1+nu)/E u^T (K - nu L) W for every column of W, by element matrices.
Eigen::RowVectorXd bilinear_rows(const Eigen::VectorXd& u, const Eigen::MatrixXd& w, const FeSpace& s,
                                 const MaterialParams& mat) {
  const double nu = mat.poisson_ratio();
  Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(w.cols());
  for (std::size_t t = 0; t < s.mesh().num_triangles(); ++t) {
    const HctElement& el = s.element(t);
    const auto& d = s.element_dofs(t);
    Eigen::Matrix<double, 12, 1> ul;
    for (int k = 0; k < 12; ++k) ul[k] = u[d[k]];
    const Eigen::Matrix<double, 12, 12> q = el.hessian_stiffness() - nu * el.laplacian_stiffness();
    acc.noalias() += (ul.transpose() * q) * local_block(s, t, w);
  }
  return (1.0 + nu) / mat.young_modulus() * acc;
}

} // namespace

CellBasis solve_cell_basis(std::shared_ptr<const ClampedProblem> problem, const PerforatedDomain& dom) {
  const std::size_t n = dom.num_cores();
  if (n == 0) throw ValidationError("cell basis needs at least one core");
  Eigen::MatrixXd boundary(static_cast<Eigen::Index>(problem->space().num_dofs()), static_cast<Eigen::Index>(3 * n));
  for (std::size_t i = 0; i < n; ++i) {
    for (int r = 0; r < 3; ++r) {
      boundary.col(static_cast<Eigen::Index>(3 * i + r)) = problem->boundary_vector(cell_boundary_data(dom, i, r));
    }
  }
  CellBasis basis;
  basis.fields = problem->solve(boundary);
  basis.coeffs.resize(boundary.rows(), boundary.cols());
  for (std::size_t k = 0; k < basis.fields.size(); ++k) basis.coeffs.col(static_cast<Eigen::Index>(k)) = basis.fields[k].coeffs();
  basis.problem = std::move(problem);
  return basis;
}

Eigen::MatrixXd assemble_influence_matrix(const CellBasis& basis) {
  const FeSpace& s = basis.problem->space();
  const Eigen::Index m = basis.coeffs.cols();
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m, m);
  const auto& rule = degree5_rule();
  for (std::size_t t = 0; t < s.mesh().num_triangles(); ++t) {
    const HctElement& el = s.element(t);
    const Eigen::MatrixXd U = local_block(s, t, basis.coeffs);
    for (int k = 0; k < 3; ++k) {
      const auto tri = sub_points(el, k);
      const double area = 0.5 * std::abs(cross(tri[1] - tri[0], tri[2] - tri[0]));
      const Eigen::MatrixXd CU = el.coefficients(k) * U; // 10 x m
      for (std::size_t q = 0; q < rule.weight.size(); ++q) {
        const Vec2 x = rule.bary[q][0] * tri[0] + rule.bary[q][1] * tri[1] + rule.bary[q][2] * tri[2];
        const auto J = cubic_monomial_jets(x, el.centroid(), el.scale());
        const Eigen::MatrixXd h = J.middleRows<3>(3) * CU; // rows xx, xy, yy
        const double w = area * rule.weight[q];
        M.noalias() += w * (h.row(0).transpose() * h.row(0) + 2.0 * h.row(1).transpose() * h.row(1) +
                            h.row(2).transpose() * h.row(2));
      }
    }
  }
  return M;
}

Eigen::MatrixXd influence_matrix_from_stiffness(const CellBasis& basis) {
  return basis.coeffs.transpose() * (basis.problem->stiffness() * basis.coeffs);
}

ForcingVector build_forcing(const std::vector<ExtendedDefect>& defects) {
  const auto n = static_cast<Eigen::Index>(3 * defects.size());
  ForcingVector f{Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)};
  for (std::size_t i = 0; i < defects.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(3 * i);
    f.disclination_part[k] = defects[i].frank;
    f.dislocation_part[k + 1] = defects[i].burgers[1];
    f.dislocation_part[k + 2] = -defects[i].burgers[0];
  }
  return f;
}

EquilibriumSolution solve_equilibrium(const CellBasis& basis, const Eigen::MatrixXd& influence,
                                      const ForcingVector& forcing, const MaterialParams& mat,
                                      std::shared_ptr<const PerforatedDomain> domain) {
  const Eigen::VectorXd phi = forcing.total();
  if (influence.rows() != phi.size() || influence.cols() != phi.size() || basis.coeffs.cols() != phi.size()) {
    throw std::invalid_argument("influence matrix, forcing vector and cell basis sizes disagree");
  }
  const Eigen::LLT<Eigen::MatrixXd> llt(0.5 * (influence + influence.transpose()));
  if (llt.info() != Eigen::Success) {
    throw SolverError("influence matrix is not positive definite");
  }
  const Eigen::VectorXd minv_phi = llt.solve(phi);
  const double k = mat.plane_strain_modulus();
  Eigen::VectorXd a = -k * minv_phi;
  DiscreteField v(basis.problem->space_ptr(), basis.coeffs * a);
  const double energy = -0.5 * k * minv_phi.dot(phi);
  return EquilibriumSolution{std::move(domain), mat, influence, phi, std::move(a), std::move(v), energy};
}

EquilibriumRun solve_on_mesh(std::shared_ptr<const PerforatedDomain> domain, std::shared_ptr<const Mesh> mesh,
                             const MaterialParams& mat) {
  auto space = std::make_shared<const FeSpace>(std::move(mesh));
  auto problem = std::make_shared<const ClampedProblem>(space);
  CellBasis basis = solve_cell_basis(problem, *domain);
  const Eigen::MatrixXd m = assemble_influence_matrix(basis);
  const ForcingVector f = build_forcing(domain->defects());
  EquilibriumSolution sol = solve_equilibrium(basis, m, f, mat, domain);
  return EquilibriumRun{std::move(space), std::move(basis), std::move(sol)};
}

double elastic_energy(const DiscreteField& v, const MaterialParams& mat) {
  const FeSpace& s = v.space();
  const auto& rule = degree5_rule();
  const double nu = mat.poisson_ratio();
  double acc = 0.0;
  for (std::size_t t = 0; t < s.mesh().num_triangles(); ++t) {
    const HctElement& el = s.element(t);
    for (int k = 0; k < 3; ++k) {
      const auto tri = sub_points(el, k);
      const double area = 0.5 * std::abs(cross(tri[1] - tri[0], tri[2] - tri[0]));
      for (std::size_t q = 0; q < rule.weight.size(); ++q) {
        const Vec2 x = rule.bary[q][0] * tri[0] + rule.bary[q][1] * tri[1] + rule.bary[q][2] * tri[2];
        const SymTensor2 h = v.jet_in(t, k, x).hessian;
        acc += area * rule.weight[q] * (h.norm2() - nu * h.trace() * h.trace());
      }
    }
  }
  return 0.5 * (1.0 + nu) / mat.young_modulus() * acc;
}

double evaluate_functional(const DiscreteField& v, const PerforatedDomain& dom, const MaterialParams& mat,
                           int n_quad) {
  double total = elastic_energy(v, mat);
  const double tol = 1e-6 * dom.eps();
  for (std::size_t i = 0; i < dom.num_cores(); ++i) {
    const ExtendedDefect& d = dom.defects()[i];
    const Core& c = dom.cores()[i];
    const BoundaryLoop loop = circle_loop(c.center, c.radius, n_quad);
    const Vec2 pb = rotate_quarter_cw(d.burgers);
    const double avg = 1.0 / loop.length();
    total += avg * line_integral(loop, [&](const Vec2& x, const Vec2&, const Vec2&) {
               const ScalarJet3 j = v.jet(x, tol);
               return j.gradient.dot(pb) + d.frank * j.value;
             });
  }
  return total;
}

FieldSample extract_fields(const EquilibriumSolution& sol, const Vec2& x, double tolerance) {
  const ScalarJet3 j = sol.potential.jet(x, tolerance);
  FieldSample f;
  f.potential = j.value;
  f.stress = airy_stress(j.hessian);
  f.strain = constitutive_strain(f.stress, sol.material);
  const PlasticFields p = plastic_stress_strain(x, sol.domain->defects(), sol.material);
  f.elastic_stress = f.stress - p.stress;
  f.elastic_strain = constitutive_strain(f.elastic_stress, sol.material);
  f.plastic_strain = p.strain;
  return f;
}

double bilinear_form(const DiscreteField& u, const DiscreteField& w, const MaterialParams& mat) {
  const Eigen::MatrixXd wm = w.coeffs();
  return bilinear_rows(u.coeffs(), wm, u.space(), mat)[0];
}

TraceFit fit_affine_traces(const DiscreteField& phi, const PerforatedDomain& dom) {
  const FeSpace& s = phi.space();
  const Mesh& m = s.mesh();
  const Eigen::VectorXd& u = phi.coeffs();
  const auto& loop = s.dof_loop();
  const std::size_t nv = m.num_vertices();
  const std::size_t n = dom.num_cores();

  TraceFit fit;
  fit.coefficients = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(3 * n));
  // normal equations per core, rows (value | d/dx | d/dy | edge normal)
  std::vector<Eigen::Matrix3d> ata(n, Eigen::Matrix3d::Zero());
  std::vector<Eigen::Vector3d> atb(n, Eigen::Vector3d::Zero());
  struct Row {
    std::size_t core;
    Eigen::RowVector3d a;
    double b;
  };
  std::vector<Row> rows;
  for (std::size_t v = 0; v < nv; ++v) {
    const int l = loop[3 * v];
    if (l < 0) continue;
    if (l == PerforatedDomain::outer_loop_id()) {
      for (int c = 0; c < 3; ++c) fit.outer_residual = std::max(fit.outer_residual, std::abs(u[3 * v + c]));
      continue;
    }
    const std::size_t core = static_cast<std::size_t>(l - 1);
    const Vec2 r = m.vertices[v] - dom.cores()[core].center;
    rows.push_back({core, {1.0, r[0], r[1]}, u[3 * v]});
    rows.push_back({core, {0.0, 1.0, 0.0}, u[3 * v + 1]});
    rows.push_back({core, {0.0, 0.0, 1.0}, u[3 * v + 2]});
  }
  for (std::size_t e = 0; e < s.num_edges(); ++e) {
    const int dof = s.edge_dof(e);
    const int l = loop[dof];
    if (l < 0) continue;
    if (l == PerforatedDomain::outer_loop_id()) {
      fit.outer_residual = std::max(fit.outer_residual, std::abs(u[dof]));
      continue;
    }
    const Vec2 nrm = s.edge_normal(e);
    rows.push_back({static_cast<std::size_t>(l - 1), {0.0, nrm[0], nrm[1]}, u[dof]});
  }
  for (const Row& r : rows) {
    ata[r.core] += r.a.transpose() * r.a;
    atb[r.core] += r.a.transpose() * r.b;
  }
  for (std::size_t i = 0; i < n; ++i) {
    fit.coefficients.segment<3>(static_cast<Eigen::Index>(3 * i)) = ata[i].ldlt().solve(atb[i]);
  }
  for (const Row& r : rows) {
    const double pred = r.a.dot(fit.coefficients.segment<3>(static_cast<Eigen::Index>(3 * r.core)));
    fit.core_residual = std::max(fit.core_residual, std::abs(pred - r.b));
  }
  return fit;
}

double weak_el_residual(const EquilibriumSolution& sol, const DiscreteField& phi, double trace_tolerance) {
  if (phi.space_ptr() != sol.potential.space_ptr()) {
    throw std::invalid_argument("test field lives on a different space than the solution");
  }
  const TraceFit fit = fit_affine_traces(phi, *sol.domain);
  const double scale = std::max(phi.coeffs().cwiseAbs().maxCoeff(), 1e-300);
  if (fit.core_residual > trace_tolerance * scale) {
    throw ValidationError("test field does not have affine traces on the cores (deviation " +
                          std::to_string(fit.core_residual) + ")");
  }
  if (fit.outer_residual > trace_tolerance * scale) {
    throw ValidationError("test field is not clamped on the outer boundary (trace " +
                          std::to_string(fit.outer_residual) + ")");
  }
  return bilinear_form(sol.potential, phi, sol.material) + sol.forcing.dot(fit.coefficients);
}

RecoveredCharges recover_charges(const EquilibriumSolution& sol, const CellBasis& basis) {
  const Eigen::RowVectorXd b =
      bilinear_rows(sol.potential.coeffs(), basis.coeffs, sol.potential.space(), sol.material);
  RecoveredCharges out;
  for (std::size_t i = 0; i < basis.num_cores(); ++i) {
    const auto k = static_cast<Eigen::Index>(3 * i);
    out.frank.push_back(-b[k]);
    out.burgers.emplace_back(b[k + 2], -b[k + 1]);
  }
  return out;
}

DiscreteField minimize_directly(const ClampedProblem& problem, const PerforatedDomain& dom, const MaterialParams& mat,
                                unsigned seed) {
  const FeSpace& s = problem.space();
  const auto n = static_cast<Eigen::Index>(s.num_dofs());
  const std::vector<int>& free = problem.free_dofs();
  const auto nf = static_cast<Eigen::Index>(free.size());
  const auto na = static_cast<Eigen::Index>(3 * dom.num_cores());

  // u = P z with z = (free dofs, affine coefficients)
  std::vector<Eigen::Triplet<double>> trip;
  for (Eigen::Index i = 0; i < nf; ++i) trip.emplace_back(free[static_cast<std::size_t>(i)], i, 1.0);
  for (std::size_t c = 0; c < dom.num_cores(); ++c) {
    for (int r = 0; r < 3; ++r) {
      const Eigen::VectorXd g = problem.boundary_vector(cell_boundary_data(dom, c, r));
      for (Eigen::Index k = 0; k < n; ++k) {
        if (g[k] != 0.0) trip.emplace_back(k, nf + static_cast<Eigen::Index>(3 * c + r), g[k]);
      }
    }
  }
  SparseMatrix p(n, nf + na);
  p.setFromTriplets(trip.begin(), trip.end());

  const double nu = mat.poisson_ratio();
  const SparseMatrix q = (1.0 + nu) / mat.young_modulus() * (problem.stiffness() - nu * assemble_laplacian_form(s));
  SparseMatrix r = p.transpose() * q * p;
  r = 0.5 * (r + SparseMatrix(r.transpose()));
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nf + na);
  rhs.tail(na) = -build_forcing(dom.defects()).total();

  Eigen::VectorXd z;
  if (seed == 0) {
    z = SpdSolver(r).solve(rhs);
  } else {
    Eigen::VectorXi idx(nf + na);
    std::iota(idx.data(), idx.data() + idx.size(), 0);
    std::mt19937 rng(seed);
    std::shuffle(idx.data(), idx.data() + idx.size(), rng);
    const Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> perm(idx);
    SparseMatrix rp;
    rp = r.twistedBy(perm);
    const Eigen::VectorXd y = SpdSolver(rp).solve(perm * rhs);
    z = perm.transpose() * y;
  }
  return DiscreteField(problem.space_ptr(), p * z);
}

} // namespace airy
