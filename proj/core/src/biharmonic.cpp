#include "airy/biharmonic.hpp"

#include <Eigen/SparseCholesky>
#ifdef AIRY_HAVE_CHOLMOD
#include <Eigen/CholmodSupport>
#endif

#include <stdexcept>

namespace airy {

namespace {

template <class ElementMatrix>
SparseMatrix assemble(const FeSpace& space, ElementMatrix&& element_matrix) {
  const std::size_t nt = space.mesh().num_triangles();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(nt * 144);
  for (std::size_t t = 0; t < nt; ++t) {
    const HctElement& el = space.element(t);
    const Eigen::Matrix<double, 12, 12> ke = element_matrix(el);
    const auto& d = space.element_dofs(t);
    for (int i = 0; i < 12; ++i)
      for (int j = 0; j < 12; ++j) trip.emplace_back(d[i], d[j], ke(i, j));
  }
  SparseMatrix k(space.num_dofs(), space.num_dofs());
  k.setFromTriplets(trip.begin(), trip.end());
  return k;
}

} // namespace

SparseMatrix assemble_hessian_form(const FeSpace& space) {
  return assemble(space, [](const HctElement& e) { return e.hessian_stiffness(); });
}

SparseMatrix assemble_laplacian_form(const FeSpace& space) {
  return assemble(space, [](const HctElement& e) { return e.laplacian_stiffness(); });
}

Eigen::VectorXd assemble_load(const FeSpace& space, const std::function<double(const Vec2&)>& f) {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(space.num_dofs());
  for (std::size_t t = 0; t < space.mesh().num_triangles(); ++t) {
    const Eigen::Matrix<double, 12, 1> be = space.element(t).load(f);
    const auto& d = space.element_dofs(t);
    for (int i = 0; i < 12; ++i) b[d[i]] += be[i];
  }
  return b;
}

// ---------------------------------------------------------------- SpdSolver

struct SpdSolver::Impl {
#ifdef AIRY_HAVE_CHOLMOD
  Eigen::CholmodSupernodalLLT<SparseMatrix> llt;
#else
  Eigen::SimplicialLDLT<SparseMatrix> ldlt;
#endif
};

SpdSolver::SpdSolver(const SparseMatrix& a) : impl_(std::make_unique<Impl>()) {
#ifdef AIRY_HAVE_CHOLMOD
  impl_->llt.compute(a);
  if (impl_->llt.info() != Eigen::Success) {
    throw SolverError("sparse Cholesky factorization failed: operator is not positive definite");
  }
#else
  impl_->ldlt.compute(a);
  if (impl_->ldlt.info() != Eigen::Success || (impl_->ldlt.vectorD().array() <= 0.0).any()) {
    throw SolverError("sparse LDL^T factorization failed: operator is not positive definite");
  }
#endif
}

SpdSolver::~SpdSolver() = default;

Eigen::MatrixXd SpdSolver::solve(const Eigen::MatrixXd& rhs) const {
#ifdef AIRY_HAVE_CHOLMOD
  Eigen::MatrixXd x = impl_->llt.solve(rhs);
#else
  Eigen::MatrixXd x = impl_->ldlt.solve(rhs);
#endif
  if (!x.allFinite()) throw SolverError("sparse solve produced non-finite values");
  return x;
}

std::string SpdSolver::backend() {
#ifdef AIRY_HAVE_CHOLMOD
  return "cholmod-supernodal-llt";
#else
  return "eigen-simplicial-ldlt";
#endif
}

// ---------------------------------------------------------------- ClampedProblem

ClampedProblem::ClampedProblem(std::shared_ptr<const FeSpace> space)
    : space_(std::move(space)), k_(assemble_hessian_form(*space_)) {
  const auto& loop = space_->dof_loop();
  free_index_.assign(loop.size(), -1);
  for (std::size_t i = 0; i < loop.size(); ++i) {
    if (loop[i] < 0) {
      free_index_[i] = static_cast<int>(free_.size());
      free_.push_back(static_cast<int>(i));
    }
  }
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(k_.nonZeros());
  for (int c = 0; c < k_.outerSize(); ++c) {
    if (free_index_[c] < 0) continue;
    for (SparseMatrix::InnerIterator it(k_, c); it; ++it) {
      if (free_index_[it.row()] < 0) continue;
      trip.emplace_back(free_index_[it.row()], free_index_[c], it.value());
    }
  }
  k_ff_.resize(static_cast<int>(free_.size()), static_cast<int>(free_.size()));
  k_ff_.setFromTriplets(trip.begin(), trip.end());
  if (!free_.empty()) solver_ = std::make_unique<SpdSolver>(k_ff_);
}

Eigen::VectorXd ClampedProblem::boundary_vector(const std::vector<BoundaryDatum>& per_loop) const {
  const FeSpace& s = *space_;
  const Mesh& m = s.mesh();
  const auto& loop = s.dof_loop();
  Eigen::VectorXd u = Eigen::VectorXd::Zero(s.num_dofs());

  auto eval = [&](int l, const Vec2& x) -> std::pair<double, Vec2> {
    if (l >= static_cast<int>(per_loop.size())) throw std::invalid_argument("missing boundary datum for loop " + std::to_string(l));
    const auto& d = per_loop[l];
    if (const auto* a = std::get_if<AffineTrace>(&d)) return {a->value(x), a->gradient()};
    return std::get<BoundaryFunction>(d)(x);
  };
  const std::size_t nv = m.num_vertices();
  for (std::size_t v = 0; v < nv; ++v) {
    const int l = loop[3 * v];
    if (l < 0) continue;
    const auto [val, g] = eval(l, m.vertices[v]);
    u[3 * v] = val;
    u[3 * v + 1] = g[0];
    u[3 * v + 2] = g[1];
  }
  for (std::size_t e = 0; e < s.num_edges(); ++e) {
    const int l = loop[s.edge_dof(e)];
    if (l < 0) continue;
    const auto& ed = s.edge(e);
    const Vec2 mid = 0.5 * (m.vertices[ed[0]] + m.vertices[ed[1]]);
    u[s.edge_dof(e)] = eval(l, mid).second.dot(s.edge_normal(e));
  }
  return u;
}

std::vector<DiscreteField> ClampedProblem::solve(const Eigen::MatrixXd& boundary, const Eigen::MatrixXd* load) const {
  const Eigen::Index n = static_cast<Eigen::Index>(space_->num_dofs());
  const Eigen::Index cols = boundary.cols();
  if (boundary.rows() != n) throw std::invalid_argument("boundary vector has the wrong length");
  Eigen::MatrixXd ub = boundary;
  for (int f : free_) ub.row(f).setZero();

  Eigen::MatrixXd rhs_full = -(k_ * ub);
  if (load) rhs_full += *load;
  Eigen::MatrixXd rhs(static_cast<Eigen::Index>(free_.size()), cols);
  for (std::size_t i = 0; i < free_.size(); ++i) rhs.row(static_cast<Eigen::Index>(i)) = rhs_full.row(free_[i]);

  Eigen::MatrixXd u = ub;
  if (solver_) {
    const Eigen::MatrixXd x = solver_->solve(rhs);
    for (std::size_t i = 0; i < free_.size(); ++i) u.row(free_[i]) = x.row(static_cast<Eigen::Index>(i));
  }
  std::vector<DiscreteField> out;
  out.reserve(static_cast<std::size_t>(cols));
  for (Eigen::Index c = 0; c < cols; ++c) out.emplace_back(space_, u.col(c));
  return out;
}

DiscreteField ClampedProblem::solve(const Eigen::VectorXd& boundary, const Eigen::VectorXd* load) const {
  const Eigen::MatrixXd b = boundary;
  if (load) {
    const Eigen::MatrixXd l = *load;
    return solve(b, &l).front();
  }
  return solve(b, nullptr).front();
}

AffineTrace cell_trace(const PerforatedDomain& dom, std::size_t core, int r) {
  if (core >= dom.num_cores()) throw std::out_of_range("core index out of range");
  AffineTrace a;
  a.origin = dom.cores()[core].center;
  switch (r) {
  case 0: a.a0 = 1.0; break;
  case 1: a.a1 = 1.0; break;
  case 2: a.a2 = 1.0; break;
  default: throw std::out_of_range("cell mode must be 0, 1 or 2");
  }
  return a;
}

std::vector<BoundaryDatum> cell_boundary_data(const PerforatedDomain& dom, std::size_t core, int r) {
  std::vector<BoundaryDatum> data(static_cast<std::size_t>(dom.num_loops()), AffineTrace{});
  data[PerforatedDomain::core_loop_id(core)] = cell_trace(dom, core, r);
  return data;
}

DiscreteField solve_cell_problem(const ClampedProblem& problem, const PerforatedDomain& dom, std::size_t core, int r) {
  return problem.solve(problem.boundary_vector(cell_boundary_data(dom, core, r)));
}

DiscreteField solve_dirichlet(const ClampedProblem& problem, const std::vector<BoundaryDatum>& per_loop,
                              const std::function<double(const Vec2&)>& load) {
  const Eigen::VectorXd b = problem.boundary_vector(per_loop);
  if (load) {
    const Eigen::VectorXd f = assemble_load(problem.space(), load);
    return problem.solve(b, &f);
  }
  return problem.solve(b);
}

ScalarJet3 evaluate_field(const DiscreteField& field, const Vec2& x) { return field.jet(x); }

double energy_norm_error(const DiscreteField& v, const std::function<SymTensor2(const Vec2&)>& exact_hessian) {
  const FeSpace& s = v.space();
  const TriangleRule& rule = degree5_rule();
  double e = 0.0;
  for (std::size_t t = 0; t < s.mesh().num_triangles(); ++t) {
    const HctElement& el = s.element(t);
    for (int k = 0; k < 3; ++k) {
      const auto tri = el.subtriangle(k);
      const double area = 0.5 * std::abs(cross(tri[1] - tri[0], tri[2] - tri[0]));
      for (std::size_t q = 0; q < rule.weight.size(); ++q) {
        const Vec2 x = rule.bary[q][0] * tri[0] + rule.bary[q][1] * tri[1] + rule.bary[q][2] * tri[2];
        e += area * rule.weight[q] * (v.jet_in(t, k, x).hessian - exact_hessian(x)).norm2();
      }
    }
  }
  return std::sqrt(e);
}

} // namespace airy
