#include "airy/fe_space.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

namespace airy {

FeSpace::FeSpace(std::shared_ptr<const Mesh> mesh) : mesh_(std::move(mesh)), locator_(*mesh_) {
  const Mesh& m = *mesh_;
  const std::size_t nv = m.num_vertices();
  std::unordered_map<std::uint64_t, int> index;
  index.reserve(m.num_triangles() * 2);
  auto key = [](int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
  };
  dofs_.resize(m.num_triangles());
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    const auto& tr = m.triangles[t];
    auto& d = dofs_[t];
    for (int i = 0; i < 3; ++i) {
      d[3 * i] = 3 * tr[i];
      d[3 * i + 1] = 3 * tr[i] + 1;
      d[3 * i + 2] = 3 * tr[i] + 2;
    }
    for (int j = 0; j < 3; ++j) {
      const int a = tr[(j + 1) % 3], b = tr[(j + 2) % 3];
      auto [it, fresh] = index.try_emplace(key(a, b), static_cast<int>(edges_.size()));
      if (fresh) edges_.push_back({std::min(a, b), std::max(a, b)});
      d[9 + j] = static_cast<int>(3 * nv) + it->second;
    }
  }

  dof_loop_.assign(num_dofs(), -1);
  for (const auto& be : m.boundary_edges) {
    for (int v : {be.a, be.b}) {
      for (int c = 0; c < 3; ++c) dof_loop_[3 * v + c] = be.loop;
    }
    dof_loop_[3 * nv + index.at(key(be.a, be.b))] = be.loop;
  }
  elements_.reserve(m.num_triangles());
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    const auto& tr = m.triangles[t];
    const std::array<Vec2, 3> p{m.vertices[tr[0]], m.vertices[tr[1]], m.vertices[tr[2]]};
    std::array<Vec2, 3> n;
    for (int j = 0; j < 3; ++j) n[j] = edge_normal(dofs_[t][9 + j] - 3 * nv);
    elements_.emplace_back(p, n);
  }
  num_boundary_ = static_cast<std::size_t>(std::count_if(dof_loop_.begin(), dof_loop_.end(), [](int l) { return l >= 0; }));
}

Vec2 FeSpace::edge_normal(std::size_t e) const {
  const auto& ed = edges_[e];
  const Vec2 t = (mesh_->vertices[ed[1]] - mesh_->vertices[ed[0]]).normalized();
  return rotate_quarter_cw(t);
}

std::size_t FeSpace::num_loop_dofs(int loop) const {
  return static_cast<std::size_t>(std::count(dof_loop_.begin(), dof_loop_.end(), loop));
}

DiscreteField::DiscreteField(std::shared_ptr<const FeSpace> space, Eigen::VectorXd coeffs)
    : space_(std::move(space)), coeffs_(std::move(coeffs)) {
  if (static_cast<std::size_t>(coeffs_.size()) != space_->num_dofs()) {
    throw std::invalid_argument("coefficient vector length does not match the dof count");
  }
}

const Eigen::Matrix<double, 30, 1>& DiscreteField::local_poly(std::size_t t) const {
  std::call_once(cache_->once, [this] {
    auto& poly_ = cache_->poly;
    const FeSpace& s = *space_;
    poly_.resize(s.mesh().num_triangles());
    for (std::size_t e = 0; e < poly_.size(); ++e) {
      const HctElement& el = s.element(e);
      Eigen::Matrix<double, 12, 1> u;
      for (int k = 0; k < 12; ++k) u[k] = coeffs_[s.element_dofs(e)[k]];
      for (int k = 0; k < 3; ++k) poly_[e].segment<10>(10 * k) = el.coefficients(k) * u;
    }
  });
  return cache_->poly[t];
}

ScalarJet3 DiscreteField::jet_in(std::size_t t, int sub, const Vec2& x) const {
  const auto& tr = space_->mesh().triangles[t];
  const auto& V = space_->mesh().vertices;
  const Vec2 c = (V[tr[0]] + V[tr[1]] + V[tr[2]]) / 3.0;
  const double s = std::max({(V[tr[1]] - V[tr[0]]).norm(), (V[tr[2]] - V[tr[1]]).norm(), (V[tr[0]] - V[tr[2]]).norm()});
  const Eigen::Matrix<double, 8, 1> r = cubic_monomial_jets(x, c, s) * local_poly(t).segment<10>(10 * sub);
  ScalarJet3 j;
  j.value = r[0];
  j.gradient = {r[1], r[2]};
  j.hessian = {r[3], r[4], r[5]};
  j.grad_laplacian = {r[6], r[7]};
  return j;
}

ScalarJet3 DiscreteField::jet(const Vec2& x, double tolerance) const {
  const auto loc = space_->locator().locate(x, tolerance);
  if (!loc) throw std::out_of_range("point outside the mesh");
  return jet_in(loc->triangle, HctElement::subtriangle_of(loc->bary), x);
}

DiscreteField DiscreteField::operator+(const DiscreteField& o) const {
  return DiscreteField(space_, coeffs_ + o.coeffs_);
}

DiscreteField DiscreteField::operator*(double s) const { return DiscreteField(space_, s * coeffs_); }

Eigen::VectorXd interpolate(const FeSpace& space, const std::function<std::pair<double, Vec2>(const Vec2&)>& f) {
  const Mesh& m = space.mesh();
  Eigen::VectorXd u(space.num_dofs());
  for (std::size_t v = 0; v < m.num_vertices(); ++v) {
    const auto [val, g] = f(m.vertices[v]);
    u[3 * v] = val;
    u[3 * v + 1] = g[0];
    u[3 * v + 2] = g[1];
  }
  for (std::size_t e = 0; e < space.num_edges(); ++e) {
    const auto& ed = space.edge(e);
    const Vec2 mid = 0.5 * (m.vertices[ed[0]] + m.vertices[ed[1]]);
    u[space.edge_dof(e)] = f(mid).second.dot(space.edge_normal(e));
  }
  return u;
}

} // namespace airy
