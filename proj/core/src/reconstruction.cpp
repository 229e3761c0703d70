#include "airy/reconstruction.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <set>

namespace airy {

CompatibilityField compatibility_from_strain(StrainFunction eps) {
  CompatibilityField f;
  f.strain = [eps](const Vec2& x) { return eps(x).strain; };
  f.rotation_gradient = [eps](const Vec2& x) {
    const StrainJet e = eps(x);
    // d_k omega = e_k1,2 - e_k2,1
    return Vec2(e.d2.t11 - e.d1.t12, e.d2.t12 - e.d1.t22);
  };
  return f;
}

CompatibilityField compatibility_from_airy(JetFunction v, const MaterialParams& mat) {
  CompatibilityField f;
  f.strain = [v, mat](const Vec2& x) { return constitutive_strain(airy_stress(v(x).hessian), mat); };
  f.rotation_gradient = [v, k = 1.0 / mat.plane_strain_modulus()](const Vec2& x) {
    const Vec2 g = v(x).grad_laplacian;
    return Vec2(k * g[1], -k * g[0]);
  };
  return f;
}

CompatibilityField difference(CompatibilityField a, CompatibilityField b) {
  CompatibilityField f;
  f.strain = [sa = a.strain, sb = b.strain](const Vec2& x) { return sa(x) - sb(x); };
  f.rotation_gradient = [ga = a.rotation_gradient, gb = b.rotation_gradient](const Vec2& x) {
    return Vec2(ga(x) - gb(x));
  };
  return f;
}

// ---------------------------------------------------------------- recovery

GradLaplacianRecovery::GradLaplacianRecovery(const DiscreteField& v, JetFunction singular)
    : space_(v.space_ptr()), singular_(std::move(singular)) {
  const Mesh& m = space_->mesh();
  const std::size_t nv = m.num_vertices();
  std::vector<std::vector<int>> vt(nv);
  for (std::size_t t = 0; t < m.num_triangles(); ++t)
    for (int c : m.triangles[t]) vt[c].push_back(static_cast<int>(t));

  // Laplacian at every sub-triangle centroid, computed once.
  std::vector<std::array<std::pair<Vec2, double>, 3>> samples(m.num_triangles());
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    const HctElement& el = space_->element(t);
    for (int k = 0; k < 3; ++k) {
      const auto tri = el.subtriangle(k);
      const Vec2 c = (tri[0] + tri[1] + tri[2]) / 3.0;
      double lap = v.jet_in(t, k, c).hessian.trace();
      if (singular_) lap -= singular_(c).hessian.trace();
      samples[t][k] = {c, lap};
    }
  }

  nodal_.assign(nv, Vec2::Zero());
  std::vector<int> patch;
  std::set<int> seen;
  for (std::size_t p = 0; p < nv; ++p) {
    patch = vt[p];
    // boundary patches are one-sided, so they take the 2-ring as well
    if (patch.size() < 4 || m.vertex_loop[p] >= 0) {
      seen.clear();
      seen.insert(patch.begin(), patch.end());
      for (int t : vt[p])
        for (int c : m.triangles[t])
          for (int t2 : vt[c]) seen.insert(t2);
      patch.assign(seen.begin(), seen.end());
    }
    const Vec2 x0 = m.vertices[p];
    double hl = 0.0;
    for (int t : patch)
      for (const auto& s : samples[t]) hl = std::max(hl, (s.first - x0).norm());
    Eigen::MatrixXd a(static_cast<Eigen::Index>(3 * patch.size()), 6);
    Eigen::VectorXd b(a.rows());
    Eigen::Index row = 0;
    for (int t : patch) {
      for (const auto& [x, val] : samples[t]) {
        const Vec2 r = (x - x0) / hl;
        a.row(row) << 1.0, r[0], r[1], r[0] * r[0], r[0] * r[1], r[1] * r[1];
        b[row++] = val;
      }
    }
    const Eigen::VectorXd c = a.colPivHouseholderQr().solve(b);
    nodal_[p] = Vec2(c[1], c[2]) / hl;
  }
}

Vec2 GradLaplacianRecovery::operator()(const Vec2& x) const {
  const auto loc = space_->locator().locate(x, 1e-9);
  if (!loc) throw std::out_of_range("point outside the mesh");
  const auto& tr = space_->mesh().triangles[loc->triangle];
  Vec2 g = loc->bary[0] * nodal_[tr[0]] + loc->bary[1] * nodal_[tr[1]] + loc->bary[2] * nodal_[tr[2]];
  if (singular_) g += singular_(x).grad_laplacian;
  return g;
}

JetFunction recovered_jets(const DiscreteField& v, std::shared_ptr<const GradLaplacianRecovery> recovery) {
  return [v, recovery](const Vec2& x) {
    ScalarJet3 j = v.jet(x, 1e-9);
    j.grad_laplacian = (*recovery)(x);
    return j;
  };
}

JetFunction plastic_jets(const EquilibriumSolution& sol) {
  return [defects = sol.domain->defects(), mat = sol.material](const Vec2& x) {
    return eval_plastic_potential(x, defects, mat);
  };
}

CompatibilityField total_compatibility(const EquilibriumSolution& sol,
                                       std::shared_ptr<const GradLaplacianRecovery> recovery) {
  return compatibility_from_airy(recovered_jets(sol.potential, std::move(recovery)), sol.material);
}

CompatibilityField elastic_compatibility(const EquilibriumSolution& sol,
                                         std::shared_ptr<const GradLaplacianRecovery> recovery) {
  return difference(compatibility_from_airy(recovered_jets(sol.potential, recovery), sol.material),
                    compatibility_from_airy(plastic_jets(sol), sol.material));
}

LoopCharges loop_charges(const EquilibriumSolution& sol, std::shared_ptr<const GradLaplacianRecovery> recovery,
                         int n_quad) {
  const PerforatedDomain& dom = *sol.domain;
  const JetFunction v = recovered_jets(sol.potential, std::move(recovery));
  const double eps = dom.eps();
  LoopCharges out;
  for (std::size_t i = 0; i < dom.num_cores(); ++i) {
    const Vec2 c = dom.cores()[i].center;
    double room = dom.outer().distance_to_boundary(c);
    for (std::size_t j = 0; j < dom.num_cores(); ++j)
      if (j != i) room = std::min(room, (dom.cores()[j].center - c).norm() - eps);
    const double r = std::min(1.5 * eps, eps + 0.5 * (room - eps));
    const Eigen::Vector3d m = michell_integrals(v, circle_loop(c, r, n_quad, Traversal::Clockwise), sol.material)
                                  .scaled(sol.material);
    out.charges.frank.push_back(m[0]);
    out.charges.burgers.emplace_back(m[1], m[2]);
    out.radius.push_back(r);
  }
  return out;
}

// ---------------------------------------------------------------- cuts

Vec2 deepest_interior_point(const PerforatedDomain& dom, int resolution) {
  const auto [lo, hi] = dom.outer().bounding_box();
  Vec2 best = 0.5 * (lo + hi);
  double best_d = -1.0;
  for (int j = 0; j < resolution; ++j) {
    for (int i = 0; i < resolution; ++i) {
      const Vec2 x(lo[0] + (i + 0.5) * (hi[0] - lo[0]) / resolution, lo[1] + (j + 0.5) * (hi[1] - lo[1]) / resolution);
      if (!dom.contains(x)) continue;
      const double d = std::min(dom.distance_to_cores(x), dom.outer().distance_to_boundary(x));
      if (d > best_d) {
        best_d = d;
        best = x;
      }
    }
  }
  return best;
}

namespace {

double segment_distance(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const double o1 = cross(b - a, c - a), o2 = cross(b - a, d - a);
  const double o3 = cross(d - c, a - c), o4 = cross(d - c, b - c);
  if (((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0))) return 0.0;
  return std::min({distance_to_segment(a, c, d), distance_to_segment(b, c, d), distance_to_segment(c, a, b),
                   distance_to_segment(d, a, b)});
}

} // namespace

std::vector<Vec2> choose_cut_directions(const PerforatedDomain& dom) {
  const auto [lo, hi] = dom.outer().bounding_box();
  const double reach = 2.0 * (hi - lo).norm();
  const Vec2 mid = 0.5 * (lo + hi);
  const int candidates = 180;
  std::vector<Vec2> dirs;
  std::vector<std::pair<Vec2, Vec2>> placed;
  for (std::size_t i = 0; i < dom.num_cores(); ++i) {
    const Vec2 c = dom.cores()[i].center;
    Vec2 pref = c - mid;
    pref = pref.norm() > 1e-9 ? Vec2(pref.normalized()) : Vec2(1.0, 0.0);
    const double a0 = std::atan2(pref[1], pref[0]);
    double best_score = -std::numeric_limits<double>::infinity();
    Vec2 best = pref;
    for (int k = 0; k < candidates; ++k) {
      // alternate around the preferred direction: 0, +1, -1, +2, ...
      const int step = (k + 1) / 2 * (k % 2 == 1 ? 1 : -1);
      const double ang = a0 + step * (2.0 * std::numbers::pi / candidates) + 1e-7;
      const Vec2 d(std::cos(ang), std::sin(ang));
      const Vec2 e = c + reach * d;
      double score = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < dom.num_cores(); ++j) {
        if (j == i) continue;
        score = std::min(score, distance_to_segment(dom.cores()[j].center, c, e) - dom.cores()[j].radius);
      }
      for (const auto& [p, q] : placed) score = std::min(score, segment_distance(c, e, p, q));
      if (score >= 0.5 * dom.eps()) {
        best = d;
        best_score = score;
        break;
      }
      if (score > best_score) {
        best_score = score;
        best = d;
      }
    }
    if (best_score <= 0.0) throw ValidationError("could not place disjoint cut rays for core " + std::to_string(i));
    dirs.push_back(best);
    placed.emplace_back(c, c + reach * best);
  }
  return dirs;
}

// ---------------------------------------------------------------- reconstruction

namespace {

struct State {
  Vec2 u = Vec2::Zero();
  double w = 0.0;
};

class SegmentIntegrator {
public:
  SegmentIntegrator(const CompatibilityField& f, int n) : f_(f) {
    for (const auto& [x, w] : gauss_legendre(n)) rule_.emplace_back(0.5 * (x + 1.0), 0.5 * w);
  }

  State operator()(const Vec2& p, const Vec2& q, const State& s) {
    const Vec2 d = q - p;
    const Vec2 pd = rotate_quarter_cw(d);
    State out;
    out.u = s.u + s.w * pd;
    out.w = s.w;
    for (const auto& [t, w] : rule_) {
      const Vec2 y = p + t * d;
      const SymTensor2 e = f_.strain(y);
      const double dw = f_.rotation_gradient(y).dot(d);
      max_strain = std::max(max_strain, std::sqrt(e.norm2()));
      max_rot_grad = std::max(max_rot_grad, std::abs(dw) / d.norm());
      out.u += w * (e.apply(d) + (1.0 - t) * dw * pd);
      out.w += w * dw;
    }
    return out;
  }

  double max_strain = 0.0;
  double max_rot_grad = 0.0;

private:
  const CompatibilityField& f_;
  std::vector<std::pair<double, double>> rule_;
};

struct Ray {
  Vec2 origin;
  Vec2 dir;
};

// +1 if a -> b crosses the ray counter-clockwise, -1 clockwise, 0 otherwise.
int crossing(const Ray& r, const Vec2& a, const Vec2& b) {
  const double sa = cross(r.dir, a - r.origin), sb = cross(r.dir, b - r.origin);
  if ((sa > 0) == (sb > 0)) return 0;
  const double t = sa / (sa - sb);
  const Vec2 x = a + t * (b - a);
  if ((x - r.origin).dot(r.dir) <= 0.0) return 0;
  return sb > sa ? 1 : -1;
}

} // namespace

Reconstruction reconstruct_displacement(const CompatibilityField& field, const Mesh& mesh, const PerforatedDomain& dom,
                                        const Vec2& base_point, std::vector<Vec2> cut_directions,
                                        const ReconstructionOptions& opt) {
  if (cut_directions.empty()) cut_directions = choose_cut_directions(dom);
  if (cut_directions.size() != dom.num_cores()) {
    throw std::invalid_argument("one cut direction per core is required");
  }
  const std::size_t nv = mesh.num_vertices();
  std::vector<Ray> rays;
  for (std::size_t i = 0; i < dom.num_cores(); ++i) {
    Vec2 d = cut_directions[i].normalized();
    // nudge rays that graze a vertex
    for (int attempt = 0; attempt < 16; ++attempt) {
      bool grazes = false;
      for (const Vec2& v : mesh.vertices) {
        const Vec2 r = v - dom.cores()[i].center;
        if (r.dot(d) > 0 && std::abs(cross(d, r)) < 1e-10 * (1.0 + r.norm())) grazes = true;
      }
      if (!grazes) break;
      const double a = std::atan2(d[1], d[0]) + 1e-6;
      d = Vec2(std::cos(a), std::sin(a));
    }
    cut_directions[i] = d;
    rays.push_back({dom.cores()[i].center, d});
  }

  // unique edges with their crossing signature
  std::set<std::pair<int, int>> edge_set;
  for (const auto& t : mesh.triangles)
    for (int k = 0; k < 3; ++k) {
      const int a = t[k], b = t[(k + 1) % 3];
      edge_set.emplace(std::min(a, b), std::max(a, b));
    }
  std::vector<std::vector<int>> adj(nv);
  struct Crossing {
    int a, b; // oriented counter-clockwise
    std::size_t core;
  };
  std::vector<Crossing> crossings;
  for (const auto& [a, b] : edge_set) {
    int hits = 0;
    std::size_t core = 0;
    int sign = 0;
    for (std::size_t i = 0; i < rays.size(); ++i) {
      const int s = crossing(rays[i], mesh.vertices[a], mesh.vertices[b]);
      if (s != 0) {
        ++hits;
        core = i;
        sign = s;
      }
    }
    if (hits == 0) {
      adj[a].push_back(b);
      adj[b].push_back(a);
    } else if (hits == 1) {
      crossings.push_back(sign > 0 ? Crossing{a, b, core} : Crossing{b, a, core});
    }
  }

  Reconstruction rec;
  rec.cut_directions = cut_directions;
  int base = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t v = 0; v < nv; ++v) {
    const double d = (mesh.vertices[v] - base_point).norm();
    if (d < best) {
      best = d;
      base = static_cast<int>(v);
    }
  }
  rec.base_vertex = base;

  SegmentIntegrator seg(field, opt.gauss_points);
  std::vector<State> state(nv);
  std::vector<char> done(nv, 0);
  std::queue<int> queue;
  queue.push(base);
  done[base] = 1;
  while (!queue.empty()) {
    const int p = queue.front();
    queue.pop();
    for (int q : adj[p]) {
      if (done[q]) continue;
      state[q] = seg(mesh.vertices[p], mesh.vertices[q], state[p]);
      done[q] = 1;
      queue.push(q);
    }
  }
  if (std::find(done.begin(), done.end(), 0) != done.end()) {
    throw SolverError("cut domain is disconnected; choose different cut directions");
  }
  rec.displacement.resize(nv);
  rec.rotation.resize(nv);
  for (std::size_t v = 0; v < nv; ++v) {
    rec.displacement[v] = state[v].u;
    rec.rotation[v] = state[v].w;
  }

  // jumps across each cut
  std::vector<std::vector<LoopMismatch>> samples(dom.num_cores());
  for (const Crossing& c : crossings) {
    const State across = seg(mesh.vertices[c.a], mesh.vertices[c.b], state[c.a]);
    LoopMismatch m;
    m.rotation_jump = across.w - state[c.b].w;
    m.raw_jump = across.u - state[c.b].u;
    m.displacement_jump =
        m.raw_jump + m.rotation_jump * rotate_quarter_cw(Vec2(dom.cores()[c.core].center - mesh.vertices[c.b]));
    samples[c.core].push_back(m);
  }
  rec.mismatch.resize(dom.num_cores());
  for (std::size_t i = 0; i < dom.num_cores(); ++i) {
    const auto& s = samples[i];
    if (s.empty()) throw SolverError("no mesh edge crosses the cut of core " + std::to_string(i));
    // median over crossings; the crossings hugging the core circle carry the
    // boundary-layer error of the discrete third derivatives
    auto median = [&](auto get) {
      std::vector<double> v;
      v.reserve(s.size());
      for (const auto& m : s) v.push_back(get(m));
      const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
      std::nth_element(v.begin(), mid, v.end());
      if (v.size() % 2 == 1) return *mid;
      return 0.5 * (*mid + *std::max_element(v.begin(), mid));
    };
    LoopMismatch avg;
    avg.rotation_jump = median([](const LoopMismatch& m) { return m.rotation_jump; });
    for (int k = 0; k < 2; ++k) {
      avg.displacement_jump[k] = median([k](const LoopMismatch& m) { return m.displacement_jump[k]; });
      avg.raw_jump[k] = median([k](const LoopMismatch& m) { return m.raw_jump[k]; });
    }
    for (const auto& m : s) {
      avg.spread = std::max({avg.spread, std::abs(m.rotation_jump - avg.rotation_jump),
                             (m.displacement_jump - avg.displacement_jump).norm()});
    }
    avg.crossings = static_cast<int>(s.size());
    rec.mismatch[i] = avg;
  }

  // closure around every triangle of the cut domain, against the domain size
  Vec2 lo = mesh.vertices.front(), hi = lo;
  for (const Vec2& x : mesh.vertices) {
    lo = lo.cwiseMin(x);
    hi = hi.cwiseMax(x);
  }
  const double diameter = (hi - lo).norm();
  for (const auto& t : mesh.triangles) {
    bool cut = false;
    for (int k = 0; k < 3 && !cut; ++k)
      for (const Ray& r : rays) cut = cut || crossing(r, mesh.vertices[t[k]], mesh.vertices[t[(k + 1) % 3]]) != 0;
    if (cut) continue;
    State s;
    for (int k = 0; k < 3; ++k) s = seg(mesh.vertices[t[k]], mesh.vertices[t[(k + 1) % 3]], s);
    const double du = s.u.norm() / (std::max(seg.max_strain, 1e-300) * diameter);
    const double dw = std::abs(s.w) / (std::max(seg.max_rot_grad, 1e-300) * diameter);
    rec.closure_defect = std::max({rec.closure_defect, du, dw});
  }
  if (opt.closure_tolerance >= 0.0 && rec.closure_defect > opt.closure_tolerance) {
    throw SolverError("strain is not compatible in the bulk: loop closure defect " +
                      std::to_string(rec.closure_defect));
  }
  return rec;
}

} // namespace airy
