#include "airy/mesh.hpp"

#include "airy/delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <ostream>
#include <random>
#include <unordered_map>
#include <unordered_set>

namespace airy {

namespace {

constexpr double kPi = std::numbers::pi;

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

double angle_at(const Vec2& p, const Vec2& q, const Vec2& r) {
  const Vec2 u = q - p, v = r - p;
  return std::atan2(std::abs(cross(u, v)), u.dot(v));
}

/// Uniform bucket grid over points, used by the Poisson fill.
class PointGrid {
public:
  PointGrid(const Vec2& lo, const Vec2& hi, double cell) : lo_(lo), cell_(cell) {
    nx_ = std::max(1, static_cast<int>(std::ceil((hi[0] - lo[0]) / cell)) + 1);
    ny_ = std::max(1, static_cast<int>(std::ceil((hi[1] - lo[1]) / cell)) + 1);
    cells_.resize(static_cast<std::size_t>(nx_) * ny_);
  }

  void insert(int id, const Vec2& p) { cells_[index(p)].push_back(id); }

  template <class F>
  void for_each_near(const Vec2& p, double r, F&& f) const {
    const int cx = cx_of(p[0]), cy = cy_of(p[1]);
    const int reach = static_cast<int>(std::ceil(r / cell_));
    for (int j = std::max(0, cy - reach); j <= std::min(ny_ - 1, cy + reach); ++j) {
      for (int i = std::max(0, cx - reach); i <= std::min(nx_ - 1, cx + reach); ++i) {
        for (int id : cells_[static_cast<std::size_t>(j) * nx_ + i]) f(id);
      }
    }
  }

private:
  int cx_of(double x) const { return std::clamp(static_cast<int>((x - lo_[0]) / cell_), 0, nx_ - 1); }
  int cy_of(double y) const { return std::clamp(static_cast<int>((y - lo_[1]) / cell_), 0, ny_ - 1); }
  std::size_t index(const Vec2& p) const { return static_cast<std::size_t>(cy_of(p[1])) * nx_ + cx_of(p[0]); }

  Vec2 lo_;
  double cell_;
  int nx_ = 1, ny_ = 1;
  std::vector<std::vector<int>> cells_;
};

struct Chord {
  int a, b;
};

class MeshBuilder {
public:
  MeshBuilder(const PerforatedDomain& dom, double h, const MeshOptions& opt) : dom_(dom), h_(h), opt_(opt) {}

  Mesh build() {
    place_boundary_points();
    fill_interior();
    for (int pass = 0; pass < opt_.smoothing_passes; ++pass) smooth();
    return finish();
  }

private:
  double size(const Vec2& x) const { return mesh_size_at(dom_, h_, opt_, x); }

  int add_point(const Vec2& p, int loop) {
    pts_.push_back(p);
    loop_of_.push_back(loop);
    return static_cast<int>(pts_.size()) - 1;
  }

  void add_circle(const Vec2& c, double r, int loop) {
    double smin = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 1024; ++k) {
      const double th = 2.0 * kPi * k / 1024;
      smin = std::min(smin, size(c + r * Vec2(std::cos(th), std::sin(th))));
    }
    const int n = std::max(12, static_cast<int>(std::ceil(2.0 * kPi * r / smin)));
    std::vector<int> ids;
    for (int k = 0; k < n; ++k) {
      const double th = 2.0 * kPi * k / n;
      ids.push_back(add_point(c + r * Vec2(std::cos(th), std::sin(th)), loop));
    }
    loops_.push_back(ids);
  }

  void place_boundary_points() {
    const OuterBoundary& outer = dom_.outer();
    if (outer.is_disk()) {
      add_circle(outer.as_disk().center, outer.as_disk().radius, 0);
    } else {
      const auto& poly = outer.as_polygon();
      std::vector<int> ids;
      for (std::size_t i = 0; i < poly.size(); ++i) {
        const Vec2 a = poly[i], b = poly[(i + 1) % poly.size()];
        double smin = std::numeric_limits<double>::infinity();
        for (int k = 0; k <= 64; ++k) smin = std::min(smin, size(a + (k / 64.0) * (b - a)));
        const int m = std::max(1, static_cast<int>(std::ceil((b - a).norm() / smin)));
        for (int j = 0; j < m; ++j) ids.push_back(add_point(a + (double(j) / m) * (b - a), 0));
      }
      loops_.push_back(ids);
    }
    for (std::size_t i = 0; i < dom_.num_cores(); ++i) {
      add_circle(dom_.cores()[i].center, dom_.cores()[i].radius, PerforatedDomain::core_loop_id(i));
    }
    for (const auto& loop : loops_) {
      for (std::size_t k = 0; k < loop.size(); ++k) chords_.push_back({loop[k], loop[(k + 1) % loop.size()]});
    }
    n_boundary_ = pts_.size();
  }

  bool inside_diametral_circle(const Vec2& x) const {
    bool hit = false;
    chord_grid_->for_each_near(x, chord_reach_, [&](int c) {
      const Vec2& a = pts_[chords_[c].a];
      const Vec2& b = pts_[chords_[c].b];
      if ((x - a).dot(x - b) <= 0.0) hit = true;
    });
    return hit;
  }

  bool admissible_site(const Vec2& x, double margin) const {
    if (!dom_.outer().contains(x)) return false;
    if (dom_.outer().distance_to_boundary(x) < margin) return false;
    if (dom_.num_cores() > 0 && dom_.distance_to_cores(x) < margin) return false;
    return !inside_diametral_circle(x);
  }

  void fill_interior() {
    const auto [lo, hi] = dom_.outer().bounding_box();
    const double smin = h_ * (dom_.num_cores() > 0 ? opt_.core_size_factor : 1.0);
    const Vec2 pad(h_, h_);
    grid_ = std::make_unique<PointGrid>(lo - pad, hi + pad, kSpacing * smin);
    chord_grid_ = std::make_unique<PointGrid>(lo - pad, hi + pad, h_);
    chord_reach_ = 0.0;
    for (std::size_t c = 0; c < chords_.size(); ++c) {
      const Vec2 mid = 0.5 * (pts_[chords_[c].a] + pts_[chords_[c].b]);
      chord_grid_->insert(static_cast<int>(c), mid);
      chord_reach_ = std::max(chord_reach_, (pts_[chords_[c].a] - pts_[chords_[c].b]).norm());
    }
    for (std::size_t i = 0; i < pts_.size(); ++i) grid_->insert(static_cast<int>(i), pts_[i]);

    std::mt19937_64 rng(opt_.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<int> active(pts_.size());
    for (std::size_t i = 0; i < active.size(); ++i) active[i] = static_cast<int>(i);

    constexpr int kTries = 24;
    while (!active.empty()) {
      const std::size_t slot = static_cast<std::size_t>(unit(rng) * active.size()) % active.size();
      const int p = active[slot];
      const double rp = kSpacing * size(pts_[p]);
      bool placed = false;
      for (int k = 0; k < kTries; ++k) {
        const double th = 2.0 * kPi * unit(rng);
        const double rad = rp * (1.0 + unit(rng));
        const Vec2 c = pts_[p] + rad * Vec2(std::cos(th), std::sin(th));
        const double sc = size(c);
        const double rc = kSpacing * sc;
        if (!admissible_site(c, 0.5 * sc)) continue;
        bool close = false;
        grid_->for_each_near(c, rc, [&](int q) {
          if (!close && (pts_[q] - c).norm() < rc) close = true;
        });
        if (close) continue;
        const int id = add_point(c, -1);
        grid_->insert(id, c);
        active.push_back(id);
        placed = true;
        break;
      }
      if (!placed) {
        active[slot] = active.back();
        active.pop_back();
      }
    }
  }

  std::vector<std::array<int, 3>> triangulate_domain() const {
    auto tris = delaunay_triangulate(pts_);
    std::vector<std::array<int, 3>> kept;
    kept.reserve(tris.size());
    const bool polygon = !dom_.outer().is_disk();
    for (const auto& t : tris) {
      const int l0 = loop_of_[t[0]];
      if (l0 > 0 && l0 == loop_of_[t[1]] && l0 == loop_of_[t[2]]) continue; // inside a core polygon
      if (polygon) {
        const Vec2 c = (pts_[t[0]] + pts_[t[1]] + pts_[t[2]]) / 3.0;
        if (!point_in_polygon(c, dom_.outer().as_polygon())) continue;
      }
      kept.push_back(t);
    }
    return kept;
  }

  void smooth() {
    const auto tris = triangulate_domain();
    std::vector<Vec2> sum(pts_.size(), Vec2::Zero());
    std::vector<int> cnt(pts_.size(), 0);
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(tris.size() * 2);
    for (const auto& t : tris) {
      for (int k = 0; k < 3; ++k) {
        const int a = t[k], b = t[(k + 1) % 3];
        if (!seen.insert(edge_key(a, b)).second) continue;
        sum[a] += pts_[b];
        ++cnt[a];
        sum[b] += pts_[a];
        ++cnt[b];
      }
    }
    for (std::size_t i = n_boundary_; i < pts_.size(); ++i) {
      if (cnt[i] == 0) continue;
      const Vec2 target = sum[i] / cnt[i];
      if (admissible_site(target, 0.25 * size(target))) pts_[i] = target;
    }
  }

  Mesh finish() {
    Mesh m;
    m.h = h_;
    m.vertices = pts_;
    m.vertex_loop = loop_of_;
    m.triangles = triangulate_domain();

    std::unordered_map<std::uint64_t, int> count;
    count.reserve(m.triangles.size() * 3);
    for (const auto& t : m.triangles) {
      for (int k = 0; k < 3; ++k) ++count[edge_key(t[k], t[(k + 1) % 3])];
    }
    std::unordered_map<std::uint64_t, int> chord_loop;
    for (const auto& c : chords_) chord_loop[edge_key(c.a, c.b)] = loop_of_[c.a];
    for (const auto& t : m.triangles) {
      for (int k = 0; k < 3; ++k) {
        const int a = t[k], b = t[(k + 1) % 3];
        const auto key = edge_key(a, b);
        if (count[key] != 1) continue;
        const auto it = chord_loop.find(key);
        if (it == chord_loop.end()) throw std::runtime_error("mesh: unexpected boundary edge; boundary not recovered");
        m.boundary_edges.push_back({a, b, it->second});
      }
    }
    if (m.boundary_edges.size() != chords_.size()) {
      throw std::runtime_error("mesh: boundary chords missing from the triangulation");
    }
    const double min_angle = m.min_angle_deg();
    if (min_angle < opt_.min_angle_deg) {
      throw std::runtime_error("mesh: minimum angle " + std::to_string(min_angle) + " deg below " +
                               std::to_string(opt_.min_angle_deg));
    }
    return m;
  }

  static constexpr double kSpacing = 0.8;

  const PerforatedDomain& dom_;
  double h_;
  MeshOptions opt_;
  std::vector<Vec2> pts_;
  std::vector<int> loop_of_;
  std::vector<std::vector<int>> loops_;
  std::vector<Chord> chords_;
  std::size_t n_boundary_ = 0;
  std::unique_ptr<PointGrid> grid_;
  std::unique_ptr<PointGrid> chord_grid_;
  double chord_reach_ = 0.0;
};

} // namespace

double Mesh::triangle_area(std::size_t t) const {
  const auto& tr = triangles[t];
  return 0.5 * cross(vertices[tr[1]] - vertices[tr[0]], vertices[tr[2]] - vertices[tr[0]]);
}

double Mesh::area() const {
  double a = 0.0;
  for (std::size_t t = 0; t < triangles.size(); ++t) a += triangle_area(t);
  return a;
}

double Mesh::min_angle_deg() const {
  double best = 180.0;
  for (const auto& t : triangles) {
    for (int k = 0; k < 3; ++k) {
      const double a = angle_at(vertices[t[k]], vertices[t[(k + 1) % 3]], vertices[t[(k + 2) % 3]]);
      best = std::min(best, a * 180.0 / kPi);
    }
  }
  return best;
}

double Mesh::loop_length(int loop) const {
  double len = 0.0;
  for (const auto& e : boundary_edges) {
    if (e.loop == loop) len += (vertices[e.b] - vertices[e.a]).norm();
  }
  return len;
}

double mesh_size_at(const PerforatedDomain& dom, double h, const MeshOptions& opt, const Vec2& x) {
  if (dom.num_cores() == 0) return h;
  const double hc = opt.core_size_factor * h;
  const double d = std::max(0.0, dom.distance_to_cores(x));
  const double ramp = std::clamp(d / (opt.grading_distance * dom.eps()), 0.0, 1.0);
  return hc + (h - hc) * ramp;
}

Mesh generate_mesh(const PerforatedDomain& dom, double h, const MeshOptions& opt) {
  if (!(h > 0.0) || !std::isfinite(h)) throw ValidationError("mesh size h must be positive");
  if (dom.num_cores() > 0 && !(h < dom.eps())) {
    throw ValidationError("mesh size h = " + std::to_string(h) + " must be smaller than the core radius " +
                          std::to_string(dom.eps()));
  }
  MeshBuilder builder(dom, h, opt);
  return builder.build();
}

Mesh refine_uniform(const Mesh& mesh, const PerforatedDomain& dom) {
  Mesh out;
  out.h = 0.5 * mesh.h;
  out.vertices = mesh.vertices;
  out.vertex_loop = mesh.vertex_loop;

  std::unordered_map<std::uint64_t, int> boundary_loop_of;
  for (const auto& e : mesh.boundary_edges) boundary_loop_of[edge_key(e.a, e.b)] = e.loop;

  std::unordered_map<std::uint64_t, int> mid;
  mid.reserve(mesh.triangles.size() * 2);
  auto midpoint = [&](int a, int b) {
    const auto key = edge_key(a, b);
    if (auto it = mid.find(key); it != mid.end()) return it->second;
    Vec2 m = 0.5 * (mesh.vertices[a] + mesh.vertices[b]);
    int loop = -1;
    if (auto it = boundary_loop_of.find(key); it != boundary_loop_of.end()) {
      loop = it->second;
      if (loop == 0 && dom.outer().is_disk()) {
        const Disk& d = dom.outer().as_disk();
        m = d.center + d.radius * (m - d.center).normalized();
      } else if (loop > 0) {
        const Core& c = dom.cores()[loop - 1];
        m = c.center + c.radius * (m - c.center).normalized();
      }
    }
    out.vertices.push_back(m);
    out.vertex_loop.push_back(loop);
    const int id = static_cast<int>(out.vertices.size()) - 1;
    mid.emplace(key, id);
    return id;
  };

  out.triangles.reserve(mesh.triangles.size() * 4);
  for (const auto& t : mesh.triangles) {
    const int m01 = midpoint(t[0], t[1]);
    const int m12 = midpoint(t[1], t[2]);
    const int m20 = midpoint(t[2], t[0]);
    out.triangles.push_back({t[0], m01, m20});
    out.triangles.push_back({m01, t[1], m12});
    out.triangles.push_back({m20, m12, t[2]});
    out.triangles.push_back({m01, m12, m20});
  }
  for (const auto& e : mesh.boundary_edges) {
    const int m = mid.at(edge_key(e.a, e.b));
    out.boundary_edges.push_back({e.a, m, e.loop});
    out.boundary_edges.push_back({m, e.b, e.loop});
  }
  return out;
}

void write_mesh(std::ostream& os, const Mesh& mesh) {
  os.precision(17);
  os << "# vertices " << mesh.vertices.size() << " triangles " << mesh.triangles.size() << " boundary_edges "
     << mesh.boundary_edges.size() << "\n";
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    os << "vertex " << i << " " << mesh.vertices[i][0] << " " << mesh.vertices[i][1] << "\n";
  }
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tr = mesh.triangles[t];
    os << "triangle " << t << " " << tr[0] << " " << tr[1] << " " << tr[2] << "\n";
  }
  for (const auto& e : mesh.boundary_edges) os << "boundary " << e.a << " " << e.b << " " << e.loop << "\n";
}

std::array<double, 3> barycentric(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& x) {
  const double det = cross(b - a, c - a);
  const double l1 = cross(x - a, c - a) / det;
  const double l2 = cross(b - a, x - a) / det;
  return {1.0 - l1 - l2, l1, l2};
}

TriangleLocator::TriangleLocator(const Mesh& mesh) : mesh_(&mesh) {
  Vec2 lo = mesh.vertices.front(), hi = lo;
  for (const auto& v : mesh.vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  const double area = std::max(mesh.area(), 1e-300);
  cell_ = 2.0 * std::sqrt(area / std::max<std::size_t>(1, mesh.num_triangles()));
  lo_ = lo;
  nx_ = std::max(1, static_cast<int>(std::ceil((hi[0] - lo[0]) / cell_)) + 1);
  ny_ = std::max(1, static_cast<int>(std::ceil((hi[1] - lo[1]) / cell_)) + 1);

  std::vector<std::array<int, 4>> range(mesh.num_triangles());
  std::vector<int> counts(static_cast<std::size_t>(nx_) * ny_ + 1, 0);
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tr = mesh.triangles[t];
    Vec2 tlo = mesh.vertices[tr[0]], thi = tlo;
    for (int k = 1; k < 3; ++k) {
      tlo = tlo.cwiseMin(mesh.vertices[tr[k]]);
      thi = thi.cwiseMax(mesh.vertices[tr[k]]);
    }
    auto& r = range[t];
    r[0] = std::clamp(static_cast<int>((tlo[0] - lo_[0]) / cell_), 0, nx_ - 1);
    r[1] = std::clamp(static_cast<int>((thi[0] - lo_[0]) / cell_), 0, nx_ - 1);
    r[2] = std::clamp(static_cast<int>((tlo[1] - lo_[1]) / cell_), 0, ny_ - 1);
    r[3] = std::clamp(static_cast<int>((thi[1] - lo_[1]) / cell_), 0, ny_ - 1);
    for (int j = r[2]; j <= r[3]; ++j)
      for (int i = r[0]; i <= r[1]; ++i) ++counts[static_cast<std::size_t>(j) * nx_ + i + 1];
  }
  for (std::size_t k = 1; k < counts.size(); ++k) counts[k] += counts[k - 1];
  start_ = counts;
  items_.resize(counts.back());
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& r = range[t];
    for (int j = r[2]; j <= r[3]; ++j)
      for (int i = r[0]; i <= r[1]; ++i) items_[counts[static_cast<std::size_t>(j) * nx_ + i]++] = static_cast<int>(t);
  }
}

std::optional<PointLocation> TriangleLocator::locate(const Vec2& x, double tolerance) const {
  const auto& m = *mesh_;
  const int cx = static_cast<int>(std::floor((x[0] - lo_[0]) / cell_));
  const int cy = static_cast<int>(std::floor((x[1] - lo_[1]) / cell_));
  constexpr double kInsideTol = -1e-12;
  if (cx >= 0 && cx < nx_ && cy >= 0 && cy < ny_) {
    const std::size_t c = static_cast<std::size_t>(cy) * nx_ + cx;
    for (int k = start_[c]; k < start_[c + 1]; ++k) {
      const auto& tr = m.triangles[items_[k]];
      const auto b = barycentric(m.vertices[tr[0]], m.vertices[tr[1]], m.vertices[tr[2]], x);
      if (b[0] >= kInsideTol && b[1] >= kInsideTol && b[2] >= kInsideTol) {
        return PointLocation{items_[k], b};
      }
    }
  }
  if (tolerance <= 0.0) return std::nullopt;

  const int reach = static_cast<int>(std::ceil(tolerance / cell_));
  double best = std::numeric_limits<double>::infinity();
  PointLocation found;
  for (int j = std::max(0, cy - reach); j <= std::min(ny_ - 1, cy + reach); ++j) {
    for (int i = std::max(0, cx - reach); i <= std::min(nx_ - 1, cx + reach); ++i) {
      const std::size_t c = static_cast<std::size_t>(j) * nx_ + i;
      for (int k = start_[c]; k < start_[c + 1]; ++k) {
        const auto& tr = m.triangles[items_[k]];
        const Vec2 &a = m.vertices[tr[0]], &b = m.vertices[tr[1]], &cc = m.vertices[tr[2]];
        const double d = std::min({distance_to_segment(x, a, b), distance_to_segment(x, b, cc),
                                   distance_to_segment(x, cc, a)});
        if (d < best) {
          best = d;
          found.triangle = items_[k];
          found.bary = barycentric(a, b, cc, x);
        }
      }
    }
  }
  if (best <= tolerance) return found;
  return std::nullopt;
}

} // namespace airy
