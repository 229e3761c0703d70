#include "airy/delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>

#include <boost/multiprecision/cpp_int.hpp>

namespace airy {

namespace {

using i64 = std::int64_t;
using i128 = __int128;
using boost::multiprecision::int256_t;

struct IPoint {
  i64 x, y;
};

int orient(const IPoint& a, const IPoint& b, const IPoint& c) {
  const i128 d = static_cast<i128>(b.x - a.x) * (c.y - a.y) - static_cast<i128>(b.y - a.y) * (c.x - a.x);
  return (d > 0) - (d < 0);
}

// > 0 when d lies strictly inside the circumcircle of the ccw triangle abc.
int incircle(const IPoint& a, const IPoint& b, const IPoint& c, const IPoint& d) {
  const i64 adx = a.x - d.x, ady = a.y - d.y;
  const i64 bdx = b.x - d.x, bdy = b.y - d.y;
  const i64 cdx = c.x - d.x, cdy = c.y - d.y;

  // floating-point filter
  {
    const double ax = double(adx), ay = double(ady), bx = double(bdx), by = double(bdy);
    const double cx = double(cdx), cy = double(cdy);
    const double alift = ax * ax + ay * ay, blift = bx * bx + by * by, clift = cx * cx + cy * cy;
    const double t1 = bx * cy - cx * by, t2 = cx * ay - ax * cy, t3 = ax * by - bx * ay;
    const double det = alift * t1 + blift * t2 + clift * t3;
    const double perm = alift * (std::abs(bx * cy) + std::abs(cx * by)) +
                        blift * (std::abs(cx * ay) + std::abs(ax * cy)) +
                        clift * (std::abs(ax * by) + std::abs(bx * ay));
    const double bound = 1e-12 * perm;
    if (det > bound) return 1;
    if (det < -bound) return -1;
  }

  const int256_t ax = adx, ay = ady, bx = bdx, by = bdy, cx = cdx, cy = cdy;
  const int256_t alift = ax * ax + ay * ay;
  const int256_t blift = bx * bx + by * by;
  const int256_t clift = cx * cx + cy * cy;
  const int256_t det = alift * (bx * cy - cx * by) + blift * (cx * ay - ax * cy) + clift * (ax * by - bx * ay);
  return (det > 0) - (det < 0);
}

struct Tri {
  std::array<int, 3> v{};
  std::array<int, 3> nbr{-1, -1, -1}; // nbr[k] is across the edge opposite v[k]
  bool alive = true;
};

class Triangulator {
public:
  explicit Triangulator(std::vector<IPoint> pts) : pts_(std::move(pts)) {}

  std::vector<std::array<int, 3>> run(std::size_t n_real) {
    // super triangle far outside the 2^26 lattice
    const i64 big = i64(1) << 40;
    const int s0 = add_point({-big, -big});
    const int s1 = add_point({big, -big / 2});
    const int s2 = add_point({-big / 2, big});
    tris_.push_back(Tri{{s0, s1, s2}});
    last_ = 0;

    mark_.assign(pts_.size(), -1);
    std::vector<int> order = insertion_order(n_real);
    for (int p : order) insert(p);

    std::vector<std::array<int, 3>> out;
    for (const auto& t : tris_) {
      if (!t.alive) continue;
      if (t.v[0] >= static_cast<int>(n_real) || t.v[1] >= static_cast<int>(n_real) ||
          t.v[2] >= static_cast<int>(n_real)) {
        continue;
      }
      out.push_back(t.v);
    }
    return out;
  }

private:
  int add_point(IPoint p) {
    pts_.push_back(p);
    return static_cast<int>(pts_.size()) - 1;
  }

  // Snake order over a coarse grid keeps successive points close together.
  std::vector<int> insertion_order(std::size_t n) const {
    const int cells = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(n) / 4.0)));
    const double span = static_cast<double>(i64(1) << 26) + 1.0;
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    auto key = [&](int i) {
      const int cx = std::min(cells - 1, static_cast<int>(pts_[i].x / span * cells));
      int cy = std::min(cells - 1, static_cast<int>(pts_[i].y / span * cells));
      if (cx % 2 == 1) cy = cells - 1 - cy;
      return std::pair<int, int>(cx, cy);
    };
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return key(a) < key(b); });
    return idx;
  }

  int locate(int p) const {
    int t = last_;
    int guard = 0;
    const int limit = static_cast<int>(tris_.size()) * 4 + 100;
    while (true) {
      const Tri& T = tris_[t];
      bool moved = false;
      for (int s = 0; s < 3; ++s) {
        const int k = (s + guard) % 3;
        const int a = T.v[(k + 1) % 3], b = T.v[(k + 2) % 3];
        if (orient(pts_[a], pts_[b], pts_[p]) < 0) {
          t = T.nbr[k];
          moved = true;
          break;
        }
      }
      if (!moved) return t;
      if (t < 0 || ++guard > limit) throw std::runtime_error("delaunay: point location failed");
    }
  }

  void insert(int p) {
    const int t0 = locate(p);
    for (int k = 0; k < 3; ++k) {
      const auto& q = pts_[tris_[t0].v[k]];
      if (q.x == pts_[p].x && q.y == pts_[p].y) {
        throw std::invalid_argument("delaunay: duplicate input point");
      }
    }

    cavity_.clear();
    cavity_.push_back(t0);
    mark_tri(t0);
    for (std::size_t i = 0; i < cavity_.size(); ++i) {
      const Tri& T = tris_[cavity_[i]];
      for (int k = 0; k < 3; ++k) {
        const int n = T.nbr[k];
        if (n < 0 || in_cavity(n)) continue;
        const Tri& N = tris_[n];
        if (incircle(pts_[N.v[0]], pts_[N.v[1]], pts_[N.v[2]], pts_[p]) > 0) {
          cavity_.push_back(n);
          mark_tri(n);
        }
      }
    }

    // Grow the cavity across boundary edges that p sees edge-on (cocircular ties).
    for (bool grown = true; grown;) {
      grown = false;
      for (std::size_t i = 0; i < cavity_.size(); ++i) {
        const Tri& T = tris_[cavity_[i]];
        for (int k = 0; k < 3; ++k) {
          const int n = T.nbr[k];
          if (n >= 0 && in_cavity(n)) continue;
          const int a = T.v[(k + 1) % 3], b = T.v[(k + 2) % 3];
          if (orient(pts_[a], pts_[b], pts_[p]) <= 0) {
            if (n < 0) throw std::runtime_error("delaunay: point outside the super triangle");
            cavity_.push_back(n);
            mark_tri(n);
            grown = true;
          }
        }
      }
    }

    struct Edge {
      int a, b, outer;
    };
    std::vector<Edge> boundary;
    for (int t : cavity_) {
      const Tri& T = tris_[t];
      for (int k = 0; k < 3; ++k) {
        const int n = T.nbr[k];
        if (n >= 0 && in_cavity(n)) continue;
        boundary.push_back({T.v[(k + 1) % 3], T.v[(k + 2) % 3], n});
      }
    }
    for (int t : cavity_) {
      tris_[t].alive = false;
      free_.push_back(t);
    }
    ++stamp_;

    // new fan (a, b, p); link through vertex-keyed maps
    std::vector<int> created;
    created.reserve(boundary.size());
    for (const auto& e : boundary) {
      int id;
      if (!free_.empty()) {
        id = free_.back();
        free_.pop_back();
      } else {
        id = static_cast<int>(tris_.size());
        tris_.emplace_back();
      }
      Tri& T = tris_[id];
      T.v = {e.a, e.b, p};
      T.nbr = {-1, -1, e.outer};
      T.alive = true;
      if (e.outer >= 0) {
        Tri& O = tris_[e.outer];
        for (int k = 0; k < 3; ++k) {
          if (O.v[(k + 1) % 3] == e.b && O.v[(k + 2) % 3] == e.a) O.nbr[k] = id;
        }
      }
      if (start_of_.size() < pts_.size()) start_of_.resize(pts_.size(), -1);
      start_of_[e.a] = id;
      created.push_back(id);
    }
    for (int id : created) {
      Tri& T = tris_[id];
      T.nbr[0] = start_of_[T.v[1]];        // edge (b, p)
      tris_[T.nbr[0]].nbr[1] = id;         // that triangle's edge (p, b') opposite its b'
    }
    last_ = created.front();
  }

  void mark_tri(int t) {
    if (tri_mark_.size() < tris_.size()) tri_mark_.resize(tris_.size() + 1024, 0);
    tri_mark_[t] = stamp_;
  }
  bool in_cavity(int t) const { return t < static_cast<int>(tri_mark_.size()) && tri_mark_[t] == stamp_; }

  std::vector<IPoint> pts_;
  std::vector<Tri> tris_;
  std::vector<int> free_;
  std::vector<int> cavity_;
  std::vector<int> mark_;
  std::vector<int> start_of_;
  std::vector<std::uint64_t> tri_mark_;
  std::uint64_t stamp_ = 1;
  int last_ = 0;
};

} // namespace

std::vector<std::array<int, 3>> delaunay_triangulate(const std::vector<Vec2>& points) {
  if (points.size() < 3) return {};
  Vec2 lo = points.front(), hi = lo;
  for (const auto& p : points) {
    if (!p.allFinite()) throw std::invalid_argument("delaunay: non-finite point");
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double extent = std::max((hi - lo).maxCoeff(), 1e-300);
  const double scale = static_cast<double>(i64(1) << 26) / extent;
  std::vector<IPoint> ip;
  ip.reserve(points.size() + 3);
  for (const auto& p : points) {
    ip.push_back({std::llround((p[0] - lo[0]) * scale), std::llround((p[1] - lo[1]) * scale)});
  }
  Triangulator tr(std::move(ip));
  return tr.run(points.size());
}

} // namespace airy
