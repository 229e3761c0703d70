#include "airy/defects.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace airy {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt_point(const Vec2& p) {
  std::ostringstream os;
  os << "(" << p[0] << ", " << p[1] << ")";
  return os.str();
}

void require_off_origin(const Vec2& x, const char* what) {
  if (x.squaredNorm() == 0.0) {
    throw std::domain_error(std::string(what) + " jet is undefined at the defect point");
  }
}

} // namespace

DefectConfiguration::DefectConfiguration(std::vector<Defect> defects)
    : defects_(std::move(defects)) {}

DefectConfiguration& DefectConfiguration::add(const Dislocation& d) {
  defects_.emplace_back(d);
  return *this;
}

DefectConfiguration& DefectConfiguration::add(const Disclination& d) {
  defects_.emplace_back(d);
  return *this;
}

std::vector<Dislocation> DefectConfiguration::dislocations() const {
  std::vector<Dislocation> out;
  for (const auto& d : defects_) {
    if (const auto* p = std::get_if<Dislocation>(&d)) out.push_back(*p);
  }
  return out;
}

std::vector<Disclination> DefectConfiguration::disclinations() const {
  std::vector<Disclination> out;
  for (const auto& d : defects_) {
    if (const auto* p = std::get_if<Disclination>(&d)) out.push_back(*p);
  }
  return out;
}

Vec2 defect_position(const Defect& d) {
  return std::visit([](const auto& x) { return x.position; }, d);
}

void DefectConfiguration::validate() const {
  for (std::size_t i = 0; i < defects_.size(); ++i) {
    const Defect& d = defects_[i];
    if (const auto* disl = std::get_if<Dislocation>(&d)) {
      if (!(disl->burgers.norm() > 0.0) || !disl->burgers.allFinite()) {
        throw ValidationError("defect " + std::to_string(i) + ": Burgers vector must be nonzero and finite");
      }
    } else {
      const auto& disc = std::get<Disclination>(d);
      if (disc.frank_angle == 0.0 || !std::isfinite(disc.frank_angle)) {
        throw ValidationError("defect " + std::to_string(i) + ": Frank angle must be nonzero and finite");
      }
    }
    if (!defect_position(d).allFinite()) {
      throw ValidationError("defect " + std::to_string(i) + ": position is not finite");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (defect_position(defects_[j]) == defect_position(d)) {
        throw ValidationError("defects " + std::to_string(j) + " and " + std::to_string(i) +
                              " share position " + fmt_point(defect_position(d)) +
                              "; defect supports must be disjoint");
      }
    }
  }
}

Vec2 DefectConfiguration::total_burgers() const {
  Vec2 sum = Vec2::Zero();
  for (const auto& d : dislocations()) sum += d.burgers;
  return sum;
}

double DefectConfiguration::total_frank() const {
  double sum = 0.0;
  for (const auto& d : disclinations()) sum += d.frank_angle;
  return sum;
}

DefectConfiguration DefectConfiguration::translated(const Vec2& shift) const {
  DefectConfiguration out = *this;
  for (auto& d : out.defects_) {
    std::visit([&](auto& x) { x.position += shift; }, d);
  }
  return out;
}

DefectConfiguration DefectConfiguration::negated() const {
  DefectConfiguration out = *this;
  for (auto& d : out.defects_) {
    if (auto* p = std::get_if<Dislocation>(&d)) {
      p->burgers = -p->burgers;
    } else {
      auto& q = std::get<Disclination>(d);
      q.frank_angle = -q.frank_angle;
    }
  }
  return out;
}

std::vector<ExtendedDefect> extend_defects(const DefectConfiguration& cfg) {
  cfg.validate();
  std::vector<ExtendedDefect> out;
  out.reserve(cfg.size());
  for (const auto& d : cfg.defects()) {
    ExtendedDefect e;
    if (const auto* p = std::get_if<Dislocation>(&d)) {
      e.position = p->position;
      e.burgers = p->burgers;
    } else {
      const auto& q = std::get<Disclination>(d);
      e.position = q.position;
      e.frank = q.frank_angle;
    }
    out.push_back(e);
  }
  return out;
}

ScalarJet3& ScalarJet3::operator+=(const ScalarJet3& o) {
  value += o.value;
  gradient += o.gradient;
  hessian += o.hessian;
  grad_laplacian += o.grad_laplacian;
  return *this;
}

ScalarJet3& ScalarJet3::operator*=(double s) {
  value *= s;
  gradient *= s;
  hessian *= s;
  grad_laplacian *= s;
  return *this;
}

// f = r^2 L with L = log r^2:
//   grad f = 2x (L + 1),  f_ij = 2(L + 1) delta_ij + 4 x_i x_j / r^2,
//   lap f = 4L + 8,  grad lap f = 8x / r^2.
ScalarJet3 eval_v_d(const Vec2& x, const MaterialParams& mat) {
  require_off_origin(x, "v_d");
  const double c = mat.plane_strain_modulus() / (16.0 * kPi);
  const double r2 = x.squaredNorm();
  const double L = std::log(r2);
  ScalarJet3 j;
  j.value = c * r2 * L;
  j.gradient = c * 2.0 * (L + 1.0) * x;
  j.hessian = {c * (2.0 * (L + 1.0) + 4.0 * x[0] * x[0] / r2), c * 4.0 * x[0] * x[1] / r2,
               c * (2.0 * (L + 1.0) + 4.0 * x[1] * x[1] / r2)};
  j.grad_laplacian = c * 8.0 / r2 * x;
  return j;
}

double v_d_value(const Vec2& x, const MaterialParams& mat) noexcept {
  const double r2 = x.squaredNorm();
  if (r2 == 0.0) return 0.0;
  return mat.plane_strain_modulus() / (16.0 * kPi) * r2 * std::log(r2);
}

// g_k = x_k (L + 1):
//   d_i g_k = delta_ik (L + 1) + 2 x_k x_i / r^2
//   d_ij g_k = 2(delta_ik x_j + delta_jk x_i)/r^2 + 2 x_k (delta_ij/r^2 - 2 x_i x_j/r^4)
//   lap g_k = 4 x_k / r^2,  d_i lap g_k = 4 (delta_ik / r^2 - 2 x_k x_i / r^4)
std::array<ScalarJet3, 2> eval_v_D(const Vec2& x, const MaterialParams& mat) {
  require_off_origin(x, "v_D");
  const double c = mat.plane_strain_modulus() / (8.0 * kPi);
  const double r2 = x.squaredNorm();
  const double r4 = r2 * r2;
  const double L = std::log(r2);
  std::array<ScalarJet3, 2> out;
  for (int k = 0; k < 2; ++k) {
    auto delta = [](int a, int b) { return a == b ? 1.0 : 0.0; };
    auto d2 = [&](int i, int j) {
      return 2.0 * (delta(i, k) * x[j] + delta(j, k) * x[i]) / r2 +
             2.0 * x[k] * (delta(i, j) / r2 - 2.0 * x[i] * x[j] / r4);
    };
    ScalarJet3& j = out[k];
    j.value = c * x[k] * (L + 1.0);
    for (int i = 0; i < 2; ++i) {
      j.gradient[i] = c * (delta(i, k) * (L + 1.0) + 2.0 * x[k] * x[i] / r2);
      j.grad_laplacian[i] = c * 4.0 * (delta(i, k) / r2 - 2.0 * x[k] * x[i] / r4);
    }
    j.hessian = {c * d2(0, 0), c * d2(0, 1), c * d2(1, 1)};
  }
  return out;
}

Vec2 v_D_value(const Vec2& x, const MaterialParams& mat) noexcept {
  const double r2 = x.squaredNorm();
  if (r2 == 0.0) return Vec2::Zero();
  return mat.plane_strain_modulus() / (8.0 * kPi) * (std::log(r2) + 1.0) * x;
}

ScalarJet3 eval_plastic_potential(const Vec2& x, const DefectConfiguration& cfg,
                                  const MaterialParams& mat) {
  ScalarJet3 sum;
  for (const auto& d : cfg.defects()) {
    const Vec2 rel = x - defect_position(d);
    if (rel.norm() < kDefectExclusionRadius) {
      throw std::domain_error("plastic potential evaluated within the exclusion radius of defect at " +
                              fmt_point(defect_position(d)));
    }
    if (const auto* p = std::get_if<Dislocation>(&d)) {
      // -b x v_D = -(b1 v_D2 - b2 v_D1)
      const auto jD = eval_v_D(rel, mat);
      sum += (-p->burgers[0]) * jD[1];
      sum += p->burgers[1] * jD[0];
    } else {
      const auto& q = std::get<Disclination>(d);
      sum += (-q.frank_angle) * eval_v_d(rel, mat);
    }
  }
  return sum;
}

ScalarJet3 eval_plastic_potential(const Vec2& x, const std::vector<ExtendedDefect>& defects,
                                  const MaterialParams& mat) {
  ScalarJet3 sum;
  for (const auto& d : defects) {
    const Vec2 rel = x - d.position;
    if (rel.norm() < kDefectExclusionRadius) {
      throw std::domain_error("plastic potential evaluated within the exclusion radius of defect at " +
                              fmt_point(d.position));
    }
    if (d.burgers[0] != 0.0 || d.burgers[1] != 0.0) {
      const auto jD = eval_v_D(rel, mat);
      sum += (-d.burgers[0]) * jD[1];
      sum += d.burgers[1] * jD[0];
    }
    if (d.frank != 0.0) sum += (-d.frank) * eval_v_d(rel, mat);
  }
  return sum;
}

PlasticFields plastic_stress_strain(const Vec2& x, const std::vector<ExtendedDefect>& defects,
                                    const MaterialParams& mat) {
  const ScalarJet3 j = eval_plastic_potential(x, defects, mat);
  PlasticFields f;
  f.stress = airy_stress(j.hessian);
  f.strain = constitutive_strain(f.stress, mat);
  return f;
}

PlasticFields plastic_stress_strain(const Vec2& x, const DefectConfiguration& cfg,
                                    const MaterialParams& mat) {
  const ScalarJet3 j = eval_plastic_potential(x, cfg, mat);
  PlasticFields f;
  f.stress = airy_stress(j.hessian);
  f.strain = constitutive_strain(f.stress, mat);
  return f;
}

double core_radius_bound(const DefectConfiguration& cfg, const OuterBoundary& outer) {
  if (cfg.empty()) throw ValidationError("core radius bound needs at least one defect");
  double pair = std::numeric_limits<double>::infinity();
  double wall = std::numeric_limits<double>::infinity();
  const auto& ds = cfg.defects();
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const Vec2 p = defect_position(ds[i]);
    if (!outer.contains(p) || outer.distance_to_boundary(p) == 0.0) {
      throw ValidationError("defect " + std::to_string(i) + " at " + fmt_point(p) +
                            " is not strictly inside the outer boundary");
    }
    wall = std::min(wall, outer.distance_to_boundary(p));
    for (std::size_t j = 0; j < i; ++j) {
      pair = std::min(pair, 0.5 * (p - defect_position(ds[j])).norm());
    }
  }
  return std::min(pair, wall);
}

} // namespace airy
