#include "airy/elasticity.hpp"

#include <sstream>

namespace airy {

MaterialParams::MaterialParams(double young_modulus, double poisson_ratio)
    : young_(young_modulus), poisson_(poisson_ratio) {
  if (!(young_modulus > 0.0) || !std::isfinite(young_modulus)) {
    std::ostringstream msg;
    msg << "young_modulus must be positive and finite, got " << young_modulus;
    throw ValidationError(msg.str());
  }
  if (!(poisson_ratio > -1.0 && poisson_ratio < 0.5)) {
    std::ostringstream msg;
    msg << "poisson_ratio must lie strictly inside (-1, 1/2), got " << poisson_ratio;
    throw ValidationError(msg.str());
  }
}

SymTensor2 cofactor(const SymTensor2& m) noexcept { return {m.t22, -m.t12, m.t11}; }

SymTensor2 constitutive_stress(const SymTensor2& eps, const MaterialParams& mat) noexcept {
  const double E = mat.young_modulus();
  const double nu = mat.poisson_ratio();
  const double a = E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
  const double b = E * (1.0 - nu) / ((1.0 + nu) * (1.0 - 2.0 * nu));
  return a * cofactor(eps) + b * eps;
}

SymTensor2 constitutive_strain(const SymTensor2& sigma, const MaterialParams& mat) noexcept {
  const double E = mat.young_modulus();
  const double nu = mat.poisson_ratio();
  return ((1.0 - nu * nu) / E) * sigma - (nu * (1.0 + nu) / E) * cofactor(sigma);
}

double out_of_plane_stress(const SymTensor2& sigma, const MaterialParams& mat) noexcept {
  return mat.poisson_ratio() * sigma.trace();
}

PlaneStrainStress plane_strain_stress(const SymTensor2& eps, const MaterialParams& mat) noexcept {
  PlaneStrainStress out;
  out.in_plane = constitutive_stress(eps, mat);
  out.sigma33 = out_of_plane_stress(out.in_plane, mat);
  return out;
}

SymTensor2 airy_stress(const SymTensor2& hessian) noexcept { return cofactor(hessian); }

double energy_density_from_stress(const SymTensor2& sigma, const MaterialParams& mat) noexcept {
  const double nu = mat.poisson_ratio();
  const double tr = sigma.trace();
  return 0.5 * (1.0 + nu) / mat.young_modulus() * (sigma.norm2() - nu * tr * tr);
}

double energy_density_from_hessian(const SymTensor2& hessian, const MaterialParams& mat) noexcept {
  const double nu = mat.poisson_ratio();
  const double lap = hessian.trace();
  return 0.5 * (1.0 + nu) / mat.young_modulus() * (hessian.norm2() - nu * lap * lap);
}

double monge_ampere_bracket(const SymTensor2& h_xi, const SymTensor2& h_eta) noexcept {
  return contract(cofactor(h_xi), h_eta);
}

} // namespace airy
