#include "micellar/potential.hpp"

#include <cmath>

#include "micellar/common.hpp"

namespace micellar {

Potential Potential::hookean(int dim, double stiffness, Species sp) {
  if (dim < 1 || dim > 2) throw ConfigError("potential dimension must be 1 or 2");
  if (!(stiffness > 0.0)) throw ConfigError("hookean stiffness must be positive");
  Potential p;
  p.kind_ = PotentialKind::hookean;
  p.dim_ = dim;
  p.stiff_ = stiffness;
  p.species_ = sp;
  return p;
}

Potential Potential::fene(int dim, double strength, double b0, Species sp) {
  if (dim < 1 || dim > 2) throw ConfigError("potential dimension must be 1 or 2");
  if (!(strength > 0.0) || !(b0 > 0.0)) throw ConfigError("fene needs k > 0 and b0 > 0");
  Potential p;
  p.kind_ = PotentialKind::fene;
  p.dim_ = dim;
  p.stiff_ = strength;
  p.b0_ = b0;
  p.species_ = sp;
  return p;
}

Potential Potential::partner_a() const {
  Potential p = *this;
  p.stiff_ = 2.0 * stiff_;
  p.species_ = Species::A;
  return p;
}

double Potential::value(const double* q) const {
  double r2 = q[0] * q[0];
  if (dim_ == 2) r2 += q[1] * q[1];
  if (kind_ == PotentialKind::hookean) return 0.5 * stiff_ * r2;
  const double arg = 1.0 - r2 / (b0_ * b0_);
  if (!(arg > 0.0)) throw InvariantError("fene potential evaluated at |q| >= b0");
  return -stiff_ * std::log(arg);
}

void Potential::gradient(const double* q, double* out) const {
  if (kind_ == PotentialKind::hookean) {
    for (int a = 0; a < dim_; ++a) out[a] = stiff_ * q[a];
    return;
  }
  double r2 = q[0] * q[0];
  if (dim_ == 2) r2 += q[1] * q[1];
  const double arg = 1.0 - r2 / (b0_ * b0_);
  if (!(arg > 0.0)) throw InvariantError("fene gradient evaluated at |q| >= b0");
  const double fac = 2.0 * stiff_ / (b0_ * b0_ * arg);
  for (int a = 0; a < dim_; ++a) out[a] = fac * q[a];
}

std::string Potential::describe() const {
  if (kind_ == PotentialKind::hookean)
    return "hookean(H=" + std::to_string(stiff_) + ", d=" + std::to_string(dim_) + ")";
  return "fene(k=" + std::to_string(stiff_) + ", b0=" + std::to_string(b0_) +
         ", d=" + std::to_string(dim_) + ")";
}

}  // namespace micellar
