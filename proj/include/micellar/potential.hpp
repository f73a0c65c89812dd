#pragma once

#include <array>
#include <string>

namespace micellar {

enum class PotentialKind { hookean, fene };
enum class Species { A, B };

// Spring potential U(q) on R^d, d in {1,2}.
//   hookean: U = (H/2)|q|^2
//   fene:    U = -k ln(1 - |q|^2/b0^2), finite only for |q| < b0
// A simulation pair always satisfies U_A = 2 U_B (hookean: H_A = 2 H_B;
// fene: k_A = 2 k_B, shared b0), which pins K_eq = 1.
class Potential {
 public:
  static Potential hookean(int dim, double stiffness, Species sp = Species::B);
  static Potential fene(int dim, double strength, double b0, Species sp = Species::B);

  // the doubled-energy partner A of a species-B potential
  Potential partner_a() const;

  double value(const double* q) const;
  void gradient(const double* q, double* out) const;

  PotentialKind kind() const { return kind_; }
  int dim() const { return dim_; }
  Species species() const { return species_; }
  double stiffness() const { return stiff_; }  // H (hookean) or k (fene)
  double b0() const { return b0_; }            // fene only
  // tensor grids work per axis only for separable potentials
  bool separable() const { return kind_ == PotentialKind::hookean || dim_ == 1; }
  std::string describe() const;

 private:
  Potential() = default;
  PotentialKind kind_ = PotentialKind::hookean;
  int dim_ = 1;
  double stiff_ = 1.0;
  double b0_ = 0.0;
  Species species_ = Species::B;
};

}  // namespace micellar
