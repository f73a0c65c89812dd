#pragma once

#include <vector>

#include "micellar/potential.hpp"
#include "micellar/qgrid.hpp"

namespace micellar {

// Equilibrium density M = c * exp(-U) sampled on a QGrid, with cached square
// roots. For the normalized pair, M_A is stored as the nodewise square of M_B
// (and sqrt(M_A) as M_B itself) so that the detailed-balance identity
// k*M_A - k*M_B^2 = 0 holds to the last bit.
struct Maxwellian {
  Potential pot;
  double c = 1.0;
  std::vector<double> values;
  std::vector<double> sqrt_values;

  double mass(const QGrid& g) const { return qsum(g, values.data()); }

  // M = c*exp(-U) with an explicit constant (unnormalized probes use c = 1)
  static Maxwellian with_constant(const Potential& pot, const QGrid& g, double c);
};

struct MaxwellianPair {
  Maxwellian a, b;
};

// positive root of 2*I2*c^2 + I1*c - 1 = 0 (I1, I2 >= 0, not both 0)
double solve_normalization(double i1, double i2);

// Builds (M_A, M_B) with c_A = c_B^2 and quadrature of (2 M_A + M_B) = 1,
// where c_B solves the quadratic with I_k = \int exp(-k U_B) dq.
// For hookean potentials the boundary tail of exp(-U_B) must be < 1e-8 of the
// peak, otherwise a ResolutionError is thrown.
MaxwellianPair normalize_maxwellians(const Potential& pot_b, const QGrid& grid);

}  // namespace micellar
