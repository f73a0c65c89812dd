#pragma once

#include <cstdint>

#include "micellar/maxwellian.hpp"

namespace micellar {

// Law-of-mass-action kinetics for the breakage/reforming pair A <-> 2B,
// r = k1 psi_A - k2 psi_B^2, entering as  d(psi_A)/dt = -r, d(psi_B)/dt = +2r.
struct ReactionParams {
  double k1 = 1.0;
  double k2 = 1.0;
  bool off() const { return k1 == 0.0 && k2 == 0.0; }
};

inline double lma_rate(double psi_a, double psi_b, const ReactionParams& p) {
  return p.k1 * psi_a - p.k2 * psi_b * psi_b;
}

// Linearized rates in fluctuation variables (requires k1 = k2 so K_eq = 1):
//   core = f_A - 2 sqrt(M_B) f_B - f_B^2
//   r_A = -k1 * core,  r_B = +2 k1 sqrt(M_B) * core
struct LinearizedRates {
  double r_a, r_b;
};
LinearizedRates linearized_rates(double fa, double fb, double sqrt_mb, const ReactionParams& p);

// pointwise dissipation integrand (a-b)ln(a/b) with a = k1 psi_A, b = k2 psi_B^2;
// evaluated as (hi-lo)*log1p((hi-lo)/lo) so it is nonnegative bitwise
double reaction_dissipation_node(double psi_a, double psi_b, const ReactionParams& p);

// quadrature of the integrand over one q-slice (multiply by lambda and x-weight upstream)
double reaction_dissipation(const QGrid& g, const double* psi_a, const double* psi_b,
                            const ReactionParams& p);

// One implicit-midpoint step of the pointwise reaction ODE, parameterized by a
// single increment delta: psi_A' = psi_A - delta, psi_B' = psi_B + 2 delta, so
// 2 psi_A + psi_B is invariant to rounding. Newton (analytic Jacobian) with a
// bisection fallback. If the full step would lose positivity: with the limiter
// step is halved recursively, otherwise a StepRejection is thrown.
struct ReactionNodeResult {
  double a, b;
};
ReactionNodeResult reaction_node_step(double a0, double b0, double dt, const ReactionParams& p,
                                      bool limiter, int depth = 0);

// vectorized over a raw range
void reaction_substep(double* psi_a, double* psi_b, std::int64_t n, double dt,
                      const ReactionParams& p, bool limiter);

// max-norm residual of the gradient-flow identity
//   ln(r/(k2 psi_B^2) + 1) == ln(k1 psi_A/(k2 psi_B^2))
// over a raw range of positive values; algebraically zero, so ~1e-15 always.
double verify_gradient_flow(const double* psi_a, const double* psi_b, std::int64_t n,
                            const ReactionParams& p);

}  // namespace micellar
