#pragma once

#include <utility>
#include <vector>

#include "micellar/micromacro.hpp"

namespace micellar {

// Energy/dissipation bookkeeping for one state.  All integrals use the
// discrete quadrature of the simulator's grids, so the balance
//   (F_{n+1} - F_n)/dt + (D_n + D_{n+1})/2 ~= 0
// holds to the splitting order of the time integrator.
struct EnergyReport {
  double kinetic = 0.0;      // (1/2) int |u|^2 dx
  double free_energy = 0.0;  // lambda * sum_s int M_s phi((psi_s - M_s)/M_s)
  double total = 0.0;        // kinetic + free_energy
  double d_u = 0.0;          // mu int |grad u|^2 dx
  double d_micro = 0.0;      // configurational dissipation, face form, >= 0 bitwise
  double d_r = 0.0;          // reactive dissipation (a-b)log(a/b), >= 0 bitwise
  double residual = 0.0;     // filled by the time loop; 0 for a single state
};

// Hierarchy of hyper-dissipative norms.  s is the spatial differentiation
// order; eta in (0,1] weights mixed x/q derivatives.  e_total/d_total are the
// eta-weighted combinations
//   E^eta = E_x + eta*E_rho + eta*E_mix(eta) + eta^2*E_j
//   D^eta = D_x + eta*D_rho + eta*D_mix(eta) + eta^2*D_j
// and e_plain/d_plain the same combinations at eta = 1.  part_* splits the
// plain dissipation into its five non-negative contributions.
struct SobolevReport {
  int s = 0;
  double eta = 1.0;
  double e_x = 0.0, d_x = 0.0;      // |u|_{H^s}^2 + ||f||_{H^s_x L^2_q}^2 and its dissipation
  double e_rho = 0.0, d_rho = 0.0;  // |rho_A|_{H^s}^2 (shared)
  double e_j = 0.0, d_j = 0.0;      // first-moment layer at order s-1
  double e_mix = 0.0, d_mix = 0.0;  // eta-weighted mixed-derivative layers
  double e_total = 0.0, d_total = 0.0;
  double e_plain = 0.0, d_plain = 0.0;
  double part_fluid = 0.0;     // |grad u|_{H^s}^2
  double part_rho = 0.0;       // |rho_A|_{H^s}^2
  double part_fp = 0.0;        // all configurational Dirichlet forms, orders k+l <= s
  double part_moment = 0.0;    // q-weighted Dirichlet forms, orders k <= s-1
  double part_reaction = 0.0;  // reactive quadratic forms, orders k+l <= s
  bool equiv_upper = true;     // E^eta <= 2 E^1
  bool equiv_lower = true;     // E^1 <= eta^{-(s+1)} E^eta
};

class Diagnostics {
 public:
  explicit Diagnostics(const Simulator& sim) : sim_(sim) {}

  EnergyReport energy(const SimState& state) const;

  // Per-cell number-density deviations rho_s(x) = int (psi_s - M_s) dq.
  std::vector<double> rho_a(const SimState& state) const;
  std::vector<double> rho_b(const SimState& state) const;
  // max_x |2 rho_A(x) + rho_B(x)|; exactly conserved by every substep.
  double rho_constraint_max(const SimState& state) const;
  // |int (2 psi_A + psi_B) dq dx - V| / V with V the initial total mass.
  double mass_rel_err(const SimState& state, double mass0) const;

  SobolevReport sobolev(const SimState& state, int s) const;

  // Relative defect between the two quadrature orders of the drift-potential
  // pairing sum_x kappa : int (grad U q) f sqrt(M) dq.  Zero to roundoff for
  // the matched discretization; inject_mismatch offsets the moment arm by
  // half a cell in one factor, which a resolution study sees at O(dq).
  double cancellation_residual(const SimState& state, Species sp,
                               bool inject_mismatch = false) const;

 private:
  const Simulator& sim_;
};

// Least-squares slope of ln(values) vs ts over the trailing half of the
// samples.  Returns {rate, r_squared}; requires positive values there.
std::pair<double, double> fit_decay(const std::vector<double>& ts,
                                    const std::vector<double>& values);

}  // namespace micellar
