#pragma once

#include <vector>

#include "micellar/maxwellian.hpp"
#include "micellar/spectral.hpp"
#include "micellar/xlattice.hpp"

namespace micellar {

struct FluidParams {
  double mu = 1.0;      // solvent viscosity
  double lambda = 1.0;  // polymer stress / entropy weight
  double cfl = 0.9;
};

// pseudo-spectral incompressible solver on the periodic lattice
class Fluid {
 public:
  Fluid(const SpectralWorkspace& sw, FluidParams p);

  // elastic stress tau_ab(x) = lambda * sum_species int (grad_q U) psi (x) q^T dq,
  // embedded in the top-left min(d_q, d_x) block of a d_x x d_x tensor.
  // tau[a*d_x + b] is one x-lattice scalar.
  void kramers_stress(const QGrid& qg, const Potential& pot_a, const Potential& pot_b,
                      const DistributionField& psi_a, const DistributionField& psi_b,
                      std::vector<std::vector<double>>& tau) const;

  // one step of  du/dt + u.grad u = mu lap u - grad p + div tau, div u = 0:
  // exact viscous integrating factor per mode, skew-symmetric advection with
  // dealiased products, divergence-free projection. CFL violation -> StepRejection.
  void step(VelocityField& u, const std::vector<std::vector<double>>& tau, double dt) const;

  // kappa[a*d_x + b] = du_a/dx_b (spectral derivative)
  void velocity_gradient(const VelocityField& u, std::vector<std::vector<double>>& kappa) const;

  double kinetic_energy(const VelocityField& u) const;
  double viscous_dissipation(const VelocityField& u) const;  // mu int |grad u|^2

  // max-norm divergence after projecting a spectrum (exported for checks)
  double divergence_max(const VelocityField& u) const;

  const FluidParams& params() const { return p_; }

 private:
  const SpectralWorkspace* sw_;
  FluidParams p_;
};

}  // namespace micellar
