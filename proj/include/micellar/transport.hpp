#pragma once

#include <vector>

#include "micellar/qgrid.hpp"
#include "micellar/spectral.hpp"
#include "micellar/xlattice.hpp"

namespace micellar {

// first-order conservative upwind advection of configuration densities in x,
// driven by spectrally interpolated face velocities that are projected to be
// divergence-free for the staggered difference (so constants advect exactly)
class Transport {
 public:
  explicit Transport(const SpectralWorkspace& sw, double cfl = 0.9);

  void faces_for(const VelocityField& u, std::vector<std::vector<double>>& faces) const;

  // psi <- psi - dt * div_x(uf psi); throws StepRejection past the cfl limit
  void advect_with_faces(DistributionField& psi, const std::vector<std::vector<double>>& faces,
                         double dt) const;

  // both species with one face computation; no-op when u == 0
  void advect(DistributionField& psi_a, DistributionField& psi_b, const VelocityField& u,
              double dt) const;

  // max-norm of the staggered divergence of a face-velocity set
  double staggered_divergence_max(const std::vector<std::vector<double>>& faces) const;

 private:
  const SpectralWorkspace* sw_;
  double cfl_;
};

// drift of the configuration density by the velocity field kappa q (kappa is
// the d_q x d_q velocity-gradient block, row-major): conservative upwind
// divergence with zero flux through the q-box boundary, so the q-quadrature of
// the tendency vanishes identically (mass-exact).
//   out = -div_q((kappa q) psi)
void qdrift_tendency(const QGrid& g, const double* kappa, const double* psi, double* out);

// largest face speed |kappa q| over interior faces, for step control
double qdrift_speed_max(const QGrid& g, const double* kappa);

// forward-Euler substep psi += dt * tendency; throws StepRejection on CFL
void qdrift_apply(const QGrid& g, const double* kappa, double dt, double* psi, double cfl = 0.9);

}  // namespace micellar
