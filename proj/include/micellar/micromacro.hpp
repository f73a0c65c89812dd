#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "micellar/fluid.hpp"
#include "micellar/fokker_planck.hpp"
#include "micellar/maxwellian.hpp"
#include "micellar/reaction.hpp"
#include "micellar/spectral.hpp"
#include "micellar/transport.hpp"
#include "micellar/xlattice.hpp"

namespace micellar {

struct SimConfig {
  int d_x = 1;
  int d_q = 1;
  int n_x = 16;
  int n_q = 64;
  double box_length = 6.283185307179586476925286766559;  // 2 pi
  double q_radius = 0.0;                                 // 0 = potential default
  PotentialKind potential_kind = PotentialKind::hookean;
  double h_b = 1.0;      // hookean stiffness of the short species
  double fene_k = 1.0;   // fene strength
  double fene_b0 = 5.0;  // fene max extension
  double mu = 1.0;
  double lambda = 1.0;
  double k1 = 1.0;
  double k2 = 1.0;
  double dt = 0.0;  // 0 = automatic
  double t_end = 1.0;
  int scheme_order = 2;
  std::string scenario = "equilibrium";
  double amplitude = 1e-2;
  double eta = 0.1;
  int sobolev_s_max = 2;
  int cadence = 1;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  bool limiter = false;
  bool snapshots = false;

  void validate() const;  // throws ConfigError on any inconsistency
};

struct SimState {
  SimState(const XLattice& x, const QGrid& q) : u(x), psi_a(x, q), psi_b(x, q) {}
  double t = 0.0;
  VelocityField u;
  DistributionField psi_a, psi_b;
};

// owns the discretization and advances the coupled system
class Simulator {
 public:
  explicit Simulator(const SimConfig& cfg);

  const SimConfig& config() const { return cfg_; }
  const XLattice& lattice() const { return x_; }
  const QGrid& qgrid() const { return q_; }
  const MaxwellianPair& maxwellians() const { return m_; }
  const FokkerPlanckOperator& fp_a() const { return *fp_a_; }
  const FokkerPlanckOperator& fp_b() const { return *fp_b_; }
  const SpectralWorkspace& spectral() const { return *sw_; }
  const Fluid& fluid() const { return *fluid_; }
  ReactionParams reaction() const { return {cfg_.k1, cfg_.k2}; }

  SimState make_equilibrium() const;
  SimState init_scenario() const;  // cfg_.scenario by name

  // configuration step (reaction/transport/drift/diffusion) using state.u,
  // then stress from the updated densities, then the fluid step
  void step(SimState& s, double dt) const;

  // the configuration half only, per the scheme order
  void smoluchowski_step(SimState& s, double dt) const;

  // q-drift over dt for both species, from the velocity gradient of s.u;
  // requires trace(grad u) = 0 per x node
  void drift(SimState& s, double dt) const;

  double default_dt(const SimState& s) const;

  void encode(const DistributionField& psi, Species sp, DistributionField& f) const;
  void decode(const DistributionField& f, Species sp, DistributionField& psi) const;

  double total_mass(const SimState& s) const;  // int (2 psi_A + psi_B)
  double min_density(const SimState& s) const;
  void check_positive(const SimState& s) const;

 private:
  SimConfig cfg_;
  XLattice x_;
  QGrid q_;
  MaxwellianPair m_;
  std::unique_ptr<FokkerPlanckOperator> fp_a_, fp_b_;
  std::unique_ptr<SpectralWorkspace> sw_;
  std::unique_ptr<Fluid> fluid_;
  std::unique_ptr<Transport> transport_;

  static XLattice build_lattice(const SimConfig& cfg);
  static QGrid build_qgrid(const SimConfig& cfg);
  Potential potential_b() const;
  void reaction_substep_field(SimState& s, double dt) const;
  void fp_substep(SimState& s, double dt) const;
};

}  // namespace micellar
