#include "micellar/micromacro.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <random>
#include <string>

#include "micellar/common.hpp"

namespace micellar {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

void SimConfig::validate() const {
  if (d_x != 1 && d_x != 2) throw ConfigError("d_x must be 1 or 2");
  if (d_q != 1 && d_q != 2) throw ConfigError("d_q must be 1 or 2");
  if (d_x == 2 && d_q != 2)
    throw ConfigError("d_x = 2 requires d_q = 2 (velocity gradient acts on q)");
  if (n_x < 4) throw ConfigError("n_x must be at least 4");
  if (n_q < 4) throw ConfigError("n_q must be at least 4");
  if (!(box_length > 0.0)) throw ConfigError("box_length must be positive");
  if (q_radius < 0.0) throw ConfigError("q_radius must be nonnegative");
  if (potential_kind == PotentialKind::hookean) {
    if (!(h_b > 0.0)) throw ConfigError("potential.h_b must be positive");
  } else {
    if (!(fene_k > 0.0) || !(fene_b0 > 0.0))
      throw ConfigError("potential.k and potential.b0 must be positive");
  }
  if (!(mu > 0.0)) throw ConfigError("mu must be positive");
  if (lambda < 0.0) throw ConfigError("lambda must be nonnegative");
  if (k1 < 0.0 || k2 < 0.0) throw ConfigError("reaction rates must be nonnegative");
  if (dt < 0.0) throw ConfigError("dt must be positive (or omitted for automatic)");
  if (!(t_end > 0.0)) throw ConfigError("t_end must be positive");
  if (scheme_order != 1 && scheme_order != 2) throw ConfigError("scheme_order must be 1 or 2");
  if (amplitude < 0.0) throw ConfigError("amplitude must be nonnegative");
  if (!(eta > 0.0) || eta > 1.0) throw ConfigError("eta must lie in (0, 1]");
  if (sobolev_s_max < 0 || sobolev_s_max > 2) throw ConfigError("sobolev_s_max must be 0, 1, or 2");
  if (cadence < 1) throw ConfigError("cadence must be at least 1");
  const bool known = scenario == "equilibrium" || scenario == "kernel-bump" ||
                     scenario == "shear" || scenario == "taylor-green" ||
                     scenario == "random-smooth";
  if (!known) throw ConfigError("unknown scenario: " + scenario);
  if ((scenario == "shear" || scenario == "taylor-green") && d_x != 2)
    throw ConfigError("scenario " + scenario + " requires d_x = 2");
}

XLattice Simulator::build_lattice(const SimConfig& cfg) {
  return XLattice(cfg.d_x, cfg.n_x, cfg.box_length);
}

Potential Simulator::potential_b() const {
  if (cfg_.potential_kind == PotentialKind::hookean)
    return Potential::hookean(cfg_.d_q, cfg_.h_b);
  return Potential::fene(cfg_.d_q, cfg_.fene_k, cfg_.fene_b0);
}

QGrid Simulator::build_qgrid(const SimConfig& cfg) {
  Potential pb = cfg.potential_kind == PotentialKind::hookean
                     ? Potential::hookean(cfg.d_q, cfg.h_b)
                     : Potential::fene(cfg.d_q, cfg.fene_k, cfg.fene_b0);
  return QGrid::for_potential(pb, cfg.n_q, cfg.q_radius);
}

Simulator::Simulator(const SimConfig& cfg)
    : cfg_(cfg),
      x_((cfg.validate(), build_lattice(cfg))),
      q_(build_qgrid(cfg)),
      m_(normalize_maxwellians(potential_b(), q_)) {
  fp_a_ = std::make_unique<FokkerPlanckOperator>(q_, m_.a);
  fp_b_ = std::make_unique<FokkerPlanckOperator>(q_, m_.b);
  sw_ = std::make_unique<SpectralWorkspace>(x_);
  fluid_ = std::make_unique<Fluid>(*sw_, FluidParams{cfg_.mu, cfg_.lambda, 0.9});
  transport_ = std::make_unique<Transport>(*sw_);
}

SimState Simulator::make_equilibrium() const {
  SimState s(x_, q_);
  const std::int64_t nq = q_.size();
  parallel_for(x_.size(), [&](std::int64_t ix) {
    double* pa = s.psi_a.slice(ix);
    double* pb = s.psi_b.slice(ix);
    for (std::int64_t i = 0; i < nq; ++i) {
      pa[i] = m_.a.values[i];
      pb[i] = m_.b.values[i];
    }
  });
  return s;
}

SimState Simulator::init_scenario() const {
  const std::string& name = cfg_.scenario;
  const double eps = cfg_.amplitude;
  const double L = x_.length();
  const std::int64_t nq = q_.size();
  const double ma = m_.a.mass(q_);
  const double mb = m_.b.mass(q_);

  SimState s = make_equilibrium();
  if (name == "equilibrium" || eps == 0.0) return s;

  auto coord0 = [&](std::int64_t ix) {
    return x_.dim() == 1 ? x_.coord(static_cast<int>(ix))
                         : x_.coord(static_cast<int>(ix / x_.n()));
  };
  auto coord1 = [&](std::int64_t ix) { return x_.coord(static_cast<int>(ix % x_.n())); };

  if (name == "kernel-bump") {
    // f_B = eps cos(2 pi x1 / L) sqrt(M_B); f_A chosen so 2 rho_A + rho_B = 0
    for (std::int64_t ix = 0; ix < x_.size(); ++ix) {
      const double c = std::cos(kTwoPi * coord0(ix) / L);
      const double gb = eps * c;
      const double ga = -eps * c * mb / (2.0 * ma);
      double* pa = s.psi_a.slice(ix);
      double* pb = s.psi_b.slice(ix);
      for (std::int64_t i = 0; i < nq; ++i) {
        pa[i] = m_.a.values[i] * (1.0 + ga);
        pb[i] = m_.b.values[i] * (1.0 + gb);
      }
    }
  } else if (name == "shear") {
    for (std::int64_t ix = 0; ix < x_.size(); ++ix)
      s.u.comp[0][ix] = eps * std::sin(kTwoPi * coord1(ix) / L);
    std::vector<std::vector<std::complex<double>>> uhat(
        2, std::vector<std::complex<double>>(x_.size()));
    for (int a = 0; a < 2; ++a) sw_->to_spectrum(s.u.comp[a].data(), uhat[a].data());
    sw_->leray(uhat);
    for (int a = 0; a < 2; ++a) sw_->to_field(uhat[a].data(), s.u.comp[a].data());
  } else if (name == "taylor-green") {
    for (std::int64_t ix = 0; ix < x_.size(); ++ix) {
      const double p0 = kTwoPi * coord0(ix) / L;
      const double p1 = kTwoPi * coord1(ix) / L;
      s.u.comp[0][ix] = eps * std::sin(p0) * std::cos(p1);
      s.u.comp[1][ix] = -eps * std::cos(p0) * std::sin(p1);
    }
  } else if (name == "random-smooth") {
    std::mt19937_64 rng(cfg_.seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);

    // band-limited x-profile, |mode| <= 2 per axis
    std::vector<double> g(x_.size(), 0.0);
    const int d = x_.dim();
    for (int m0 = 0; m0 <= 2; ++m0)
      for (int m1 = (d == 2 ? -2 : 0); m1 <= (d == 2 ? 2 : 0); ++m1) {
        if (m0 == 0 && m1 <= 0) continue;  // one representative per conjugate pair
        const double ac = unif(rng), as = unif(rng);
        for (std::int64_t ix = 0; ix < x_.size(); ++ix) {
          const double ph =
              kTwoPi * (m0 * coord0(ix) + (d == 2 ? m1 * coord1(ix) : 0.0)) / L;
          g[ix] += ac * std::cos(ph) + as * std::sin(ph);
        }
      }
    double gmax = 0.0;
    for (double v : g) gmax = std::max(gmax, std::abs(v));
    if (gmax > 0.0)
      for (double& v : g) v /= gmax;

    // smooth q-profile, normalized to max 1
    std::vector<double> phi(nq, 1.0);
    {
      std::vector<double> c1(q_.dim()), c2(q_.dim());
      for (int a = 0; a < q_.dim(); ++a) {
        c1[a] = 0.3 * unif(rng);
        c2[a] = 0.3 * unif(rng);
      }
      std::vector<double> node(q_.dim());
      for (std::int64_t i = 0; i < nq; ++i) {
        q_.node(static_cast<int>(i), node.data());
        double v = 1.0;
        for (int a = 0; a < q_.dim(); ++a) {
          const double r = node[a] / q_.half_width(a);
          v += c1[a] * r + c2[a] * r * r;
        }
        phi[i] = v;
      }
      double pmax = 0.0;
      for (double v : phi) pmax = std::max(pmax, std::abs(v));
      for (double& v : phi) v /= pmax;
    }
    double j = 0.0;  // int phi M_B dq
    for (std::int64_t i = 0; i < nq; ++i) j += phi[i] * m_.b.values[i];
    j *= q_.weight();

    for (std::int64_t ix = 0; ix < x_.size(); ++ix) {
      const double gb = eps * g[ix];
      const double ga = -eps * g[ix] * j / (2.0 * ma);
      double* pa = s.psi_a.slice(ix);
      double* pb = s.psi_b.slice(ix);
      for (std::int64_t i = 0; i < nq; ++i) {
        pa[i] = m_.a.values[i] * (1.0 + ga);
        pb[i] = m_.b.values[i] * (1.0 + gb * phi[i]);
      }
    }

    if (d == 2) {
      std::vector<std::vector<std::complex<double>>> uhat(
          2, std::vector<std::complex<double>>(x_.size()));
      std::vector<double> tmp(x_.size());
      for (int a = 0; a < 2; ++a) {
        for (std::int64_t ix = 0; ix < x_.size(); ++ix) tmp[ix] = 0.0;
        for (int m0 = 0; m0 <= 2; ++m0)
          for (int m1 = -2; m1 <= 2; ++m1) {
            if (m0 == 0 && m1 <= 0) continue;
            const double ac = unif(rng), as = unif(rng);
            for (std::int64_t ix = 0; ix < x_.size(); ++ix) {
              const double ph = kTwoPi * (m0 * coord0(ix) + m1 * coord1(ix)) / L;
              tmp[ix] += ac * std::cos(ph) + as * std::sin(ph);
            }
          }
        sw_->to_spectrum(tmp.data(), uhat[a].data());
      }
      sw_->leray(uhat);
      for (int a = 0; a < 2; ++a) sw_->to_field(uhat[a].data(), s.u.comp[a].data());
      double umax = s.u.max_abs();
      if (umax > 0.0)
        for (auto& c : s.u.comp)
          for (double& v : c) v *= eps / umax;
    }
  }

  const double mn = min_density(s);
  if (!(mn > 0.0))
    throw ConfigError("amplitude too large: initial density reaches " + std::to_string(mn));
  return s;
}

void Simulator::reaction_substep_field(SimState& s, double dt) const {
  reaction_substep(s.psi_a.data.data(), s.psi_b.data.data(),
                   static_cast<std::int64_t>(s.psi_a.data.size()), dt, reaction(),
                   cfg_.limiter);
}

void Simulator::fp_substep(SimState& s, double dt) const {
  parallel_for(x_.size(), [&](std::int64_t ix) {
    fp_a_->advance_density(s.psi_a.slice(ix), dt, cfg_.scheme_order);
    fp_b_->advance_density(s.psi_b.slice(ix), dt, cfg_.scheme_order);
  });
}

void Simulator::drift(SimState& s, double dt) const {
  if (s.u.is_zero()) return;
  std::vector<std::vector<double>> kappa;
  fluid_->velocity_gradient(s.u, kappa);
  const int dx = x_.dim();
  const int dq = q_.dim();
  const int db = std::min(dx, dq);

  double kmax = 0.0;
  for (const auto& comp : kappa)
    for (double v : comp) kmax = std::max(kmax, std::abs(v));
  for (std::int64_t ix = 0; ix < x_.size(); ++ix) {
    double tr = 0.0;
    for (int a = 0; a < dx; ++a) tr += kappa[a * dx + a][ix];
    if (std::abs(tr) > 1e-10 * std::max(1.0, kmax))
      throw InvariantError("velocity gradient has nonzero trace (flow not incompressible)");
  }

  parallel_for(x_.size(), [&](std::int64_t ix) {
    std::vector<double> kq(static_cast<std::size_t>(dq) * dq, 0.0);
    for (int a = 0; a < db; ++a)
      for (int b = 0; b < db; ++b) kq[a * dq + b] = kappa[a * dx + b][ix];
    qdrift_apply(q_, kq.data(), dt, s.psi_a.slice(ix));
    qdrift_apply(q_, kq.data(), dt, s.psi_b.slice(ix));
  });
}

void Simulator::smoluchowski_step(SimState& s, double dt) const {
  if (cfg_.scheme_order == 2) {
    reaction_substep_field(s, 0.5 * dt);
    transport_->advect(s.psi_a, s.psi_b, s.u, dt);
    drift(s, dt);
    fp_substep(s, dt);
    reaction_substep_field(s, 0.5 * dt);
  } else {
    reaction_substep_field(s, dt);
    transport_->advect(s.psi_a, s.psi_b, s.u, dt);
    drift(s, dt);
    fp_substep(s, dt);
  }
}

void Simulator::step(SimState& s, double dt) const {
  smoluchowski_step(s, dt);
  if (x_.dim() == 2) {
    std::vector<std::vector<double>> tau;
    fluid_->kramers_stress(q_, m_.a.pot, m_.b.pot, s.psi_a, s.psi_b, tau);
    fluid_->step(s.u, tau, dt);
  }
  s.t += dt;
  check_positive(s);
}

double Simulator::default_dt(const SimState& s) const {
  double dt = 0.5;
  const double umax = s.u.max_abs();
  if (umax > 0.0) dt = std::min(dt, 0.4 * x_.spacing() / umax);
  if (x_.dim() == 2 && umax > 0.0) {
    std::vector<std::vector<double>> kappa;
    fluid_->velocity_gradient(s.u, kappa);
    double kmax = 0.0;
    for (const auto& comp : kappa)
      for (double v : comp) kmax = std::max(kmax, std::abs(v));
    const double reach = kmax * q_.half_width(0);
    if (reach > 0.0) dt = std::min(dt, 0.4 * q_.spacing(0) / reach);
  }
  return dt;
}

void Simulator::encode(const DistributionField& psi, Species sp, DistributionField& f) const {
  const Maxwellian& m = sp == Species::A ? m_.a : m_.b;
  const std::int64_t nq = q_.size();
  parallel_for(x_.size(), [&](std::int64_t ix) {
    const double* p = psi.slice(ix);
    double* out = f.slice(ix);
    for (std::int64_t i = 0; i < nq; ++i)
      out[i] = (p[i] - m.values[i]) / m.sqrt_values[i];
  });
}

void Simulator::decode(const DistributionField& f, Species sp, DistributionField& psi) const {
  const Maxwellian& m = sp == Species::A ? m_.a : m_.b;
  const std::int64_t nq = q_.size();
  double worst = std::numeric_limits<double>::infinity();
  std::int64_t worst_at = -1;
  for (std::int64_t ix = 0; ix < x_.size(); ++ix) {
    const double* in = f.slice(ix);
    double* p = psi.slice(ix);
    for (std::int64_t i = 0; i < nq; ++i) {
      p[i] = m.values[i] + m.sqrt_values[i] * in[i];
      if (p[i] < worst) {
        worst = p[i];
        worst_at = ix * nq + i;
      }
    }
  }
  if (worst <= 0.0)
    throw InvariantError("decoded density nonpositive: node " + std::to_string(worst_at) +
                         " value " + std::to_string(worst));
}

double Simulator::total_mass(const SimState& s) const {
  double acc = 0.0;
  const std::int64_t n = static_cast<std::int64_t>(s.psi_a.data.size());
  for (std::int64_t i = 0; i < n; ++i) acc += 2.0 * s.psi_a.data[i] + s.psi_b.data[i];
  return acc * q_.weight() * x_.weight();
}

double Simulator::min_density(const SimState& s) const {
  double mn = s.psi_a.data.empty() ? 0.0 : s.psi_a.data[0];
  for (double v : s.psi_a.data) mn = std::min(mn, v);
  for (double v : s.psi_b.data) mn = std::min(mn, v);
  return mn;
}

void Simulator::check_positive(const SimState& s) const {
  const double mn = min_density(s);
  if (!(mn > 0.0))
    throw InvariantError("density positivity lost (min value " + std::to_string(mn) + ")");
}

}  // namespace micellar
