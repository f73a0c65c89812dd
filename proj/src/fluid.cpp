#include "micellar/fluid.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include "micellar/common.hpp"

namespace micellar {

Fluid::Fluid(const SpectralWorkspace& sw, FluidParams p) : sw_(&sw), p_(p) {
  if (!(p_.mu > 0.0)) throw ConfigError("viscosity must be positive");
  if (p_.lambda < 0.0) throw ConfigError("stress weight must be nonnegative");
}

void Fluid::kramers_stress(const QGrid& qg, const Potential& pot_a, const Potential& pot_b,
                           const DistributionField& psi_a, const DistributionField& psi_b,
                           std::vector<std::vector<double>>& tau) const {
  const XLattice& x = sw_->lattice();
  const int dx = x.dim();
  const int dq = qg.dim();
  const int db = std::min(dx, dq);
  const std::int64_t nq = qg.size();

  // per-node potential gradients and coordinates, laid out component-major
  std::vector<double> ga(static_cast<std::size_t>(dq) * nq), gb(ga.size()), qc(ga.size());
  {
    std::vector<double> node(dq), grad(dq);
    for (std::int64_t i = 0; i < nq; ++i) {
      qg.node(i, node.data());
      pot_a.gradient(node.data(), grad.data());
      for (int a = 0; a < dq; ++a) ga[a * nq + i] = grad[a];
      pot_b.gradient(node.data(), grad.data());
      for (int a = 0; a < dq; ++a) gb[a * nq + i] = grad[a];
      for (int b = 0; b < dq; ++b) qc[b * nq + i] = node[b];
    }
  }

  tau.assign(static_cast<std::size_t>(dx) * dx, std::vector<double>(x.size(), 0.0));
  const double scale = p_.lambda * qg.weight();
  parallel_for(x.size(), [&](std::int64_t ix) {
    const double* pa = psi_a.slice(ix);
    const double* pb = psi_b.slice(ix);
    for (int a = 0; a < db; ++a) {
      const double* gaa = ga.data() + static_cast<std::int64_t>(a) * nq;
      const double* gba = gb.data() + static_cast<std::int64_t>(a) * nq;
      for (int b = 0; b < db; ++b) {
        const double* qb = qc.data() + static_cast<std::int64_t>(b) * nq;
        double acc = 0.0;
        for (std::int64_t i = 0; i < nq; ++i)
          acc += (gaa[i] * pa[i] + gba[i] * pb[i]) * qb[i];
        tau[a * dx + b][ix] = scale * acc;
      }
    }
  });
}

void Fluid::step(VelocityField& u, const std::vector<std::vector<double>>& tau,
                 double dt) const {
  const XLattice& x = sw_->lattice();
  const int d = x.dim();
  const std::int64_t n = x.size();
  if (!(dt > 0.0)) throw ConfigError("time step must be positive");

  const double umax = u.max_abs();
  if (umax > 0.0 && dt * umax / x.spacing() > p_.cfl)
    throw StepRejection("advective cfl limit exceeded", 0.4 * x.spacing() / umax);

  using cvec = std::vector<std::complex<double>>;
  std::vector<cvec> uhat(d, cvec(n));
  for (int a = 0; a < d; ++a) sw_->to_spectrum(u.comp[a].data(), uhat[a].data());

  // dealiased physical copy for quadratic terms
  std::vector<std::vector<double>> ud(d, std::vector<double>(n));
  {
    cvec tmp(n);
    for (int a = 0; a < d; ++a) {
      tmp = uhat[a];
      sw_->dealias(tmp.data());
      sw_->to_field(tmp.data(), ud[a].data());
    }
  }

  // grad of dealiased velocity, for the advective half of the skew form
  std::vector<std::vector<double>> dud(static_cast<std::size_t>(d) * d,
                                       std::vector<double>(n));
  {
    cvec tmp(n);
    for (int a = 0; a < d; ++a) {
      cvec base = uhat[a];
      sw_->dealias(base.data());
      for (int b = 0; b < d; ++b) {
        for (std::int64_t i = 0; i < n; ++i)
          tmp[i] = std::complex<double>(0.0, sw_->kdiff(b, i)) * base[i];
        sw_->to_field(tmp.data(), dud[a * d + b].data());
      }
    }
  }

  std::vector<cvec> nhat(d, cvec(n, std::complex<double>(0.0)));
  {
    std::vector<double> prod(n);
    cvec phat(n);
    for (int a = 0; a < d; ++a) {
      // advective form u.grad u_a
      for (std::int64_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int b = 0; b < d; ++b) acc += ud[b][i] * dud[a * d + b][i];
        prod[i] = acc;
      }
      sw_->to_spectrum(prod.data(), phat.data());
      sw_->dealias(phat.data());
      for (std::int64_t i = 0; i < n; ++i) nhat[a][i] += phat[i];

      // divergence form d_b (u_a u_b)
      for (int b = 0; b < d; ++b) {
        for (std::int64_t i = 0; i < n; ++i) prod[i] = ud[a][i] * ud[b][i];
        sw_->to_spectrum(prod.data(), phat.data());
        sw_->dealias(phat.data());
        for (std::int64_t i = 0; i < n; ++i)
          nhat[a][i] += std::complex<double>(0.0, sw_->kdiff(b, i)) * phat[i];
      }
      for (std::int64_t i = 0; i < n; ++i) nhat[a][i] *= -0.5;
    }
  }

  // div tau
  if (!tau.empty()) {
    if (static_cast<int>(tau.size()) != d * d)
      throw InvariantError("stress tensor component count mismatch");
    cvec that(n);
    for (int b = 0; b < d; ++b) {
      for (int a = 0; a < d; ++a) {
        sw_->to_spectrum(tau[a * d + b].data(), that.data());
        sw_->dealias(that.data());
        for (std::int64_t i = 0; i < n; ++i)
          nhat[a][i] += std::complex<double>(0.0, sw_->kdiff(b, i)) * that[i];
      }
    }
  }

  for (int a = 0; a < d; ++a)
    for (std::int64_t i = 0; i < n; ++i) {
      const double damp = std::exp(-p_.mu * sw_->ksq(i) * dt);
      uhat[a][i] = damp * (uhat[a][i] + dt * nhat[a][i]);
    }
  sw_->leray(uhat);
  for (int a = 0; a < d; ++a) sw_->to_field(uhat[a].data(), u.comp[a].data());
}

void Fluid::velocity_gradient(const VelocityField& u,
                              std::vector<std::vector<double>>& kappa) const {
  const XLattice& x = sw_->lattice();
  const int d = x.dim();
  const std::int64_t n = x.size();
  kappa.assign(static_cast<std::size_t>(d) * d, std::vector<double>(n, 0.0));
  std::vector<std::complex<double>> uhat(n), tmp(n);
  for (int a = 0; a < d; ++a) {
    sw_->to_spectrum(u.comp[a].data(), uhat.data());
    for (int b = 0; b < d; ++b) {
      for (std::int64_t i = 0; i < n; ++i)
        tmp[i] = std::complex<double>(0.0, sw_->kdiff(b, i)) * uhat[i];
      sw_->to_field(tmp.data(), kappa[a * d + b].data());
    }
  }
}

double Fluid::kinetic_energy(const VelocityField& u) const {
  const XLattice& x = sw_->lattice();
  double acc = 0.0;
  for (const auto& c : u.comp)
    for (double v : c) acc += v * v;
  return 0.5 * x.weight() * acc;
}

double Fluid::viscous_dissipation(const VelocityField& u) const {
  const XLattice& x = sw_->lattice();
  const int d = x.dim();
  const std::int64_t n = x.size();
  const double cfac = x.weight() / static_cast<double>(n);
  std::vector<std::complex<double>> uhat(n);
  double acc = 0.0;
  for (int a = 0; a < d; ++a) {
    sw_->to_spectrum(u.comp[a].data(), uhat.data());
    for (std::int64_t i = 0; i < n; ++i) {
      double k2 = 0.0;
      for (int b = 0; b < d; ++b) {
        const double kb = sw_->kdiff(b, i);
        k2 += kb * kb;
      }
      acc += k2 * std::norm(uhat[i]);
    }
  }
  return p_.mu * cfac * acc;
}

double Fluid::divergence_max(const VelocityField& u) const {
  const XLattice& x = sw_->lattice();
  const int d = x.dim();
  const std::int64_t n = x.size();
  std::vector<std::complex<double>> div(n, std::complex<double>(0.0)), uhat(n);
  for (int a = 0; a < d; ++a) {
    sw_->to_spectrum(u.comp[a].data(), uhat.data());
    for (std::int64_t i = 0; i < n; ++i)
      div[i] += std::complex<double>(0.0, sw_->kdiff(a, i)) * uhat[i];
  }
  sw_->inverse(div.data());
  double m = 0.0;
  for (std::int64_t i = 0; i < n; ++i) m = std::max(m, std::abs(div[i].real()));
  return m;
}

}  // namespace micellar
