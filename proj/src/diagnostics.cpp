#include "micellar/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "micellar/common.hpp"
#include "micellar/reaction.hpp"

namespace micellar {

namespace {

// phi(z) = (1+z)log1p(z) - z; series branch keeps tiny fluctuations
// nonnegative bitwise (the direct form cancels to signed noise near 0)
double entropy_phi(double z) {
  if (std::abs(z) < 1e-4)
    return z * z * (0.5 + z * (-1.0 / 6.0 + z * (1.0 / 12.0 + z * (-1.0 / 20.0))));
  return (1.0 + z) * std::log1p(z) - z;
}

// second-order first derivative along a strided line, one-sided at the ends
void diff_line(const double* v, double* out, int n, int stride, double h) {
  const double c = 1.0 / (2.0 * h);
  out[0] = (-3.0 * v[0] + 4.0 * v[stride] - v[2 * stride]) * c;
  for (int j = 1; j + 1 < n; ++j)
    out[static_cast<std::ptrdiff_t>(j) * stride] =
        (v[static_cast<std::ptrdiff_t>(j + 1) * stride] -
         v[static_cast<std::ptrdiff_t>(j - 1) * stride]) *
        c;
  out[static_cast<std::ptrdiff_t>(n - 1) * stride] =
      (3.0 * v[static_cast<std::ptrdiff_t>(n - 1) * stride] -
       4.0 * v[static_cast<std::ptrdiff_t>(n - 2) * stride] +
       v[static_cast<std::ptrdiff_t>(n - 3) * stride]) *
      c;
}

void diff_axis(const QGrid& g, int axis, const double* v, double* out) {
  const double h = g.spacing(axis);
  if (g.dim() == 1) {
    diff_line(v, out, g.n(0), 1, h);
    return;
  }
  const int n0 = g.n(0), n1 = g.n(1);
  if (axis == 0) {
    for (int j = 0; j < n1; ++j) diff_line(v + j, out + j, n0, n1, h);
  } else {
    for (int i = 0; i < n0; ++i)
      diff_line(v + static_cast<std::ptrdiff_t>(i) * n1,
                out + static_cast<std::ptrdiff_t>(i) * n1, n1, 1, h);
  }
}

// All q-direction quadratic forms of one x-mode's q-profiles (one real
// component at a time).  Derivative stacks hold v, its dq first derivatives,
// and the dq*dq ordered second derivatives (cross terms counted twice, as in
// the Hessian Frobenius norm).
struct ModeForms {
  ModeForms(const QGrid& q, const FokkerPlanckOperator& fpa, const FokkerPlanckOperator& fpb,
            const Maxwellian& ma, const Maxwellian& mb, int smax)
      : q_(q), fpa_(fpa), fpb_(fpb), ma_(ma), mb_(mb), smax_(smax) {
    nq_ = q.size();
    dq_ = q.dim();
    ntup_ = 1 + (smax_ >= 1 ? dq_ : 0) + (smax_ >= 2 ? dq_ * dq_ : 0);
    da_.assign(static_cast<size_t>(ntup_), std::vector<double>(static_cast<size_t>(nq_)));
    db_.assign(static_cast<size_t>(ntup_), std::vector<double>(static_cast<size_t>(nq_)));
    scratch_.assign(static_cast<size_t>(nq_), 0.0);
    qsq_.assign(static_cast<size_t>(nq_), 0.0);
    double qn[2];
    for (std::int64_t i = 0; i < nq_; ++i) {
      q.node(static_cast<int>(i), qn);
      double s = 0.0;
      for (int c = 0; c < dq_; ++c) s += qn[c] * qn[c];
      qsq_[static_cast<size_t>(i)] = s;
    }
  }

  int first(int c) const { return 1 + c; }
  int second(int c, int d) const { return 1 + dq_ + c * dq_ + d; }
  int level_begin(int l) const { return l == 0 ? 0 : (l == 1 ? 1 : 1 + dq_); }
  int level_end(int l) const { return l == 0 ? 1 : (l == 1 ? 1 + dq_ : ntup_); }

  void run(const double* va, const double* vb) {
    std::copy(va, va + nq_, da_[0].begin());
    std::copy(vb, vb + nq_, db_[0].begin());
    if (smax_ >= 1)
      for (int c = 0; c < dq_; ++c) {
        diff_axis(q_, c, da_[0].data(), da_[static_cast<size_t>(first(c))].data());
        diff_axis(q_, c, db_[0].data(), db_[static_cast<size_t>(first(c))].data());
      }
    if (smax_ >= 2)
      for (int c = 0; c < dq_; ++c)
        for (int d = 0; d < dq_; ++d) {
          diff_axis(q_, d, da_[static_cast<size_t>(first(c))].data(),
                    da_[static_cast<size_t>(second(c, d))].data());
          diff_axis(q_, d, db_[static_cast<size_t>(first(c))].data(),
                    db_[static_cast<size_t>(second(c, d))].data());
        }
    const double wq = q_.weight();
    const double* sma = ma_.sqrt_values.data();
    const double* smb = mb_.sqrt_values.data();
    for (int l = 0; l <= smax_; ++l) {
      double p = 0.0, fa = 0.0, fb = 0.0, r = 0.0;
      for (int t = level_begin(l); t < level_end(l); ++t) {
        const double* a = da_[static_cast<size_t>(t)].data();
        const double* b = db_[static_cast<size_t>(t)].data();
        double ps = 0.0, rs = 0.0;
        for (std::int64_t i = 0; i < nq_; ++i) {
          ps += a[i] * a[i] + b[i] * b[i];
          const double d = a[i] - 2.0 * smb[i] * b[i];
          rs += d * d;
        }
        p += ps;
        r += rs;
        for (std::int64_t i = 0; i < nq_; ++i) scratch_[static_cast<size_t>(i)] = a[i] / sma[i];
        fa += fpa_.dirichlet_form(scratch_.data());
        for (std::int64_t i = 0; i < nq_; ++i) scratch_[static_cast<size_t>(i)] = b[i] / smb[i];
        fb += fpb_.dirichlet_form(scratch_.data());
      }
      P[l] = p * wq;
      F[l] = fa + fb;
      R[l] = r * wq;
    }
    double g = 0.0, j = 0.0, rho = 0.0;
    for (std::int64_t i = 0; i < nq_; ++i)
      scratch_[static_cast<size_t>(i)] = da_[0][static_cast<size_t>(i)] / sma[i];
    g += fpa_.dirichlet_form_qweighted(scratch_.data());
    for (std::int64_t i = 0; i < nq_; ++i)
      scratch_[static_cast<size_t>(i)] = db_[0][static_cast<size_t>(i)] / smb[i];
    g += fpb_.dirichlet_form_qweighted(scratch_.data());
    for (std::int64_t i = 0; i < nq_; ++i) {
      const size_t u = static_cast<size_t>(i);
      j += qsq_[u] * (da_[0][u] * da_[0][u] + db_[0][u] * db_[0][u]);
      rho += da_[0][u] * sma[i];
    }
    G = g;
    J = j * wq;
    Rho = rho * wq;
  }

  double P[3] = {0, 0, 0};  // plain L2 of the level-l derivative stack, both species
  double F[3] = {0, 0, 0};  // configurational Dirichlet forms of the stack
  double R[3] = {0, 0, 0};  // reactive quadratic forms |d^l a - 2 sqrt(M_B) d^l b|^2
  double G = 0.0;           // q-weighted Dirichlet form, level 0
  double J = 0.0;           // first-moment mass int |q|^2 |v|^2
  double Rho = 0.0;         // int v_A sqrt(M_A) dq (one real component of rho_hat)

 private:
  const QGrid& q_;
  const FokkerPlanckOperator& fpa_;
  const FokkerPlanckOperator& fpb_;
  const Maxwellian& ma_;
  const Maxwellian& mb_;
  int smax_, dq_, ntup_;
  std::int64_t nq_;
  std::vector<std::vector<double>> da_, db_;
  std::vector<double> scratch_, qsq_;
};

}  // namespace

EnergyReport Diagnostics::energy(const SimState& st) const {
  const XLattice& x = sim_.lattice();
  const QGrid& q = sim_.qgrid();
  const MaxwellianPair& m = sim_.maxwellians();
  const double lambda = sim_.config().lambda;
  const ReactionParams rp = sim_.reaction();
  const std::int64_t nq = q.size();
  const double wq = q.weight(), wx = x.weight();
  const double* ma = m.a.values.data();
  const double* mb = m.b.values.data();

  EnergyReport r;
  r.kinetic = sim_.fluid().kinetic_energy(st.u);
  r.d_u = sim_.fluid().viscous_dissipation(st.u);

  // (a-b)log(a/b) needs both rates strictly positive to mean anything
  const bool reactive = rp.k1 > 0.0 && rp.k2 > 0.0;
  double fe = 0.0, dm = 0.0, dr = 0.0;
  for (std::int64_t ix = 0; ix < x.size(); ++ix) {
    const double* pa = st.psi_a.slice(ix);
    const double* pb = st.psi_b.slice(ix);
    double cell = 0.0;
    for (std::int64_t i = 0; i < nq; ++i) {
      cell += ma[i] * entropy_phi((pa[i] - ma[i]) / ma[i]);
      cell += mb[i] * entropy_phi((pb[i] - mb[i]) / mb[i]);
    }
    fe += cell * wq;
    dm += sim_.fp_a().entropy_production(pa) + sim_.fp_b().entropy_production(pb);
    if (reactive) dr += reaction_dissipation(q, pa, pb, rp);
  }
  r.free_energy = lambda * wx * fe;
  r.d_micro = lambda * wx * dm;
  r.d_r = lambda * wx * dr;
  r.total = r.kinetic + r.free_energy;
  return r;
}

std::vector<double> Diagnostics::rho_a(const SimState& st) const {
  const XLattice& x = sim_.lattice();
  const QGrid& q = sim_.qgrid();
  const double* mv = sim_.maxwellians().a.values.data();
  std::vector<double> out(static_cast<size_t>(x.size()));
  for (std::int64_t ix = 0; ix < x.size(); ++ix) {
    const double* p = st.psi_a.slice(ix);
    double s = 0.0;
    for (std::int64_t i = 0; i < q.size(); ++i) s += p[i] - mv[i];
    out[static_cast<size_t>(ix)] = s * q.weight();
  }
  return out;
}

std::vector<double> Diagnostics::rho_b(const SimState& st) const {
  const XLattice& x = sim_.lattice();
  const QGrid& q = sim_.qgrid();
  const double* mv = sim_.maxwellians().b.values.data();
  std::vector<double> out(static_cast<size_t>(x.size()));
  for (std::int64_t ix = 0; ix < x.size(); ++ix) {
    const double* p = st.psi_b.slice(ix);
    double s = 0.0;
    for (std::int64_t i = 0; i < q.size(); ++i) s += p[i] - mv[i];
    out[static_cast<size_t>(ix)] = s * q.weight();
  }
  return out;
}

double Diagnostics::rho_constraint_max(const SimState& st) const {
  const std::vector<double> ra = rho_a(st), rb = rho_b(st);
  double mx = 0.0;
  for (size_t i = 0; i < ra.size(); ++i) mx = std::max(mx, std::abs(2.0 * ra[i] + rb[i]));
  return mx;
}

double Diagnostics::mass_rel_err(const SimState& st, double mass0) const {
  return std::abs(sim_.total_mass(st) - mass0) / std::abs(mass0);
}

SobolevReport Diagnostics::sobolev(const SimState& st, int s) const {
  if (s < 0 || s > 2) throw ConfigError("sobolev order must be 0, 1, or 2");
  const XLattice& x = sim_.lattice();
  const QGrid& q = sim_.qgrid();
  const SpectralWorkspace& sw = sim_.spectral();
  const double eta = sim_.config().eta;
  const double mu = sim_.config().mu;
  const std::int64_t nx = x.size(), nq = q.size();
  const double cfac = x.weight() / static_cast<double>(nx);  // Parseval factor

  DistributionField fa(x, q), fb(x, q);
  sim_.encode(st.psi_a, Species::A, fa);
  sim_.encode(st.psi_b, Species::B, fb);
  std::vector<std::complex<double>> ca(static_cast<size_t>(nx * nq)),
      cb(static_cast<size_t>(nx * nq));
  sw.spectrum_per_qnode(fa.data.data(), nq, ca.data());
  sw.spectrum_per_qnode(fb.data.data(), nq, cb.data());

  const bool with_u = !st.u.is_zero();
  std::vector<std::vector<std::complex<double>>> uhat;
  if (with_u) {
    uhat.assign(static_cast<size_t>(x.dim()),
                std::vector<std::complex<double>>(static_cast<size_t>(nx)));
    for (int c = 0; c < x.dim(); ++c)
      sw.to_spectrum(st.u.comp[static_cast<size_t>(c)].data(), uhat[static_cast<size_t>(c)].data());
  }

  ModeForms mf(q, sim_.fp_a(), sim_.fp_b(), sim_.maxwellians().a, sim_.maxwellians().b, s);
  std::vector<double> va(static_cast<size_t>(nq)), vb(static_cast<size_t>(nq));

  double accP[3] = {0, 0, 0}, accF[3] = {0, 0, 0}, accR[3] = {0, 0, 0};
  double accG = 0.0, accJ = 0.0, accRj = 0.0, accRho = 0.0;
  double e_su = 0.0, d_su = 0.0;

  for (std::int64_t m = 0; m < nx; ++m) {
    double k2 = 0.0;
    for (int a = 0; a < x.dim(); ++a) {
      const double kd = sw.kdiff(a, m);
      k2 += kd * kd;
    }
    double wl[3] = {1.0, 1.0 + k2, 1.0 + k2 + k2 * k2};  // W_j = sum_{i<=j} |k|^{2i}
    if (with_u) {
      double us = 0.0;
      for (int c = 0; c < x.dim(); ++c) us += std::norm(uhat[static_cast<size_t>(c)][static_cast<size_t>(m)]);
      e_su += wl[s] * us;
      d_su += wl[s] * k2 * us;
    }
    for (int part = 0; part < 2; ++part) {
      double mx = 0.0;
      for (std::int64_t i = 0; i < nq; ++i) {
        const std::complex<double>&za = ca[static_cast<size_t>(m * nq + i)];
        const std::complex<double>&zb = cb[static_cast<size_t>(m * nq + i)];
        va[static_cast<size_t>(i)] = part ? za.imag() : za.real();
        vb[static_cast<size_t>(i)] = part ? zb.imag() : zb.real();
        mx = std::max(mx, std::max(std::abs(va[static_cast<size_t>(i)]),
                                   std::abs(vb[static_cast<size_t>(i)])));
      }
      if (mx == 0.0) continue;
      mf.run(va.data(), vb.data());
      for (int l = 0; l <= s; ++l) {
        accP[l] += wl[s - l] * mf.P[l];
        accF[l] += wl[s - l] * mf.F[l];
        accR[l] += wl[s - l] * mf.R[l];
      }
      if (s >= 1) {
        accG += wl[s - 1] * mf.G;
        accJ += wl[s - 1] * mf.J;
        accRj += wl[s - 1] * mf.R[0];
      }
      accRho += wl[s] * mf.Rho * mf.Rho;
    }
  }

  SobolevReport r;
  r.s = s;
  r.eta = eta;
  r.e_x = cfac * (e_su + accP[0]);
  r.d_x = cfac * (mu * d_su + accF[0] + accR[0]);
  r.e_rho = cfac * accRho;
  r.d_rho = r.e_rho;
  r.e_j = s >= 1 ? cfac * accJ : 0.0;
  r.d_j = s >= 1 ? cfac * (accG + accRj) : 0.0;
  double emix = 0.0, dmix = 0.0, emix1 = 0.0, dmix1 = 0.0, ef = 1.0;
  for (int l = 1; l <= s; ++l) {
    ef *= eta;
    emix += ef * cfac * accP[l];
    dmix += ef * cfac * (accF[l] + accR[l]);
    emix1 += cfac * accP[l];
    dmix1 += cfac * (accF[l] + accR[l]);
  }
  r.e_mix = emix;
  r.d_mix = dmix;
  r.e_total = r.e_x + eta * r.e_rho + r.e_mix + eta * eta * r.e_j;
  r.d_total = r.d_x + eta * r.d_rho + r.d_mix + eta * eta * r.d_j;
  r.e_plain = r.e_x + r.e_rho + emix1 + r.e_j;
  r.d_plain = r.d_x + r.d_rho + dmix1 + r.d_j;
  r.part_fluid = cfac * mu * d_su;
  r.part_rho = r.e_rho;
  double fp_all = 0.0, re_all = 0.0;
  for (int l = 0; l <= s; ++l) {
    fp_all += accF[l];
    re_all += accR[l];
  }
  r.part_fp = cfac * fp_all;
  r.part_moment = s >= 1 ? cfac * accG : 0.0;
  r.part_reaction = cfac * re_all;
  const double tol = 1e-12 * std::max(1.0, r.e_plain);
  r.equiv_upper = r.e_total <= 2.0 * r.e_plain + tol;
  r.equiv_lower = r.e_plain <= std::pow(eta, -(s + 1)) * r.e_total + tol;
  return r;
}

double Diagnostics::cancellation_residual(const SimState& st, Species sp,
                                          bool inject_mismatch) const {
  const XLattice& x = sim_.lattice();
  const QGrid& q = sim_.qgrid();
  const Maxwellian& m = sp == Species::A ? sim_.maxwellians().a : sim_.maxwellians().b;
  if (st.u.is_zero()) return 0.0;
  const std::int64_t nx = x.size(), nq = q.size();
  const int dx = x.dim(), dq = q.dim();
  const int nc = std::min(dx, dq);
  const double wq = q.weight(), wx = x.weight();

  DistributionField f(x, q);
  sim_.encode(sp == Species::A ? st.psi_a : st.psi_b, sp, f);

  std::vector<std::vector<double>> kap;
  sim_.fluid().velocity_gradient(st.u, kap);

  // per-node potential gradient, coordinates, and (optionally offset) moment arm
  std::vector<double> gu(static_cast<size_t>(nq * dq)), qa(static_cast<size_t>(nq * dq)),
      qb(static_cast<size_t>(nq * dq));
  double qn[2], gr[2];
  double s2 = 0.0;
  for (std::int64_t i = 0; i < nq; ++i) {
    q.node(static_cast<int>(i), qn);
    m.pot.gradient(qn, gr);
    double g2 = 0.0, r2 = 0.0;
    for (int c = 0; c < dq; ++c) {
      gu[static_cast<size_t>(i * dq + c)] = gr[c];
      qa[static_cast<size_t>(i * dq + c)] = qn[c];
      qb[static_cast<size_t>(i * dq + c)] =
          qn[c] + (inject_mismatch ? 0.5 * q.spacing(c) : 0.0);
      g2 += gr[c] * gr[c];
      r2 += qn[c] * qn[c];
    }
    s2 += g2 * r2 * m.values[static_cast<size_t>(i)];
  }
  s2 = std::sqrt(s2 * wq);

  double acc_a = 0.0, acc_b = 0.0, fn2 = 0.0, kmax = 0.0;
  std::vector<double> t(static_cast<size_t>(nc * nc));
  for (std::int64_t ix = 0; ix < nx; ++ix) {
    const double* fv = f.slice(ix);
    std::fill(t.begin(), t.end(), 0.0);
    double cell = 0.0;
    for (std::int64_t i = 0; i < nq; ++i) {
      const double fs = fv[i] * m.sqrt_values[static_cast<size_t>(i)];
      fn2 += fv[i] * fv[i];
      double pair = 0.0;
      for (int a = 0; a < nc; ++a)
        for (int b = 0; b < nc; ++b) {
          t[static_cast<size_t>(a * nc + b)] +=
              gu[static_cast<size_t>(i * dq + a)] * qa[static_cast<size_t>(i * dq + b)] * fs;
          pair += kap[static_cast<size_t>(a * dx + b)][static_cast<size_t>(ix)] *
                  gu[static_cast<size_t>(i * dq + a)] * qb[static_cast<size_t>(i * dq + b)];
        }
      cell += fs * pair;
    }
    double contracted = 0.0;
    for (int a = 0; a < nc; ++a)
      for (int b = 0; b < nc; ++b)
        contracted += kap[static_cast<size_t>(a * dx + b)][static_cast<size_t>(ix)] *
                      t[static_cast<size_t>(a * nc + b)];
    acc_a += contracted;
    acc_b += cell;
    for (int a = 0; a < dx; ++a)
      for (int b = 0; b < dx; ++b)
        kmax = std::max(kmax, std::abs(kap[static_cast<size_t>(a * dx + b)][static_cast<size_t>(ix)]));
  }
  const double big_a = acc_a * wq * wx;
  const double big_b = acc_b * wq * wx;
  const double fnorm = std::sqrt(fn2 * wq * wx);
  const double denom = kmax * fnorm * s2;
  if (!(denom > 0.0)) return 0.0;
  return std::abs(big_a - big_b) / denom;
}

std::pair<double, double> fit_decay(const std::vector<double>& ts,
                                    const std::vector<double>& values) {
  if (ts.size() != values.size() || ts.size() < 4)
    throw ConfigError("fit_decay needs matching series with at least 4 samples");
  const size_t n = ts.size(), lo = n / 2;
  const double cnt = static_cast<double>(n - lo);
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (size_t i = lo; i < n; ++i) {
    if (!(values[i] > 0.0)) throw InvariantError("fit_decay needs positive values in the tail");
    const double xx = ts[i], yy = std::log(values[i]);
    sx += xx;
    sy += yy;
    sxx += xx * xx;
    sxy += xx * yy;
    syy += yy * yy;
  }
  const double vx = sxx - sx * sx / cnt;
  const double vy = syy - sy * sy / cnt;
  const double cxy = sxy - sx * sy / cnt;
  if (!(vx > 0.0)) throw InvariantError("fit_decay needs distinct sample times");
  const double slope = cxy / vx;
  const double r2 = vy > 0.0 ? (cxy * cxy) / (vx * vy) : 1.0;
  return {slope, r2};
}

}  // namespace micellar
