#include "micellar/transport.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "micellar/common.hpp"

namespace micellar {

Transport::Transport(const SpectralWorkspace& sw, double cfl) : sw_(&sw), cfl_(cfl) {}

void Transport::faces_for(const VelocityField& u,
                          std::vector<std::vector<double>>& faces) const {
  sw_->face_velocities(u, faces);
}

void Transport::advect_with_faces(DistributionField& psi,
                                  const std::vector<std::vector<double>>& faces,
                                  double dt) const {
  const XLattice& x = sw_->lattice();
  const int d = x.dim();
  const int n = x.n();
  const std::int64_t nq = psi.nq;
  const double h = x.spacing();

  double fmax = 0.0;
  for (const auto& f : faces)
    for (double v : f) fmax = std::max(fmax, std::abs(v));
  if (fmax == 0.0) return;
  if (dt * fmax * d / h > cfl_)
    throw StepRejection("transport cfl limit exceeded", 0.4 * h / (fmax * d));

  const std::vector<double> old(psi.data);
  const double lam = dt / h;
  parallel_for(x.size(), [&](std::int64_t ix) {
    const int i0 = d == 1 ? static_cast<int>(ix) : static_cast<int>(ix / n);
    const int i1 = d == 1 ? 0 : static_cast<int>(ix % n);
    double* out = psi.slice(ix);
    for (int a = 0; a < d; ++a) {
      // faces[a][ix] sits between cell ix and its +e_a neighbor
      std::int64_t up, dn;  // cells past the right/left faces of this cell
      std::int64_t fr = ix, fl;
      if (a == 0) {
        up = d == 1 ? x.wrap(i0 + 1) : x.index(x.wrap(i0 + 1), i1);
        fl = d == 1 ? x.wrap(i0 - 1) : x.index(x.wrap(i0 - 1), i1);
      } else {
        up = x.index(i0, x.wrap(i1 + 1));
        fl = x.index(i0, x.wrap(i1 - 1));
      }
      dn = fl;
      const double vr = faces[a][fr];
      const double vl = faces[a][fl];
      const double* cme = old.data() + ix * nq;
      const double* cup = old.data() + up * nq;
      const double* cdn = old.data() + dn * nq;
      for (std::int64_t iq = 0; iq < nq; ++iq) {
        const double flux_r = vr >= 0.0 ? vr * cme[iq] : vr * cup[iq];
        const double flux_l = vl >= 0.0 ? vl * cdn[iq] : vl * cme[iq];
        out[iq] -= lam * (flux_r - flux_l);
      }
    }
  });
}

void Transport::advect(DistributionField& psi_a, DistributionField& psi_b,
                       const VelocityField& u, double dt) const {
  if (u.is_zero()) return;
  std::vector<std::vector<double>> faces;
  faces_for(u, faces);
  advect_with_faces(psi_a, faces, dt);
  advect_with_faces(psi_b, faces, dt);
}

double Transport::staggered_divergence_max(
    const std::vector<std::vector<double>>& faces) const {
  const XLattice& x = sw_->lattice();
  const int d = x.dim();
  const int n = x.n();
  const double h = x.spacing();
  double worst = 0.0;
  for (std::int64_t ix = 0; ix < x.size(); ++ix) {
    const int i0 = d == 1 ? static_cast<int>(ix) : static_cast<int>(ix / n);
    const int i1 = d == 1 ? 0 : static_cast<int>(ix % n);
    double div = 0.0;
    for (int a = 0; a < d; ++a) {
      std::int64_t fl;
      if (a == 0)
        fl = d == 1 ? x.wrap(i0 - 1) : x.index(x.wrap(i0 - 1), i1);
      else
        fl = x.index(i0, x.wrap(i1 - 1));
      div += (faces[a][ix] - faces[a][fl]) / h;
    }
    worst = std::max(worst, std::abs(div));
  }
  return worst;
}

void qdrift_tendency(const QGrid& g, const double* kappa, const double* psi, double* out) {
  const int d = g.dim();
  const double h = g.spacing(0);
  const double a = g.half_width(0);
  const double ih = 1.0 / h;

  if (d == 1) {
    const int n = g.n(0);
    const double k00 = kappa[0];
    std::fill(out, out + n, 0.0);
    for (int f = 0; f + 1 < n; ++f) {
      const double v = k00 * (-a + (f + 1) * h);
      const double fx = (v >= 0.0 ? v * psi[f] : v * psi[f + 1]) * ih;
      out[f] -= fx;
      out[f + 1] += fx;
    }
    return;
  }

  const int n0 = g.n(0), n1 = g.n(1);
  auto node = [&](int j) { return -a + (j + 0.5) * h; };
  auto face = [&](int f) { return -a + (f + 1) * h; };
  std::fill(out, out + static_cast<std::int64_t>(n0) * n1, 0.0);
  for (int f0 = 0; f0 + 1 < n0; ++f0)
    for (int j1 = 0; j1 < n1; ++j1) {
      const double v = kappa[0] * face(f0) + kappa[1] * node(j1);
      const std::int64_t l = static_cast<std::int64_t>(f0) * n1 + j1;
      const std::int64_t r = l + n1;
      const double fx = (v >= 0.0 ? v * psi[l] : v * psi[r]) * ih;
      out[l] -= fx;
      out[r] += fx;
    }
  for (int j0 = 0; j0 < n0; ++j0)
    for (int f1 = 0; f1 + 1 < n1; ++f1) {
      const double v = kappa[2] * node(j0) + kappa[3] * face(f1);
      const std::int64_t l = static_cast<std::int64_t>(j0) * n1 + f1;
      const std::int64_t r = l + 1;
      const double fx = (v >= 0.0 ? v * psi[l] : v * psi[r]) * ih;
      out[l] -= fx;
      out[r] += fx;
    }
}

double qdrift_speed_max(const QGrid& g, const double* kappa) {
  const int d = g.dim();
  const double h = g.spacing(0);
  const double a = g.half_width(0);
  double vmax = 0.0;
  if (d == 1) {
    const int n = g.n(0);
    for (int f = 0; f + 1 < n; ++f)
      vmax = std::max(vmax, std::abs(kappa[0] * (-a + (f + 1) * h)));
    return vmax;
  }
  const int n0 = g.n(0), n1 = g.n(1);
  auto node = [&](int j) { return -a + (j + 0.5) * h; };
  auto face = [&](int f) { return -a + (f + 1) * h; };
  for (int f0 = 0; f0 + 1 < n0; ++f0)
    for (int j1 = 0; j1 < n1; ++j1)
      vmax = std::max(vmax, std::abs(kappa[0] * face(f0) + kappa[1] * node(j1)));
  for (int j0 = 0; j0 < n0; ++j0)
    for (int f1 = 0; f1 + 1 < n1; ++f1)
      vmax = std::max(vmax, std::abs(kappa[2] * node(j0) + kappa[3] * face(f1)));
  return vmax;
}

void qdrift_apply(const QGrid& g, const double* kappa, double dt, double* psi, double cfl) {
  const double vmax = qdrift_speed_max(g, kappa);
  if (vmax == 0.0) return;
  const double h = g.spacing(0);
  if (dt * vmax * g.dim() / h > cfl)
    throw StepRejection("configuration-drift cfl limit exceeded",
                        0.4 * h / (vmax * g.dim()));
  std::vector<double> tend(g.size());
  qdrift_tendency(g, kappa, psi, tend.data());
  for (std::int64_t i = 0; i < g.size(); ++i) psi[i] += dt * tend[i];
}

}  // namespace micellar
