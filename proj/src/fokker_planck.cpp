#include "micellar/fokker_planck.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "micellar/common.hpp"

namespace micellar {

namespace {
// face term of the entropy production, nonnegative by operand ordering
inline double face_entropy(double ra, double rb) {
  const double lo = std::min(ra, rb), hi = std::max(ra, rb);
  const double d = hi - lo;
  if (d == 0.0) return 0.0;
  return d * std::log1p(d / lo);
}
}  // namespace

FokkerPlanckOperator::FokkerPlanckOperator(const QGrid& grid, const Maxwellian& m)
    : grid_(grid), m_(m) {
  if (static_cast<int>(m.values.size()) != grid.size())
    throw InvariantError("maxwellian/grid size mismatch");
  double q[2];
  if (grid_.dim() == 1) {
    const int n = grid_.n(0);
    face_[0].resize(static_cast<size_t>(n - 1));
    face_q2_[0].resize(static_cast<size_t>(n - 1));
    for (int j = 0; j + 1 < n; ++j) {
      q[0] = 0.5 * (grid_.coord(0, j) + grid_.coord(0, j + 1));
      face_[0][static_cast<size_t>(j)] = m_.c * std::exp(-m_.pot.value(q));
      face_q2_[0][static_cast<size_t>(j)] = q[0] * q[0];
    }
    return;
  }
  const int n0 = grid_.n(0), n1 = grid_.n(1);
  face_[0].resize(static_cast<size_t>((n0 - 1) * n1));
  face_q2_[0].resize(face_[0].size());
  for (int f = 0; f + 1 < n0; ++f)
    for (int j = 0; j < n1; ++j) {
      q[0] = 0.5 * (grid_.coord(0, f) + grid_.coord(0, f + 1));
      q[1] = grid_.coord(1, j);
      face_[0][static_cast<size_t>(f * n1 + j)] = m_.c * std::exp(-m_.pot.value(q));
      face_q2_[0][static_cast<size_t>(f * n1 + j)] = q[0] * q[0] + q[1] * q[1];
    }
  face_[1].resize(static_cast<size_t>(n0 * (n1 - 1)));
  face_q2_[1].resize(face_[1].size());
  for (int j = 0; j < n0; ++j)
    for (int f = 0; f + 1 < n1; ++f) {
      q[0] = grid_.coord(0, j);
      q[1] = 0.5 * (grid_.coord(1, f) + grid_.coord(1, f + 1));
      face_[1][static_cast<size_t>(j * (n1 - 1) + f)] = m_.c * std::exp(-m_.pot.value(q));
      face_q2_[1][static_cast<size_t>(j * (n1 - 1) + f)] = q[0] * q[0] + q[1] * q[1];
    }
}

void FokkerPlanckOperator::apply_density(const double* psi, double* out) const {
  const int n = grid_.size();
  const double* mv = m_.values.data();
  for (int i = 0; i < n; ++i) out[i] = 0.0;

  if (grid_.dim() == 1) {
    const double inv_h2 = 1.0 / (grid_.spacing(0) * grid_.spacing(0));
    for (int j = 0; j + 1 < n; ++j) {
      const double flux = face_[0][static_cast<size_t>(j)] *
                          (psi[j + 1] / mv[j + 1] - psi[j] / mv[j]) * inv_h2;
      out[j] += flux;
      out[j + 1] -= flux;
    }
    return;
  }
  const int n0 = grid_.n(0), n1 = grid_.n(1);
  const double ih2_0 = 1.0 / (grid_.spacing(0) * grid_.spacing(0));
  const double ih2_1 = 1.0 / (grid_.spacing(1) * grid_.spacing(1));
  for (int f = 0; f + 1 < n0; ++f)
    for (int j = 0; j < n1; ++j) {
      const int i0 = f * n1 + j, i1 = (f + 1) * n1 + j;
      const double flux = face_[0][static_cast<size_t>(f * n1 + j)] *
                          (psi[i1] / mv[i1] - psi[i0] / mv[i0]) * ih2_0;
      out[i0] += flux;
      out[i1] -= flux;
    }
  for (int j = 0; j < n0; ++j)
    for (int f = 0; f + 1 < n1; ++f) {
      const int i0 = j * n1 + f, i1 = j * n1 + f + 1;
      const double flux = face_[1][static_cast<size_t>(j * (n1 - 1) + f)] *
                          (psi[i1] / mv[i1] - psi[i0] / mv[i0]) * ih2_1;
      out[i0] += flux;
      out[i1] -= flux;
    }
}

void FokkerPlanckOperator::apply_fluctuation(const double* f, double* out) const {
  const int n = grid_.size();
  const double* sm = m_.sqrt_values.data();
  static thread_local std::vector<double> g;
  g.resize(static_cast<size_t>(n));
  // L f = (1/sqrtM) A(sqrtM f): the density argument psi = sqrtM*f has psi/M = f/sqrtM
  for (int i = 0; i < n; ++i) g[static_cast<size_t>(i)] = f[i] * sm[i];
  apply_density(g.data(), out);
  for (int i = 0; i < n; ++i) out[i] /= sm[i];
}

double FokkerPlanckOperator::dirichlet_form(const double* g) const {
  double s = 0.0;
  if (grid_.dim() == 1) {
    const int n = grid_.n(0);
    const double ih2 = 1.0 / (grid_.spacing(0) * grid_.spacing(0));
    for (int j = 0; j + 1 < n; ++j) {
      const double d = g[j + 1] - g[j];
      s += face_[0][static_cast<size_t>(j)] * d * d * ih2;
    }
    return s * grid_.weight();
  }
  const int n0 = grid_.n(0), n1 = grid_.n(1);
  const double ih2_0 = 1.0 / (grid_.spacing(0) * grid_.spacing(0));
  const double ih2_1 = 1.0 / (grid_.spacing(1) * grid_.spacing(1));
  for (int f = 0; f + 1 < n0; ++f)
    for (int j = 0; j < n1; ++j) {
      const double d = g[(f + 1) * n1 + j] - g[f * n1 + j];
      s += face_[0][static_cast<size_t>(f * n1 + j)] * d * d * ih2_0;
    }
  for (int j = 0; j < n0; ++j)
    for (int f = 0; f + 1 < n1; ++f) {
      const double d = g[j * n1 + f + 1] - g[j * n1 + f];
      s += face_[1][static_cast<size_t>(j * (n1 - 1) + f)] * d * d * ih2_1;
    }
  return s * grid_.weight();
}

double FokkerPlanckOperator::dirichlet_form_qweighted(const double* g) const {
  double s = 0.0;
  if (grid_.dim() == 1) {
    const int n = grid_.n(0);
    const double ih2 = 1.0 / (grid_.spacing(0) * grid_.spacing(0));
    for (int j = 0; j + 1 < n; ++j) {
      const double d = g[j + 1] - g[j];
      s += face_q2_[0][static_cast<size_t>(j)] * face_[0][static_cast<size_t>(j)] * d * d * ih2;
    }
    return s * grid_.weight();
  }
  const int n0 = grid_.n(0), n1 = grid_.n(1);
  const double ih2_0 = 1.0 / (grid_.spacing(0) * grid_.spacing(0));
  const double ih2_1 = 1.0 / (grid_.spacing(1) * grid_.spacing(1));
  for (int f = 0; f + 1 < n0; ++f)
    for (int j = 0; j < n1; ++j) {
      const double d = g[(f + 1) * n1 + j] - g[f * n1 + j];
      s += face_q2_[0][static_cast<size_t>(f * n1 + j)] * face_[0][static_cast<size_t>(f * n1 + j)] * d * d * ih2_0;
    }
  for (int j = 0; j < n0; ++j)
    for (int f = 0; f + 1 < n1; ++f) {
      const double d = g[j * n1 + f + 1] - g[j * n1 + f];
      s += face_q2_[1][static_cast<size_t>(j * (n1 - 1) + f)] * face_[1][static_cast<size_t>(j * (n1 - 1) + f)] * d * d * ih2_1;
    }
  return s * grid_.weight();
}

double FokkerPlanckOperator::entropy_production(const double* psi) const {
  const double* mv = m_.values.data();
  double s = 0.0;
  if (grid_.dim() == 1) {
    const int n = grid_.n(0);
    const double ih2 = 1.0 / (grid_.spacing(0) * grid_.spacing(0));
    for (int j = 0; j + 1 < n; ++j)
      s += face_[0][static_cast<size_t>(j)] * face_entropy(psi[j] / mv[j], psi[j + 1] / mv[j + 1]) * ih2;
    return s * grid_.weight();
  }
  const int n0 = grid_.n(0), n1 = grid_.n(1);
  const double ih2_0 = 1.0 / (grid_.spacing(0) * grid_.spacing(0));
  const double ih2_1 = 1.0 / (grid_.spacing(1) * grid_.spacing(1));
  for (int f = 0; f + 1 < n0; ++f)
    for (int j = 0; j < n1; ++j) {
      const int i0 = f * n1 + j, i1 = (f + 1) * n1 + j;
      s += face_[0][static_cast<size_t>(f * n1 + j)] * face_entropy(psi[i0] / mv[i0], psi[i1] / mv[i1]) * ih2_0;
    }
  for (int j = 0; j < n0; ++j)
    for (int f = 0; f + 1 < n1; ++f) {
      const int i0 = j * n1 + f, i1 = j * n1 + f + 1;
      s += face_[1][static_cast<size_t>(j * (n1 - 1) + f)] * face_entropy(psi[i0] / mv[i0], psi[i1] / mv[i1]) * ih2_1;
    }
  return s * grid_.weight();
}

double FokkerPlanckOperator::weighted_mean(const double* g) const {
  double num = 0.0, den = 0.0;
  const int n = grid_.size();
  for (int i = 0; i < n; ++i) {
    num += g[i] * m_.values[static_cast<size_t>(i)];
    den += m_.values[static_cast<size_t>(i)];
  }
  return num / den;
}

void FokkerPlanckOperator::project_kernel(const double* g, double* orth, double* mean_out) const {
  const double mean = weighted_mean(g);
  const int n = grid_.size();
  for (int i = 0; i < n; ++i) orth[i] = g[i] - mean;
  if (mean_out) *mean_out = mean;
}

// Thomas solve of (I - theta*A_axis) x = rhs along one grid line (in place on rhs)
namespace {
struct LineScratch {
  std::vector<double> diag, lower, upper, cp, rhs;
};

inline void line_coeffs(const double* mv, const double* mf, int n, double ih2,
                        LineScratch& w) {
  // tridiagonal action of the 1D flux stencil on this line
  w.diag.resize(static_cast<size_t>(n));
  w.lower.resize(static_cast<size_t>(n));
  w.upper.resize(static_cast<size_t>(n));
  for (int p = 0; p < n; ++p) {
    const double fl = p > 0 ? mf[p - 1] : 0.0;
    const double fr = p + 1 < n ? mf[p] : 0.0;
    w.diag[static_cast<size_t>(p)] = -(fl + fr) * ih2 / mv[p];
    w.lower[static_cast<size_t>(p)] = p > 0 ? fl * ih2 / mv[p - 1] : 0.0;
    w.upper[static_cast<size_t>(p)] = p + 1 < n ? fr * ih2 / mv[p + 1] : 0.0;
  }
}

inline void thomas(int n, double theta, LineScratch& w, double* x, int stride) {
  // assemble (I - theta A) and solve; diagonally dominant M-matrix
  w.cp.resize(static_cast<size_t>(n));
  double d0 = 1.0 - theta * w.diag[0];
  w.rhs[0] = w.rhs[0] / d0;
  w.cp[0] = -theta * w.upper[0] / d0;
  for (int p = 1; p < n; ++p) {
    const double a = -theta * w.lower[static_cast<size_t>(p)];
    const double d = 1.0 - theta * w.diag[static_cast<size_t>(p)] - a * w.cp[static_cast<size_t>(p - 1)];
    w.cp[static_cast<size_t>(p)] = -theta * w.upper[static_cast<size_t>(p)] / d;
    w.rhs[static_cast<size_t>(p)] = (w.rhs[static_cast<size_t>(p)] - a * w.rhs[static_cast<size_t>(p - 1)]) / d;
  }
  for (int p = n - 2; p >= 0; --p)
    w.rhs[static_cast<size_t>(p)] -= w.cp[static_cast<size_t>(p)] * w.rhs[static_cast<size_t>(p + 1)];
  for (int p = 0; p < n; ++p) x[p * stride] = w.rhs[static_cast<size_t>(p)];
}
}  // namespace

void FokkerPlanckOperator::axis_solve(double* psi, double theta_dt, int axis,
                                      bool crank_nicolson) const {
  const int n = grid_.n(axis);
  const double ih2 = 1.0 / (grid_.spacing(axis) * grid_.spacing(axis));
  static thread_local LineScratch w;
  static thread_local std::vector<double> mline, fline;
  w.rhs.resize(static_cast<size_t>(n));
  mline.resize(static_cast<size_t>(n));
  fline.resize(static_cast<size_t>(n));

  const int n_lines = grid_.dim() == 1 ? 1 : grid_.n(1 - axis);
  const int n1 = grid_.dim() == 1 ? 1 : grid_.n(1);
  for (int t = 0; t < n_lines; ++t) {
    int base, stride;
    if (grid_.dim() == 1) {
      base = 0;
      stride = 1;
    } else if (axis == 0) {
      base = t;
      stride = n1;
      for (int p = 0; p + 1 < n; ++p)
        fline[static_cast<size_t>(p)] = face_[0][static_cast<size_t>(p * n1 + t)];
    } else {
      base = t * n1;
      stride = 1;
      for (int p = 0; p + 1 < n; ++p)
        fline[static_cast<size_t>(p)] = face_[1][static_cast<size_t>(t * (n1 - 1) + p)];
    }
    if (grid_.dim() == 1)
      for (int p = 0; p + 1 < n; ++p) fline[static_cast<size_t>(p)] = face_[0][static_cast<size_t>(p)];
    for (int p = 0; p < n; ++p) mline[static_cast<size_t>(p)] = m_.values[static_cast<size_t>(base + p * stride)];

    line_coeffs(mline.data(), fline.data(), n, ih2, w);

    double* x = psi + base;
    if (crank_nicolson) {
      for (int p = 0; p < n; ++p) {
        double r = (1.0 + theta_dt * w.diag[static_cast<size_t>(p)]) * x[p * stride];
        if (p > 0) r += theta_dt * w.lower[static_cast<size_t>(p)] * x[(p - 1) * stride];
        if (p + 1 < n) r += theta_dt * w.upper[static_cast<size_t>(p)] * x[(p + 1) * stride];
        w.rhs[static_cast<size_t>(p)] = r;
      }
    } else {
      for (int p = 0; p < n; ++p) w.rhs[static_cast<size_t>(p)] = x[p * stride];
    }
    thomas(n, theta_dt, w, x, stride);
  }
}

void FokkerPlanckOperator::advance_density(double* psi, double dt, int order) const {
  if (order == 2) {
    if (grid_.dim() == 1) {
      axis_solve(psi, 0.5 * dt, 0, true);
    } else {
      axis_solve(psi, 0.25 * dt, 0, true);  // half step, CN theta = (dt/2)/2
      axis_solve(psi, 0.5 * dt, 1, true);
      axis_solve(psi, 0.25 * dt, 0, true);
    }
  } else {
    axis_solve(psi, dt, 0, false);
    if (grid_.dim() == 2) axis_solve(psi, dt, 1, false);
  }
}

void FokkerPlanckOperator::eigen_axis(int axis, std::vector<double>& vals,
                                      std::vector<double>* gap_vec) const {
  const int n = grid_.n(axis);
  if (n > 1024) throw ResolutionError("axis eigensolve limited to 1024 nodes");
  // 1D factor of the separable Maxwellian (normalization drops out of L)
  Eigen::MatrixXd lmat = Eigen::MatrixXd::Zero(n, n);
  std::vector<double> mnode(static_cast<size_t>(n)), mface(static_cast<size_t>(n - 1));
  const double half = grid_.half_width(axis), h = grid_.spacing(axis);
  const double stiff = m_.pot.stiffness();  // separable => hookean (or 1D general)
  double q[2] = {0.0, 0.0};
  for (int j = 0; j < n; ++j) {
    if (grid_.dim() == 1) {
      q[0] = grid_.coord(0, j);
      mnode[static_cast<size_t>(j)] = std::exp(-m_.pot.value(q));
    } else {
      const double c = -half + (j + 0.5) * h;
      mnode[static_cast<size_t>(j)] = std::exp(-0.5 * stiff * c * c);
    }
  }
  for (int j = 0; j + 1 < n; ++j) {
    if (grid_.dim() == 1) {
      q[0] = 0.5 * (grid_.coord(0, j) + grid_.coord(0, j + 1));
      mface[static_cast<size_t>(j)] = std::exp(-m_.pot.value(q));
    } else {
      const double c = -half + (j + 1.0) * h;
      mface[static_cast<size_t>(j)] = std::exp(-0.5 * stiff * c * c);
    }
  }
  const double ih2 = 1.0 / (h * h);
  for (int j = 0; j + 1 < n; ++j) {
    const double w = mface[static_cast<size_t>(j)] * ih2;
    lmat(j, j) -= w / mnode[static_cast<size_t>(j)];
    lmat(j + 1, j + 1) -= w / mnode[static_cast<size_t>(j + 1)];
    const double off = w / std::sqrt(mnode[static_cast<size_t>(j)] * mnode[static_cast<size_t>(j + 1)]);
    lmat(j, j + 1) += off;
    lmat(j + 1, j) += off;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(-lmat);
  if (es.info() != Eigen::Success) throw InvariantError("axis eigensolve failed");
  vals.assign(es.eigenvalues().data(), es.eigenvalues().data() + n);
  if (gap_vec) {
    gap_vec->resize(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) (*gap_vec)[static_cast<size_t>(j)] = es.eigenvectors()(j, 1);
  }
}

void FokkerPlanckOperator::eigen_dense(std::vector<double>& vals) const {
  const int n = grid_.size();
  if (n > 4096)
    throw ResolutionError("dense eigensolve limited to 4096 nodes for non-separable potentials");
  Eigen::MatrixXd lmat = Eigen::MatrixXd::Zero(n, n);
  const double* mv = m_.values.data();
  auto add_face = [&](int i0, int i1, double w) {
    lmat(i0, i0) -= w / mv[i0];
    lmat(i1, i1) -= w / mv[i1];
    const double off = w / std::sqrt(mv[i0] * mv[i1]);
    lmat(i0, i1) += off;
    lmat(i1, i0) += off;
  };
  if (grid_.dim() == 1) {
    const double ih2 = 1.0 / (grid_.spacing(0) * grid_.spacing(0));
    for (int j = 0; j + 1 < grid_.n(0); ++j)
      add_face(j, j + 1, face_[0][static_cast<size_t>(j)] * ih2);
  } else {
    const int n0 = grid_.n(0), n1 = grid_.n(1);
    const double ih2_0 = 1.0 / (grid_.spacing(0) * grid_.spacing(0));
    const double ih2_1 = 1.0 / (grid_.spacing(1) * grid_.spacing(1));
    for (int f = 0; f + 1 < n0; ++f)
      for (int j = 0; j < n1; ++j)
        add_face(f * n1 + j, (f + 1) * n1 + j, face_[0][static_cast<size_t>(f * n1 + j)] * ih2_0);
    for (int j = 0; j < n0; ++j)
      for (int f = 0; f + 1 < n1; ++f)
        add_face(j * n1 + f, j * n1 + f + 1, face_[1][static_cast<size_t>(j * (n1 - 1) + f)] * ih2_1);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(-lmat, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw InvariantError("dense eigensolve failed");
  vals.assign(es.eigenvalues().data(), es.eigenvalues().data() + n);
}

std::vector<double> FokkerPlanckOperator::eigenvalues(int count) const {
  std::vector<double> out;
  if (m_.pot.separable() && grid_.dim() == 2) {
    std::vector<double> v0, v1;
    eigen_axis(0, v0, nullptr);
    eigen_axis(1, v1, nullptr);
    const int keep = std::min<int>(count, static_cast<int>(v0.size()));
    for (int i = 0; i < keep; ++i)
      for (int j = 0; j < keep; ++j) out.push_back(v0[static_cast<size_t>(i)] + v1[static_cast<size_t>(j)]);
    std::sort(out.begin(), out.end());
  } else if (grid_.dim() == 1) {
    eigen_axis(0, out, nullptr);
  } else {
    eigen_dense(out);
  }
  if (static_cast<int>(out.size()) > count) out.resize(static_cast<size_t>(count));
  return out;
}

double FokkerPlanckOperator::spectral_gap() const {
  std::vector<double> eigs = eigenvalues(8);
  if (eigs.size() < 2) throw ResolutionError("spectrum too small");
  if (std::abs(eigs[0]) > 1e-8)
    throw ResolutionError("kernel eigenvalue missing (|eig0| = " + std::to_string(eigs[0]) + ")");
  if (eigs[1] < 1e-8)
    throw ResolutionError("degenerate spectral gap: grid too coarse for this potential");
  return eigs[1];
}

std::vector<double> FokkerPlanckOperator::gap_eigenvector() const {
  if (grid_.dim() != 1) throw InvariantError("gap eigenvector exposed for 1D grids only");
  std::vector<double> vals, vec;
  eigen_axis(0, vals, &vec);
  return vec;
}

}  // namespace micellar
