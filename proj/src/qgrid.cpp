#include "micellar/qgrid.hpp"

#include <cmath>

#include "micellar/common.hpp"

namespace micellar {

QGrid QGrid::box(int dim, int n_per_axis, double half_width) {
  if (dim < 1 || dim > 2) throw ConfigError("q dimension must be 1 or 2");
  if (n_per_axis < 2) throw ConfigError("q grid needs at least 2 nodes per axis");
  if (!(half_width > 0.0)) throw ConfigError("q half-width must be positive");
  QGrid g;
  g.dim_ = dim;
  g.n_ = {n_per_axis, dim == 2 ? n_per_axis : 1};
  g.half_ = {half_width, dim == 2 ? half_width : 0.0};
  g.size_ = g.n_[0] * g.n_[1];
  g.w_ = 1.0;
  for (int a = 0; a < dim; ++a) {
    const double h = 2.0 * g.half_[static_cast<size_t>(a)] / g.n_[static_cast<size_t>(a)];
    g.h_[static_cast<size_t>(a)] = h;
    g.w_ *= h;
    auto& c = g.coords_[static_cast<size_t>(a)];
    c.resize(static_cast<size_t>(g.n_[static_cast<size_t>(a)]));
    for (int j = 0; j < g.n_[static_cast<size_t>(a)]; ++j)
      c[static_cast<size_t>(j)] = -g.half_[static_cast<size_t>(a)] + (j + 0.5) * h;
  }
  return g;
}

QGrid QGrid::for_potential(const Potential& pot_b, int n_per_axis, double radius_override) {
  if (pot_b.kind() == PotentialKind::hookean) {
    double r = radius_override > 0.0 ? radius_override : 8.0 / std::sqrt(pot_b.stiffness());
    return box(pot_b.dim(), n_per_axis, r);
  }
  // fene: per-axis half-width a with the outermost face at a = b0' - h/2,
  // b0' the inscribed-box half-width; solving a = b0'*n/(n+1).
  const double b0p = pot_b.b0() / std::sqrt(static_cast<double>(pot_b.dim()));
  const double a = b0p * n_per_axis / (n_per_axis + 1.0);
  return box(pot_b.dim(), n_per_axis, a);
}

void QGrid::node(int flat, double* out) const {
  if (dim_ == 1) {
    out[0] = coords_[0][static_cast<size_t>(flat)];
    return;
  }
  out[0] = coords_[0][static_cast<size_t>(flat / n_[1])];
  out[1] = coords_[1][static_cast<size_t>(flat % n_[1])];
}

bool QGrid::same_shape(const QGrid& o) const {
  return dim_ == o.dim_ && n_ == o.n_ && half_ == o.half_;
}

double qsum(const QGrid& g, const double* f) {
  double s = 0.0;
  const int n = g.size();
  for (int i = 0; i < n; ++i) s += f[i];
  return s * g.weight();
}

void first_moment(const QGrid& g, const double* psi, double* out) {
  double q[2];
  for (int a = 0; a < g.dim(); ++a) out[a] = 0.0;
  const int n = g.size();
  for (int i = 0; i < n; ++i) {
    g.node(i, q);
    for (int a = 0; a < g.dim(); ++a) out[a] += q[a] * psi[i];
  }
  for (int a = 0; a < g.dim(); ++a) out[a] *= g.weight();
}

}  // namespace micellar
