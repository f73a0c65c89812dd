#pragma once

#include <array>
#include <vector>

#include "micellar/potential.hpp"

namespace micellar {

// Cell-centered tensor grid on [-a0,a0] x [-a1,a1] (or a single interval in 1D).
// Node j along axis a sits at -a + (j + 1/2) h_a; quadrature is the midpoint
// rule with uniform weight h_0*h_1. Flat index is axis-0 major: j0 * n1 + j1.
class QGrid {
 public:
  static QGrid box(int dim, int n_per_axis, double half_width);
  // hookean: half-width = radius_override, or 8/sqrt(H_B) when 0.
  // fene: inscribed tensor box for the |q| < b0 ball, outermost face half a
  //       cell inside, so the potential stays finite at nodes and faces.
  static QGrid for_potential(const Potential& pot_b, int n_per_axis,
                             double radius_override = 0.0);

  int dim() const { return dim_; }
  int n(int axis) const { return n_[static_cast<size_t>(axis)]; }
  int size() const { return size_; }
  double half_width(int axis) const { return half_[static_cast<size_t>(axis)]; }
  double spacing(int axis) const { return h_[static_cast<size_t>(axis)]; }
  double weight() const { return w_; }  // uniform cell volume
  double volume() const { return w_ * size_; }
  double coord(int axis, int j) const { return coords_[static_cast<size_t>(axis)][static_cast<size_t>(j)]; }

  int index(int j0, int j1 = 0) const { return dim_ == 1 ? j0 : j0 * n_[1] + j1; }
  void node(int flat, double* out) const;
  bool same_shape(const QGrid& o) const;

 private:
  int dim_ = 1;
  std::array<int, 2> n_{1, 1};
  std::array<double, 2> half_{0, 0};
  std::array<double, 2> h_{0, 0};
  double w_ = 0;
  int size_ = 0;
  std::array<std::vector<double>, 2> coords_;
};

// quadrature of a raw q-field
double qsum(const QGrid& g, const double* f);
// j = \int q psi dq for a single q-slice; out has g.dim() entries
void first_moment(const QGrid& g, const double* psi, double* out);

}  // namespace micellar
