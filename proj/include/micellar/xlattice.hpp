#pragma once

#include <cstdint>
#include <vector>

#include "micellar/qgrid.hpp"

namespace micellar {

// periodic cubic lattice in physical space: n points per axis, spacing L/n,
// node i at i*h (axis-0 major flat index)
class XLattice {
 public:
  XLattice(int dim, int n_per_axis, double box_length);

  int dim() const { return dim_; }
  int n() const { return n_; }
  std::int64_t size() const { return size_; }
  double length() const { return length_; }
  double spacing() const { return h_; }
  double weight() const { return weight_; }  // cell volume h^dim
  double volume() const { return volume_; }  // L^dim

  double coord(int j) const { return h_ * j; }
  std::int64_t index(int i0, int i1) const { return static_cast<std::int64_t>(i0) * n_ + i1; }
  std::int64_t index1(int i0) const { return i0; }
  int wrap(int i) const {
    i %= n_;
    return i < 0 ? i + n_ : i;
  }

 private:
  int dim_, n_;
  std::int64_t size_;
  double length_, h_, weight_, volume_;
};

// velocity field u: dim components, each a flat x-lattice scalar
struct VelocityField {
  explicit VelocityField(const XLattice& x)
      : comp(x.dim(), std::vector<double>(x.size(), 0.0)) {}
  std::vector<std::vector<double>> comp;

  double max_abs() const;
  void zero();
  bool is_zero() const;
};

// one species' configuration density psi(x, q): x-major layout,
// slice(ix) is a contiguous q-grid block of length q.size()
struct DistributionField {
  DistributionField(const XLattice& x, const QGrid& q)
      : nx(x.size()), nq(q.size()), data(nx * nq, 0.0) {}
  std::int64_t nx, nq;
  std::vector<double> data;

  double* slice(std::int64_t ix) { return data.data() + ix * nq; }
  const double* slice(std::int64_t ix) const { return data.data() + ix * nq; }
};

}  // namespace micellar
