#include "micellar/xlattice.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "micellar/common.hpp"

namespace micellar {

XLattice::XLattice(int dim, int n_per_axis, double box_length)
    : dim_(dim), n_(n_per_axis), length_(box_length) {
  if (dim != 1 && dim != 2) throw ConfigError("physical dimension must be 1 or 2");
  if (n_per_axis < 2) throw ConfigError("need at least 2 lattice points per axis");
  if (!(box_length > 0.0)) throw ConfigError("box length must be positive");
  size_ = 1;
  for (int a = 0; a < dim; ++a) size_ *= n_;
  h_ = length_ / n_;
  weight_ = std::pow(h_, dim);
  volume_ = std::pow(length_, dim);
}

double VelocityField::max_abs() const {
  double m = 0.0;
  for (const auto& c : comp)
    for (double v : c) m = std::max(m, std::abs(v));
  return m;
}

void VelocityField::zero() {
  for (auto& c : comp) std::fill(c.begin(), c.end(), 0.0);
}

bool VelocityField::is_zero() const {
  for (const auto& c : comp)
    for (double v : c)
      if (v != 0.0) return false;
  return true;
}

}  // namespace micellar
