#include "micellar/maxwellian.hpp"

#include <cmath>
#include <string>

#include "micellar/common.hpp"

namespace micellar {

Maxwellian Maxwellian::with_constant(const Potential& pot, const QGrid& g, double c) {
  if (pot.dim() != g.dim()) throw InvariantError("potential/grid dimension mismatch");
  Maxwellian m{pot, c, {}, {}};
  m.values.resize(static_cast<size_t>(g.size()));
  m.sqrt_values.resize(static_cast<size_t>(g.size()));
  double q[2];
  for (int i = 0; i < g.size(); ++i) {
    g.node(i, q);
    const double v = c * std::exp(-pot.value(q));
    m.values[static_cast<size_t>(i)] = v;
    m.sqrt_values[static_cast<size_t>(i)] = std::sqrt(v);
  }
  return m;
}

double solve_normalization(double i1, double i2) {
  if (!(i1 >= 0.0) || !(i2 >= 0.0) || (i1 == 0.0 && i2 == 0.0))
    throw InvariantError("normalization integrals must be nonnegative and not both zero");
  if (i2 == 0.0) return 1.0 / i1;  // degenerate linear case
  // positive root, written to avoid cancellation
  const double disc = std::sqrt(i1 * i1 + 8.0 * i2);
  return 2.0 / (i1 + disc);
}

MaxwellianPair normalize_maxwellians(const Potential& pot_b, const QGrid& grid) {
  if (pot_b.species() != Species::B)
    throw InvariantError("normalize_maxwellians expects the species-B potential");
  if (pot_b.dim() != grid.dim()) throw InvariantError("potential/grid dimension mismatch");

  double q[2];
  double i1 = 0.0, i2 = 0.0, peak = 0.0, tail = 0.0;
  for (int i = 0; i < grid.size(); ++i) {
    grid.node(i, q);
    const double e = std::exp(-pot_b.value(q));
    i1 += e;
    i2 += e * e;
    if (e > peak) peak = e;
    // boundary nodes: any axis index at either end
    bool boundary = false;
    if (grid.dim() == 1) {
      boundary = (i == 0 || i == grid.size() - 1);
    } else {
      const int j0 = i / grid.n(1), j1 = i % grid.n(1);
      boundary = j0 == 0 || j0 == grid.n(0) - 1 || j1 == 0 || j1 == grid.n(1) - 1;
    }
    if (boundary && e > tail) tail = e;
  }
  i1 *= grid.weight();
  i2 *= grid.weight();

  if (pot_b.kind() == PotentialKind::hookean && tail > 1e-8 * peak)
    throw ResolutionError(
        "q grid does not resolve the equilibrium tail: boundary/peak = " + std::to_string(tail / peak) +
        " (need < 1e-8); increase n_q or shrink q_radius");

  const double cb = solve_normalization(i1, i2);

  MaxwellianPair mm{Maxwellian{pot_b.partner_a(), cb * cb, {}, {}},
                    Maxwellian::with_constant(pot_b, grid, cb)};
  // A := B^2 nodewise, so sqrt(M_A) == M_B exactly and K_eq == 1 bitwise
  mm.a.values.resize(mm.b.values.size());
  for (size_t i = 0; i < mm.b.values.size(); ++i)
    mm.a.values[i] = mm.b.values[i] * mm.b.values[i];
  mm.a.sqrt_values = mm.b.values;
  return mm;
}

}  // namespace micellar
