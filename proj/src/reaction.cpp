#include "micellar/reaction.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "micellar/common.hpp"

namespace micellar {

LinearizedRates linearized_rates(double fa, double fb, double sqrt_mb, const ReactionParams& p) {
  if (p.k1 != p.k2)
    throw ConfigError("linearized reaction rates require k1 == k2 (unit equilibrium constant)");
  const double core = fa - 2.0 * sqrt_mb * fb - fb * fb;
  return {-p.k1 * core, 2.0 * p.k1 * sqrt_mb * core};
}

double reaction_dissipation_node(double psi_a, double psi_b, const ReactionParams& p) {
  if (!(psi_a > 0.0) || !(psi_b > 0.0))
    throw InvariantError("reaction dissipation needs strictly positive densities");
  const double fwd = p.k1 * psi_a;
  const double bwd = p.k2 * psi_b * psi_b;
  const double lo = std::min(fwd, bwd);
  const double hi = std::max(fwd, bwd);
  const double d = hi - lo;
  if (d == 0.0) return 0.0;
  return d * std::log1p(d / lo);  // = (hi-lo) (ln hi - ln lo) >= 0 bitwise
}

double reaction_dissipation(const QGrid& g, const double* psi_a, const double* psi_b,
                            const ReactionParams& p) {
  double acc = 0.0;
  const double w = g.weight();
  for (std::int64_t i = 0; i < g.size(); ++i)
    acc += reaction_dissipation_node(psi_a[i], psi_b[i], p);
  return acc * w;
}

namespace {

// residual of the midpoint equation in the increment delta:
//   g(delta) = delta - dt * r(a0 - delta/2, b0 + delta)
double midpoint_residual(double delta, double a0, double b0, double dt,
                         const ReactionParams& p) {
  const double ma = a0 - 0.5 * delta;
  const double mb = b0 + delta;
  return delta - dt * (p.k1 * ma - p.k2 * mb * mb);
}

}  // namespace

ReactionNodeResult reaction_node_step(double a0, double b0, double dt, const ReactionParams& p,
                                      bool limiter, int depth) {
  if (p.off() || dt == 0.0) return {a0, b0};

  // Newton on g(delta) = 0; g'(delta) = 1 + dt*(k1/2 + 2 k2 (b0 + delta)) > 0
  // for nonnegative states, so the root is unique and Newton is safe.
  double delta = 0.0;
  bool converged = false;
  for (int it = 0; it < 20; ++it) {
    const double g = midpoint_residual(delta, a0, b0, dt, p);
    const double gp = 1.0 + dt * (0.5 * p.k1 + 2.0 * p.k2 * (b0 + delta));
    const double step = g / gp;
    delta -= step;
    if (std::abs(step) <= 1e-12 * (1.0 + std::abs(delta))) {
      converged = true;
      break;
    }
  }
  if (!converged || !std::isfinite(delta)) {
    // bisection fallback on a bracket grown from the explicit rate
    double lo = 0.0, hi = dt * (p.k1 * a0 - p.k2 * b0 * b0);
    if (hi < lo) std::swap(lo, hi);
    double glo = midpoint_residual(lo, a0, b0, dt, p);
    double ghi = midpoint_residual(hi, a0, b0, dt, p);
    int grow = 0;
    while (glo * ghi > 0.0 && grow++ < 200) {
      const double span = std::max(hi - lo, 1e-30);
      lo -= span;
      hi += span;
      glo = midpoint_residual(lo, a0, b0, dt, p);
      ghi = midpoint_residual(hi, a0, b0, dt, p);
    }
    if (glo * ghi > 0.0) throw InvariantError("reaction solve failed to bracket a root");
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double gm = midpoint_residual(mid, a0, b0, dt, p);
      if (gm == 0.0 || hi - lo < 1e-15 * (1.0 + std::abs(mid))) {
        delta = mid;
        break;
      }
      if (glo * gm <= 0.0) {
        hi = mid;
      } else {
        lo = mid;
        glo = gm;
      }
      delta = 0.5 * (lo + hi);
    }
  }

  const double a1 = a0 - delta;
  const double b1 = b0 + 2.0 * delta;
  if (a1 < 0.0 || b1 < 0.0) {
    if (!limiter) {
      throw StepRejection("reaction step lost positivity", 0.5 * dt);
    }
    if (depth >= 40)
      throw InvariantError("reaction limiter exhausted: state cannot stay positive");
    // resolve the same interval as two half-steps of the pointwise ODE
    const ReactionNodeResult half = reaction_node_step(a0, b0, 0.5 * dt, p, limiter, depth + 1);
    return reaction_node_step(half.a, half.b, 0.5 * dt, p, limiter, depth + 1);
  }
  return {a1, b1};
}

void reaction_substep(double* psi_a, double* psi_b, std::int64_t n, double dt,
                      const ReactionParams& p, bool limiter) {
  if (p.off() || dt == 0.0) return;
  parallel_for(n, [&](std::int64_t i) {
    const ReactionNodeResult r = reaction_node_step(psi_a[i], psi_b[i], dt, p, limiter);
    psi_a[i] = r.a;
    psi_b[i] = r.b;
  });
}

double verify_gradient_flow(const double* psi_a, const double* psi_b, std::int64_t n,
                            const ReactionParams& p) {
  double worst = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    const double a = psi_a[i], b = psi_b[i];
    if (!(a > 0.0) || !(b > 0.0))
      throw InvariantError("gradient-flow identity needs strictly positive densities");
    const double fwd = p.k1 * a;
    const double bwd = p.k2 * b * b;
    const double r = fwd - bwd;
    const double lhs = std::log1p(r / bwd);
    const double rhs = std::log(fwd) - std::log(bwd);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

}  // namespace micellar
