#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "micellar/common.hpp"
#include "micellar/maxwellian.hpp"
#include "micellar/potential.hpp"
#include "micellar/qgrid.hpp"
#include "micellar/reaction.hpp"

using namespace micellar;

TEST_CASE("rate vanishes bitwise at detailed balance psi_A = psi_B^2") {
  const ReactionParams p{1.0, 1.0};
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(1e-8, 10.0);
  for (int i = 0; i < 1000; ++i) {
    const double b = u(rng);
    CHECK(lma_rate(b * b, b, p) == 0.0);
  }
}

TEST_CASE("implicit node step conserves 2a+b to a couple of ulps") {
  const ReactionParams p{1.0, 1.0};
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.01, 4.0);
  for (int i = 0; i < 500; ++i) {
    const double a0 = u(rng), b0 = u(rng);
    const double inv0 = 2.0 * a0 + b0;
    const auto r = reaction_node_step(a0, b0, 0.05, p, false);
    const double inv1 = 2.0 * r.a + r.b;
    CHECK(std::abs(inv1 - inv0) <= 2.0 * std::abs(inv0) * 2.220446049250313e-16);
    CHECK(r.a > 0.0);
    CHECK(r.b > 0.0);
  }
}

TEST_CASE("pointwise ode relaxes (2, 0) to the mass-action fixed point") {
  const ReactionParams p{1.0, 1.0};
  double a = 2.0, b = 0.0;
  const double dt = 0.05;
  for (int i = 0; i < 800; ++i) {
    const auto r = reaction_node_step(a, b, dt, p, false);
    a = r.a;
    b = r.b;
  }
  const double b_star = (-1.0 + std::sqrt(33.0)) / 4.0;
  CHECK(b == doctest::Approx(b_star).epsilon(1e-9));
  CHECK(a == doctest::Approx(b_star * b_star).epsilon(1e-9));
  CHECK(2.0 * a + b == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("node step leaves an equilibrium pair exactly fixed") {
  const ReactionParams p{1.0, 1.0};
  const auto r = reaction_node_step(1.21, 1.1, 0.5, p, false);
  CHECK(r.a == 1.21);
  CHECK(r.b == 1.1);
}

TEST_CASE("gradient-flow identity holds pointwise at roundoff") {
  const ReactionParams p{1.0, 1.0};
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(1e-6, 5.0);
  std::vector<double> a(256), b(256);
  for (size_t i = 0; i < a.size(); ++i) {
    a[i] = u(rng);
    b[i] = u(rng);
  }
  CHECK(verify_gradient_flow(a.data(), b.data(), 256, p) < 1e-12);
}

TEST_CASE("reaction dissipation integrand is nonnegative and vanishes only at balance") {
  const ReactionParams p{1.0, 1.0};
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(1e-4, 5.0);
  for (int i = 0; i < 500; ++i) {
    const double a = u(rng), b = u(rng);
    CHECK(reaction_dissipation_node(a, b, p) >= 0.0);
  }
  CHECK(reaction_dissipation_node(1.44, 1.2, p) == 0.0);
  // slice quadrature includes the q-cell weight
  const QGrid g = QGrid::box(1, 4, 1.0);
  std::vector<double> pa(4, 2.0), pb(4, 1.0);
  const double node = reaction_dissipation_node(2.0, 1.0, p);
  CHECK(reaction_dissipation(g, pa.data(), pb.data(), p) ==
        doctest::Approx(4.0 * g.weight() * node).epsilon(1e-14));
}

TEST_CASE("dissipation rejects nonpositive mass-action rates") {
  const ReactionParams p{1.0, 1.0};
  CHECK_THROWS_AS(reaction_dissipation_node(0.0, 1.0, p), InvariantError);
  CHECK_THROWS_AS(reaction_dissipation_node(1.0, -0.5, p), InvariantError);
}

TEST_CASE("linearized rates require equal constants and share one core factor") {
  CHECK_THROWS_AS(linearized_rates(0.1, 0.2, 0.5, ReactionParams{1.0, 2.0}), ConfigError);
  const ReactionParams p{1.5, 1.5};
  const double fa = 0.3, fb = -0.2, smb = 0.8;
  const auto lr = linearized_rates(fa, fb, smb, p);
  const double core = fa - 2.0 * smb * fb - fb * fb;
  CHECK(lr.r_a == doctest::Approx(-1.5 * core).epsilon(1e-15));
  CHECK(lr.r_b == doctest::Approx(2.0 * 1.5 * smb * core).epsilon(1e-15));
}

TEST_CASE("positivity loss: limiter subdivides, otherwise rejects with half step") {
  // strong backward rate drives psi_A negative in one unlimited step
  const ReactionParams p{0.0, 50.0};
  const double a0 = 1e-3, b0 = 2.0, dt = 0.5;
  bool threw = false;
  try {
    reaction_node_step(a0, b0, dt, p, false);
  } catch (const StepRejection& e) {
    threw = true;
    CHECK(e.suggested_dt == doctest::Approx(0.25).epsilon(1e-15));
  }
  CHECK(threw);
  const auto r = reaction_node_step(a0, b0, dt, p, true);
  CHECK(r.a > 0.0);
  CHECK(r.b > 0.0);
  CHECK(2.0 * r.a + r.b == doctest::Approx(2.0 * a0 + b0).epsilon(1e-13));
}

TEST_CASE("vectorized substep matches the scalar node step bitwise") {
  const ReactionParams p{1.0, 1.0};
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.05, 3.0);
  std::vector<double> a(64), b(64), a0(64), b0(64);
  for (size_t i = 0; i < a.size(); ++i) {
    a[i] = a0[i] = u(rng);
    b[i] = b0[i] = u(rng);
  }
  reaction_substep(a.data(), b.data(), 64, 0.1, p, false);
  for (size_t i = 0; i < a.size(); ++i) {
    const auto r = reaction_node_step(a0[i], b0[i], 0.1, p, false);
    CHECK(a[i] == r.a);
    CHECK(b[i] == r.b);
  }
}

TEST_CASE("node step handles a zero species-B entry") {
  const ReactionParams p{1.0, 1.0};
  const auto r = reaction_node_step(2.0, 0.0, 0.02, p, false);
  CHECK(r.a < 2.0);
  CHECK(r.b > 0.0);
  CHECK(2.0 * r.a + r.b == doctest::Approx(4.0).epsilon(1e-15));
}
