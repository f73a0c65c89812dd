#include <string>
#include <vector>

#include "doctest.h"
#include "micellar/common.hpp"
#include "micellar/runio.hpp"

using namespace micellar;

TEST_CASE("config text round-trips every key, with comments and blanks") {
  const std::string text =
      "# full configuration\n"
      "d_x = 2\n"
      "d_q = 2\n"
      "n_x = 12\n"
      "n_q = 20\n"
      "\n"
      "box_length = 3.14\n"
      "q_radius = 5.5\n"
      "potential.kind = fene\n"
      "potential.k = 2.0\n"
      "potential.b0 = 7.0\n"
      "mu = 0.5\n"
      "lambda = 0.25\n"
      "k1 = 2.0\n"
      "k2 = 2.0\n"
      "dt = 0.001\n"
      "t_end = 3.5   # trailing comment\n"
      "scheme_order = 1\n"
      "scenario = taylor-green\n"
      "amplitude = 0.05\n"
      "eta = 0.2\n"
      "sobolev_s_max = 1\n"
      "cadence = 5\n"
      "out_dir = /tmp/somewhere\n"
      "seed = 99\n"
      "limiter = true\n"
      "snapshots = true\n";
  const SimConfig c = parse_config_text(text);
  CHECK(c.d_x == 2);
  CHECK(c.d_q == 2);
  CHECK(c.n_x == 12);
  CHECK(c.n_q == 20);
  CHECK(c.box_length == 3.14);
  CHECK(c.q_radius == 5.5);
  CHECK(c.potential_kind == PotentialKind::fene);
  CHECK(c.fene_k == 2.0);
  CHECK(c.fene_b0 == 7.0);
  CHECK(c.mu == 0.5);
  CHECK(c.lambda == 0.25);
  CHECK(c.k1 == 2.0);
  CHECK(c.k2 == 2.0);
  CHECK(c.dt == 0.001);
  CHECK(c.t_end == 3.5);
  CHECK(c.scheme_order == 1);
  CHECK(c.scenario == "taylor-green");
  CHECK(c.amplitude == 0.05);
  CHECK(c.eta == 0.2);
  CHECK(c.sobolev_s_max == 1);
  CHECK(c.cadence == 5);
  CHECK(c.out_dir == "/tmp/somewhere");
  CHECK(c.seed == 99);
  CHECK(c.limiter);
  CHECK(c.snapshots);
}

TEST_CASE("parser errors name the offending key") {
  CHECK_THROWS_WITH_AS(parse_config_text("n_x = 8\nn_q = 16\nscenario = equilibrium\n"),
                       doctest::Contains("t_end"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config_text("bogus_key = 1\n"), doctest::Contains("bogus_key"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(
      parse_config_text("n_x = eight\nn_q = 16\nscenario = equilibrium\nt_end = 1\n"),
      doctest::Contains("n_x"), ConfigError);
  CHECK_THROWS_WITH_AS(
      parse_config_text("n_x = 8\nn_q = 16\nscenario = equilibrium\nt_end = 1\nlimiter = maybe\n"),
      doctest::Contains("limiter"), ConfigError);
  // malformed line without '='
  CHECK_THROWS_AS(parse_config_text("n_x 8\n"), ConfigError);
  // validation failures surface too (n_x too small)
  CHECK_THROWS_AS(parse_config_text("n_x = 2\nn_q = 16\nscenario = equilibrium\nt_end = 1\n"),
                  ConfigError);
}

TEST_CASE("manifest is canonical: stable, order-independent, output-path-blind") {
  const std::string a =
      "n_x = 8\nn_q = 16\nscenario = equilibrium\nt_end = 1\nmu = 0.5\nout_dir = /tmp/a\n";
  const std::string b =
      "mu = 0.5\nt_end = 1\nscenario = equilibrium\nn_q = 16\nn_x = 8\nout_dir = /tmp/b\n";
  const SimConfig ca = parse_config_text(a);
  const SimConfig cb = parse_config_text(b);
  CHECK(canonical_manifest(ca) == canonical_manifest(cb));
  CHECK(manifest_hash(ca) == manifest_hash(cb));
  CHECK(manifest_hash(ca).size() == 16);
  for (char ch : manifest_hash(ca)) CHECK(std::string("0123456789abcdef").find(ch) != std::string::npos);

  // a physics key changes the hash
  SimConfig cc = ca;
  cc.mu = 0.6;
  CHECK(manifest_hash(cc) != manifest_hash(ca));

  // snapshots toggles are presentation, not physics
  SimConfig cd = ca;
  cd.snapshots = true;
  CHECK(manifest_hash(cd) == manifest_hash(ca));
}

TEST_CASE("manifest lists only the active potential parameters") {
  SimConfig c;
  c.n_x = 8;
  c.n_q = 16;
  c.scenario = "equilibrium";
  c.t_end = 1.0;
  const std::string mh = canonical_manifest(c);
  CHECK(mh.find("potential.h_b") != std::string::npos);
  CHECK(mh.find("potential.b0") == std::string::npos);
  c.potential_kind = PotentialKind::fene;
  const std::string mf = canonical_manifest(c);
  CHECK(mf.find("potential.b0") != std::string::npos);
  CHECK(mf.find("potential.h_b") == std::string::npos);
}

TEST_CASE("structural verification suite passes every identity") {
  const auto checks = run_verification(false);
  REQUIRE(checks.size() == 7);
  for (const auto& c : checks) {
    CAPTURE(c.name);
    CAPTURE(c.value);
    CHECK(c.pass);
    CHECK(c.value <= c.threshold);
  }
  // the negative control trips exactly the pairing check
  const auto bad = run_verification(true);
  int fails = 0;
  for (const auto& c : bad)
    if (!c.pass) {
      ++fails;
      CHECK(c.name == "cancellation_residual");
    }
  CHECK(fails == 1);
}
