#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "micellar/common.hpp"
#include "micellar/runio.hpp"

int main(int argc, char** argv) {
  CLI::App app{"structure-preserving simulator for reactive micro-macro polymer flows"};
  app.require_subcommand(1);

  std::string config_path;
  CLI::App* run = app.add_subcommand("run", "advance a configured scenario and write diagnostics");
  run->add_option("config", config_path, "key=value config file")->required();

  micellar::GapOptions gap;
  double hook = 1.0;
  std::vector<double> fene;
  CLI::App* gapc = app.add_subcommand(
      "gap", "spectral gap and leading eigenvalues of the configurational operator");
  CLI::Option* oh =
      gapc->add_option("--hookean", hook, "harmonic stiffness of the short species");
  CLI::Option* of = gapc->add_option("--fene", fene,
                                     "finite-extensibility parameters: strength max-extension")
                        ->expected(2);
  oh->excludes(of);
  of->excludes(oh);
  gapc->add_option("--nq", gap.n_q, "nodes per configuration axis");
  gapc->add_option("--dq", gap.d_q, "configuration dimension");
  gapc->add_option("--radius", gap.radius, "half-width override of the configuration box");

  bool as_json = false, inject = false;
  CLI::App* ver = app.add_subcommand("verify", "roundoff-level structural identity checks");
  ver->add_flag("--json", as_json, "machine-readable report");
  ver->add_flag("--inject-mismatch", inject, "offset one quadrature as a negative control");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) return micellar::cmd_run(config_path);
    if (*gapc) {
      if (of->count() > 0) {
        gap.kind = micellar::PotentialKind::fene;
        gap.fene_k = fene[0];
        gap.fene_b0 = fene[1];
      } else {
        gap.kind = micellar::PotentialKind::hookean;
        gap.h_b = hook;
      }
      return micellar::cmd_gap(gap);
    }
    if (*ver) return micellar::cmd_verify(as_json, inject);
  } catch (const micellar::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const micellar::StepRejection& e) {
    std::cerr << "step rejected: " << e.what() << " (suggested dt " << e.suggested_dt << ")\n";
    return 3;
  } catch (const micellar::InvariantError& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
