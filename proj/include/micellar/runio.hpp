#pragma once

#include <string>
#include <vector>

#include "micellar/micromacro.hpp"

namespace micellar {

inline constexpr const char* kVersion = "0.1.0";

// key=value configuration, one entry per line, '#' comments, dotted keys for
// the potential block.  Unknown keys and missing required keys
// (n_x, n_q, scenario, t_end) throw ConfigError naming the key.
SimConfig parse_config_text(const std::string& text);
SimConfig parse_config_file(const std::string& path);

// canonical sorted key=value rendering of a resolved config (output paths
// excluded) and its 64-bit FNV-1a fingerprint, stamped on every output file
std::string canonical_manifest(const SimConfig& cfg);
std::string manifest_hash(const SimConfig& cfg);

struct VerifyCheck {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

// structural identities of the discretization, each reduced to one number
// that must sit at (or below) its roundoff-level threshold.  With
// inject_mismatch the drift-pairing check is run with a deliberately offset
// moment arm and must fail -- a negative control for the harness itself.
std::vector<VerifyCheck> run_verification(bool inject_mismatch);

struct GapOptions {
  PotentialKind kind = PotentialKind::hookean;
  double h_b = 1.0;
  double fene_k = 1.0;
  double fene_b0 = 5.0;
  int d_q = 1;
  int n_q = 64;
  double radius = 0.0;  // 0 = potential default
};

int cmd_run(const std::string& config_path);
int cmd_gap(const GapOptions& opt);
int cmd_verify(bool as_json, bool inject_mismatch);

}  // namespace micellar
