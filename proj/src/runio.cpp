#include "micellar/runio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "micellar/common.hpp"
#include "micellar/diagnostics.hpp"

namespace micellar {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    size_t idx = 0;
    double d = std::stod(v, &idx);
    if (idx != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': not a number: '" + v + "'");
  }
}

int parse_int(const std::string& key, const std::string& v) {
  try {
    size_t idx = 0;
    long long d = std::stoll(v, &idx);
    if (idx != v.size()) throw std::invalid_argument(v);
    return static_cast<int>(d);
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': not an integer: '" + v + "'");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  try {
    size_t idx = 0;
    unsigned long long d = std::stoull(v, &idx);
    if (idx != v.size()) throw std::invalid_argument(v);
    return static_cast<std::uint64_t>(d);
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': not an unsigned integer: '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "off" || v == "no") return false;
  throw ConfigError("config key '" + key + "': not a boolean: '" + v + "'");
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void ensure_finite(double v, const char* what) {
  if (!std::isfinite(v))
    throw InvariantError(std::string("non-finite ") + what + " -- aborting before writing output");
}

}  // namespace

SimConfig parse_config_text(const std::string& text) {
  SimConfig c;
  bool saw_nx = false, saw_nq = false, saw_scenario = false, saw_tend = false;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value, got '" +
                        line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key or value");

    if (key == "d_x")
      c.d_x = parse_int(key, val);
    else if (key == "d_q")
      c.d_q = parse_int(key, val);
    else if (key == "n_x") {
      c.n_x = parse_int(key, val);
      saw_nx = true;
    } else if (key == "n_q") {
      c.n_q = parse_int(key, val);
      saw_nq = true;
    } else if (key == "box_length")
      c.box_length = parse_double(key, val);
    else if (key == "q_radius")
      c.q_radius = parse_double(key, val);
    else if (key == "potential.kind") {
      if (val == "hookean")
        c.potential_kind = PotentialKind::hookean;
      else if (val == "fene")
        c.potential_kind = PotentialKind::fene;
      else
        throw ConfigError("config key 'potential.kind': unknown kind '" + val + "'");
    } else if (key == "potential.h_b")
      c.h_b = parse_double(key, val);
    else if (key == "potential.k")
      c.fene_k = parse_double(key, val);
    else if (key == "potential.b0")
      c.fene_b0 = parse_double(key, val);
    else if (key == "mu")
      c.mu = parse_double(key, val);
    else if (key == "lambda")
      c.lambda = parse_double(key, val);
    else if (key == "k1")
      c.k1 = parse_double(key, val);
    else if (key == "k2")
      c.k2 = parse_double(key, val);
    else if (key == "dt")
      c.dt = parse_double(key, val);
    else if (key == "t_end") {
      c.t_end = parse_double(key, val);
      saw_tend = true;
    } else if (key == "scheme_order")
      c.scheme_order = parse_int(key, val);
    else if (key == "scenario") {
      c.scenario = val;
      saw_scenario = true;
    } else if (key == "amplitude")
      c.amplitude = parse_double(key, val);
    else if (key == "eta")
      c.eta = parse_double(key, val);
    else if (key == "sobolev_s_max")
      c.sobolev_s_max = parse_int(key, val);
    else if (key == "cadence")
      c.cadence = parse_int(key, val);
    else if (key == "out_dir")
      c.out_dir = val;
    else if (key == "seed")
      c.seed = parse_u64(key, val);
    else if (key == "limiter")
      c.limiter = parse_bool(key, val);
    else if (key == "snapshots")
      c.snapshots = parse_bool(key, val);
    else
      throw ConfigError("unknown config key: '" + key + "'");
  }
  if (!saw_nx) throw ConfigError("missing required config key: n_x");
  if (!saw_nq) throw ConfigError("missing required config key: n_q");
  if (!saw_scenario) throw ConfigError("missing required config key: scenario");
  if (!saw_tend) throw ConfigError("missing required config key: t_end");
  c.validate();
  return c;
}

SimConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string canonical_manifest(const SimConfig& c) {
  std::map<std::string, std::string> kv;
  kv["d_x"] = std::to_string(c.d_x);
  kv["d_q"] = std::to_string(c.d_q);
  kv["n_x"] = std::to_string(c.n_x);
  kv["n_q"] = std::to_string(c.n_q);
  kv["box_length"] = fmt17(c.box_length);
  kv["q_radius"] = fmt17(c.q_radius);
  kv["potential.kind"] = c.potential_kind == PotentialKind::hookean ? "hookean" : "fene";
  if (c.potential_kind == PotentialKind::hookean) {
    kv["potential.h_b"] = fmt17(c.h_b);
  } else {
    kv["potential.k"] = fmt17(c.fene_k);
    kv["potential.b0"] = fmt17(c.fene_b0);
  }
  kv["mu"] = fmt17(c.mu);
  kv["lambda"] = fmt17(c.lambda);
  kv["k1"] = fmt17(c.k1);
  kv["k2"] = fmt17(c.k2);
  kv["dt"] = fmt17(c.dt);
  kv["t_end"] = fmt17(c.t_end);
  kv["scheme_order"] = std::to_string(c.scheme_order);
  kv["scenario"] = c.scenario;
  kv["amplitude"] = fmt17(c.amplitude);
  kv["eta"] = fmt17(c.eta);
  kv["sobolev_s_max"] = std::to_string(c.sobolev_s_max);
  kv["cadence"] = std::to_string(c.cadence);
  kv["seed"] = std::to_string(c.seed);
  kv["limiter"] = c.limiter ? "true" : "false";
  std::string out;
  for (const auto& [k, v] : kv) {
    out += k;
    out += '=';
    out += v;
    out += '\n';
  }
  return out;
}

std::string manifest_hash(const SimConfig& c) { return hex64(fnv1a64(canonical_manifest(c))); }

namespace {

void write_snapshot(const std::filesystem::path& dir, const std::string& stem,
                    const double* data, const std::vector<std::int64_t>& shape,
                    const std::string& hash, double t) {
  std::int64_t count = 1;
  for (std::int64_t s : shape) count *= s;
  const std::filesystem::path bin = dir / (stem + ".bin");
  std::ofstream out(bin, std::ios::binary);
  if (!out) throw InvariantError("cannot open snapshot file: " + bin.string());
  out.write(reinterpret_cast<const char*>(data),
            static_cast<std::streamsize>(count * static_cast<std::int64_t>(sizeof(double))));
  if (!out) throw InvariantError("short write on snapshot file: " + bin.string());
  json side;
  side["file"] = stem + ".bin";
  side["dtype"] = "float64";
  side["endianness"] = "little";
  side["order"] = "x-major (flat x index outer, q index inner)";
  side["shape"] = shape;
  side["manifest"] = hash;
  side["t"] = t;
  side["version"] = kVersion;
  std::ofstream sj(dir / (stem + ".json"));
  sj << side.dump(2) << "\n";
}

json energy_json(const EnergyReport& e) {
  return json{{"kinetic", e.kinetic},   {"free_energy", e.free_energy}, {"total", e.total},
              {"d_u", e.d_u},           {"d_micro", e.d_micro},         {"d_r", e.d_r},
              {"residual", e.residual}};
}

json sobolev_json(const SobolevReport& r) {
  return json{{"s", r.s},
              {"eta", r.eta},
              {"e_x", r.e_x},
              {"d_x", r.d_x},
              {"e_rho", r.e_rho},
              {"d_rho", r.d_rho},
              {"e_j", r.e_j},
              {"d_j", r.d_j},
              {"e_mix", r.e_mix},
              {"d_mix", r.d_mix},
              {"e_total", r.e_total},
              {"d_total", r.d_total},
              {"e_plain", r.e_plain},
              {"d_plain", r.d_plain},
              {"part_fluid", r.part_fluid},
              {"part_rho", r.part_rho},
              {"part_fp", r.part_fp},
              {"part_moment", r.part_moment},
              {"part_reaction", r.part_reaction},
              {"equiv_upper", r.equiv_upper},
              {"equiv_lower", r.equiv_lower}};
}

}  // namespace

int cmd_run(const std::string& config_path) {
  const SimConfig cfg = parse_config_file(config_path);
  const std::string hash = manifest_hash(cfg);
  Simulator sim(cfg);
  SimState st = sim.init_scenario();
  Diagnostics diag(sim);

  const double mass0 = sim.total_mass(st);
  const double dt = cfg.dt > 0.0 ? cfg.dt : sim.default_dt(st);
  const int smax = cfg.sobolev_s_max;

  const std::filesystem::path dir(cfg.out_dir);
  std::filesystem::create_directories(dir);
  std::ofstream csv(dir / "timeseries.csv");
  if (!csv) throw ConfigError("cannot open output file in out_dir: " + cfg.out_dir);
  csv << "# manifest=" << hash << " version=" << kVersion << "\n";
  csv << "t,kinetic,free_energy,total_energy,D_u,D_micro,D_R,mass_rel_err,"
         "rho_constraint_max,E0,D0,E1,D1,E2,D2,cancel_residual\n";

  EnergyReport e = diag.energy(st);
  double total_prev = e.total;
  double diss_prev = e.d_u + e.d_micro + e.d_r;
  const double mono_tol = 1e-13 * std::abs(e.total) + 1e-25;
  long violations = 0;
  double mass_err_max = 0.0, rho_max = 0.0, residual_last = 0.0;
  std::vector<double> fit_t, fit_f;

  const auto emit = [&](const SimState& s, const EnergyReport& er) {
    const double merr = diag.mass_rel_err(s, mass0);
    const double rconst = diag.rho_constraint_max(s);
    mass_err_max = std::max(mass_err_max, merr);
    rho_max = std::max(rho_max, rconst);
    double es[3] = {0, 0, 0}, ds[3] = {0, 0, 0};
    for (int so = 0; so <= std::min(2, smax); ++so) {
      const SobolevReport sr = diag.sobolev(s, so);
      es[so] = sr.e_total;
      ds[so] = sr.d_total;
    }
    const double cancel = std::max(diag.cancellation_residual(s, Species::A),
                                   diag.cancellation_residual(s, Species::B));
    const double row[16] = {s.t,   er.kinetic, er.free_energy, er.total, er.d_u,  er.d_micro,
                            er.d_r, merr,       rconst,         es[0],    ds[0],   es[1],
                            ds[1],  es[2],      ds[2],          cancel};
    for (double v : row) ensure_finite(v, "timeseries value");
    for (int i = 0; i < 16; ++i) csv << (i ? "," : "") << fmt17(row[i]);
    csv << "\n";
    fit_t.push_back(s.t);
    fit_f.push_back(er.free_energy);
  };

  emit(st, e);

  const double t_eps = 1e-12 * std::max(1.0, cfg.t_end);
  long step = 0;
  while (st.t < cfg.t_end - t_eps) {
    const double h = std::min(dt, cfg.t_end - st.t);
    sim.step(st, h);
    ++step;
    e = diag.energy(st);
    ensure_finite(e.total, "energy");
    const double diss = e.d_u + e.d_micro + e.d_r;
    e.residual = (e.total - total_prev) / h + 0.5 * (diss_prev + diss);
    residual_last = e.residual;
    if (e.total > total_prev + mono_tol) ++violations;
    total_prev = e.total;
    diss_prev = diss;
    if (step % cfg.cadence == 0 || !(st.t < cfg.t_end - t_eps)) emit(st, e);
  }
  csv.close();

  if (cfg.snapshots) {
    const std::vector<std::int64_t> fshape = {st.psi_a.nx, st.psi_a.nq};
    write_snapshot(dir, "psi_a", st.psi_a.data.data(), fshape, hash, st.t);
    write_snapshot(dir, "psi_b", st.psi_b.data.data(), fshape, hash, st.t);
    for (int c = 0; c < sim.lattice().dim(); ++c)
      write_snapshot(dir, "u" + std::to_string(c), st.u.comp[static_cast<size_t>(c)].data(),
                     {sim.lattice().size()}, hash, st.t);
  }

  json summary;
  summary["version"] = kVersion;
  summary["manifest"] = hash;
  {
    json cj;
    std::istringstream mf(canonical_manifest(cfg));
    std::string line;
    while (std::getline(mf, line)) {
      const size_t eq = line.find('=');
      cj[line.substr(0, eq)] = line.substr(eq + 1);
    }
    summary["config"] = cj;
  }
  summary["dt"] = dt;
  summary["steps"] = step;
  summary["t_final"] = st.t;
  e.residual = residual_last;
  summary["final"] = json{{"energy", energy_json(e)}};
  {
    json sob = json::array();
    for (int so = 0; so <= std::min(2, smax); ++so) sob.push_back(sobolev_json(diag.sobolev(st, so)));
    summary["final"]["sobolev"] = sob;
    summary["final"]["cancel_residual"] =
        std::max(diag.cancellation_residual(st, Species::A),
                 diag.cancellation_residual(st, Species::B));
  }
  summary["free_energy_final"] = e.free_energy;
  summary["violations"] = json{{"energy_monotonicity", violations}};
  summary["invariants"] = json{{"mass_rel_err_max", mass_err_max},
                               {"rho_constraint_max", rho_max},
                               {"min_density", sim.min_density(st)}};
  bool fit_ok = fit_f.size() >= 4;
  for (double v : fit_f)
    if (!(v > 0.0)) fit_ok = false;
  if (fit_ok) {
    const auto [rate, r2] = fit_decay(fit_t, fit_f);
    summary["fitted"] = json{{"free_energy_rate", rate}, {"r_squared", r2}};
  } else {
    summary["fitted"] = nullptr;
  }
  std::ofstream sj(dir / "summary.json");
  if (!sj) throw ConfigError("cannot open summary file in out_dir: " + cfg.out_dir);
  sj << summary.dump(2) << "\n";

  std::cout << "run finished: t=" << fmt17(st.t) << " steps=" << step
            << " free_energy=" << fmt17(e.free_energy) << " out=" << dir.string() << "\n";
  return 0;
}

int cmd_gap(const GapOptions& o) {
  const Potential pb = o.kind == PotentialKind::hookean
                           ? Potential::hookean(o.d_q, o.h_b)
                           : Potential::fene(o.d_q, o.fene_k, o.fene_b0);
  const QGrid g = QGrid::for_potential(pb, o.n_q, o.radius);
  const MaxwellianPair m = normalize_maxwellians(pb, g);
  const FokkerPlanckOperator fp(g, m.b);
  json out;
  out["lambda0"] = fp.spectral_gap();
  out["eigs"] = fp.eigenvalues(5);
  std::cout << out.dump(2) << "\n";
  return 0;
}

std::vector<VerifyCheck> run_verification(bool inject_mismatch) {
  std::vector<VerifyCheck> out;
  const auto add = [&out](const std::string& name, double value, double threshold) {
    out.push_back({name, value, threshold, value <= threshold});
  };

  const Potential pb = Potential::hookean(1, 1.0);
  const QGrid g = QGrid::for_potential(pb, 64);
  const MaxwellianPair m = normalize_maxwellians(pb, g);
  const ReactionParams rp{1.0, 1.0};

  {
    // forward and backward rates coincide bitwise on the equilibrium pair
    double worst = 0.0;
    for (std::int64_t i = 0; i < g.size(); ++i)
      worst = std::max(worst, std::abs(lma_rate(m.a.values[static_cast<size_t>(i)],
                                                m.b.values[static_cast<size_t>(i)], rp)));
    add("detailed_balance", worst, 0.0);
  }
  {
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> u(0.1, 2.0);
    const std::int64_t n = 512;
    std::vector<double> a(static_cast<size_t>(n)), b(static_cast<size_t>(n));
    for (auto& v : a) v = u(rng);
    for (auto& v : b) v = u(rng);
    add("gradient_flow_identity", verify_gradient_flow(a.data(), b.data(), n, rp), 1e-12);
  }
  {
    // <L f, h> == <f, L h> in the weighted inner product, up to roundoff
    const FokkerPlanckOperator fp(g, m.b);
    std::mt19937_64 rng(777);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const size_t n = static_cast<size_t>(g.size());
    std::vector<double> f(n), h(n), lf(n), lh(n);
    for (auto& v : f) v = u(rng);
    for (auto& v : h) v = u(rng);
    fp.apply_fluctuation(f.data(), lf.data());
    fp.apply_fluctuation(h.data(), lh.data());
    double a = 0.0, b = 0.0, nf = 0.0, nh = 0.0;
    for (size_t i = 0; i < n; ++i) {
      a += lf[i] * h[i];
      b += f[i] * lh[i];
      nf += f[i] * f[i];
      nh += h[i] * h[i];
    }
    add("fp_self_adjoint", std::abs(a - b) / std::sqrt(nf * nh), 1e-12);
  }
  {
    // the discrete generator annihilates its own equilibrium bitwise
    const FokkerPlanckOperator fpb(g, m.b);
    const FokkerPlanckOperator fpa(g, m.a);
    const size_t n = static_cast<size_t>(g.size());
    std::vector<double> outv(n);
    double worst = 0.0;
    fpb.apply_density(m.b.values.data(), outv.data());
    for (double v : outv) worst = std::max(worst, std::abs(v));
    fpa.apply_density(m.a.values.data(), outv.data());
    for (double v : outv) worst = std::max(worst, std::abs(v));
    add("equilibrium_annihilation", worst, 0.0);
  }
  {
    // 2 psi_A + psi_B drift across implicit kinetics steps, in ulps
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> ud(0.1, 3.0);
    std::uniform_real_distribution<double> ut(1e-3, 0.5);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
      const double a0 = ud(rng), b0 = ud(rng), h = ut(rng);
      const ReactionNodeResult r = reaction_node_step(a0, b0, h, rp, true);
      const double m0 = 2.0 * a0 + b0;
      const double m1 = 2.0 * r.a + r.b;
      const double ulp = std::nextafter(m0, std::numeric_limits<double>::infinity()) - m0;
      worst = std::max(worst, std::abs(m1 - m0) / ulp);
    }
    add("reaction_mass_exact", worst, 2.0);
  }
  {
    // re-associated quadratures of the drift-potential pairing
    SimConfig c;
    c.d_x = 2;
    c.d_q = 2;
    c.n_x = 8;
    c.n_q = 16;
    c.scenario = "random-smooth";
    c.amplitude = 1e-2;
    c.seed = 7;
    c.t_end = 1.0;
    Simulator sim(c);
    const SimState st = sim.init_scenario();
    const Diagnostics diag(sim);
    const double r = std::max(diag.cancellation_residual(st, Species::A, inject_mismatch),
                              diag.cancellation_residual(st, Species::B, inject_mismatch));
    add("cancellation_residual", r, 1e-11);
  }
  {
    // number-density constraint 2 rho_A + rho_B after a few coupled steps
    SimConfig c;
    c.d_x = 1;
    c.d_q = 1;
    c.n_x = 16;
    c.n_q = 64;
    c.scenario = "kernel-bump";
    c.amplitude = 1e-2;
    c.t_end = 1.0;
    Simulator sim(c);
    SimState st = sim.init_scenario();
    const Diagnostics diag(sim);
    const double h = sim.default_dt(st);
    for (int k = 0; k < 5; ++k) sim.step(st, h);
    add("rho_constraint", diag.rho_constraint_max(st), 1e-13);
  }
  return out;
}

int cmd_verify(bool as_json, bool inject_mismatch) {
  const std::vector<VerifyCheck> checks = run_verification(inject_mismatch);
  bool all = true;
  if (as_json) {
    json arr = json::array();
    for (const auto& c : checks) {
      arr.push_back(json{{"name", c.name},
                         {"value", c.value},
                         {"threshold", c.threshold},
                         {"pass", c.pass}});
      all = all && c.pass;
    }
    json doc;
    doc["version"] = kVersion;
    doc["inject_mismatch"] = inject_mismatch;
    doc["checks"] = arr;
    doc["pass"] = all;
    std::cout << doc.dump(2) << "\n";
  } else {
    for (const auto& c : checks) {
      std::printf("%-26s %12.5e  (<= %.5e)  %s\n", c.name.c_str(), c.value, c.threshold,
                  c.pass ? "PASS" : "FAIL");
      all = all && c.pass;
    }
    std::printf("verify: %s\n", all ? "all checks passed" : "FAILURES present");
  }
  return all ? 0 : 1;
}

}  // namespace micellar
