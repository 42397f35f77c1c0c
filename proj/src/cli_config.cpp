#include "hgate/cli_config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "hgate/error.hpp"
#include "hgate/report.hpp"

namespace hgate {
namespace {

using nlohmann::json;

void check_keys(const json& j, const std::set<std::string>& allowed,
                const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw InvalidInput("config: unknown key '" + it.key() + "' in " + where);
}

ScanVar scan_var_from_string(const std::string& s) {
  if (s == "xi") return ScanVar::Xi;
  if (s == "alpha") return ScanVar::Alpha;
  if (s == "beta") return ScanVar::Beta;
  throw InvalidInput("config: unknown scan variable '" + s + "'");
}

}  // namespace

RunConfig parse_config_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("config: JSON parse error: ") + e.what());
  }
  if (!j.is_object()) throw InvalidInput("config: top level must be an object");

  check_keys(j,
             {"preset", "nu", "mu", "p", "energy_damp", "shear", "damping",
              "forcing", "forcing_const", "window", "zero_threshold",
              "line_tol", "plane_tol", "beta", "beta_grid", "eps", "seed",
              "out", "verify_window", "verify_nodes", "verify_seed_phase", "scan",
              "c5_enforce_decay"},
             "top level");

  RunConfig cfg;
  auto get = [&](const char* key, auto& dst) {
    if (j.contains(key)) dst = j.at(key).get<std::decay_t<decltype(dst)>>();
  };
  get("preset", cfg.preset);
  get("nu", cfg.nu);
  get("mu", cfg.mu);
  get("p", cfg.p);
  get("energy_damp", cfg.energy_damp);
  get("shear", cfg.shear);
  get("damping", cfg.damping);
  get("forcing", cfg.forcing);
  get("forcing_const", cfg.forcing_const);
  get("window", cfg.window);
  get("zero_threshold", cfg.zero_threshold);
  get("line_tol", cfg.line_tol);
  get("plane_tol", cfg.plane_tol);
  get("beta", cfg.beta);
  get("beta_grid", cfg.beta_grid);
  get("eps", cfg.eps);
  get("seed", cfg.seed);
  get("out", cfg.out_dir);
  get("verify_window", cfg.verify_window);
  get("verify_nodes", cfg.verify_nodes);
  get("verify_seed_phase", cfg.verify_seed_phase);
  get("c5_enforce_decay", cfg.c5_enforce_decay);
  if (j.contains("scan")) {
    const json& s = j.at("scan");
    check_keys(s, {"var", "lo", "hi", "samples", "xi", "alpha", "beta"},
               "scan");
    if (s.contains("var"))
      cfg.scan.var = scan_var_from_string(s.at("var").get<std::string>());
    if (s.contains("lo")) cfg.scan.lo = s.at("lo").get<double>();
    if (s.contains("hi")) cfg.scan.hi = s.at("hi").get<double>();
    if (s.contains("samples")) cfg.scan.samples = s.at("samples").get<int>();
    if (s.contains("xi")) cfg.scan.xi = s.at("xi").get<double>();
    if (s.contains("alpha")) cfg.scan.alpha = s.at("alpha").get<double>();
    if (s.contains("beta")) cfg.scan.beta = s.at("beta").get<double>();
  }

  // Downstream preconditions, rejected here with a parse-time diagnostic.
  if (!(cfg.nu > 0.0) || !(cfg.mu > 0.0) || cfg.p < 2)
    throw InvalidInput("config: need nu > 0, mu > 0, p >= 2");
  if (!(cfg.window > 0.0)) throw InvalidInput("config: window must be > 0");
  if (cfg.verify_nodes < 3)
    throw InvalidInput("config: verify_nodes must be >= 3");
  if (!(cfg.zero_threshold > 0.0) || !(cfg.line_tol > 0.0) ||
      !(cfg.plane_tol > 0.0))
    throw InvalidInput("config: tolerances must be > 0");
  if (!std::isfinite(cfg.beta)) throw InvalidInput("config: beta not finite");
  for (double e : cfg.eps)
    if (std::abs(e) > 0.5)
      throw InvalidInput("config: |epsilon| <= 0.5 required");
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_json(ss.str());
}

std::string config_to_json(const RunConfig& cfg) {
  json j;
  j["preset"] = cfg.preset;
  j["nu"] = cfg.nu;
  j["mu"] = cfg.mu;
  j["p"] = cfg.p;
  j["energy_damp"] = cfg.energy_damp;
  j["shear"] = cfg.shear;
  j["damping"] = cfg.damping;
  j["forcing"] = cfg.forcing;
  j["forcing_const"] = cfg.forcing_const;
  j["window"] = cfg.window;
  j["zero_threshold"] = cfg.zero_threshold;
  j["line_tol"] = cfg.line_tol;
  j["plane_tol"] = cfg.plane_tol;
  j["beta"] = cfg.beta;
  j["beta_grid"] = cfg.beta_grid;
  j["eps"] = cfg.eps;
  j["seed"] = cfg.seed;
  j["out"] = cfg.out_dir;
  j["verify_window"] = cfg.verify_window;
  j["verify_nodes"] = cfg.verify_nodes;
  j["verify_seed_phase"] = cfg.verify_seed_phase;
  j["scan"] = {{"var", to_string(cfg.scan.var)}, {"lo", cfg.scan.lo},
               {"hi", cfg.scan.hi},             {"samples", cfg.scan.samples},
               {"xi", cfg.scan.xi},             {"alpha", cfg.scan.alpha},
               {"beta", cfg.scan.beta}};
  j["c5_enforce_decay"] = cfg.c5_enforce_decay;
  return j.dump(2);
}

BuiltSystem build_preset(const RunConfig& cfg) {
  BuiltSystem out;
  const Forcing forcing = forcing_by_name(cfg.forcing, cfg.forcing_const);
  if (cfg.preset == "powerlaw") {
    out.sys = powerlaw_system(cfg.nu, cfg.mu, cfg.p).with_forcing(forcing);
    out.orbit = powerlaw_homoclinic(cfg.nu, cfg.mu, cfg.p);
  } else if (cfg.preset == "powerlaw-energy-damped") {
    out.sys = powerlaw_energy_damped_system(cfg.nu, cfg.mu, cfg.p,
                                            cfg.energy_damp)
                  .with_forcing(forcing);
    // The damping term vanishes on the energy level of the loop, so the
    // closed-form orbit is a trajectory of this field as well.
    out.orbit = powerlaw_homoclinic(cfg.nu, cfg.mu, cfg.p);
    out.orbit.label += "#energy-damped";
  } else if (cfg.preset == "powerlaw-sheared") {
    out.sys = powerlaw_sheared_system(cfg.nu, cfg.mu, cfg.p, cfg.shear)
                  .with_forcing(forcing);
    const Mat2 P{1.0, cfg.shear, 0.0, 1.0};
    out.orbit = map_orbit(powerlaw_homoclinic(cfg.nu, cfg.mu, cfg.p), P);
  } else if (cfg.preset == "powerlaw-damped") {
    out.sys = powerlaw_damped_system(cfg.nu, cfg.mu, cfg.p, cfg.damping)
                  .with_forcing(forcing);
    out.orbit = powerlaw_homoclinic(cfg.nu, cfg.mu, cfg.p);
    out.reference_orbit = true;
    out.note =
        "experimental: reference orbit of the undamped field; condition "
        "values are frame diagnostics, not orbit statements";
  } else {
    throw InvalidInput("unknown preset: " + cfg.preset);
  }
  return out;
}

namespace {

VariationalFrame frame_for(const RunConfig& cfg, const BuiltSystem& built) {
  FrameOptions fopt;
  fopt.reference_orbit_mode = built.reference_orbit;
  return build_frame(built.sys, built.orbit, cfg.window, fopt);
}

ConditionOptions condition_options(const RunConfig& cfg) {
  ConditionOptions copt;
  copt.beta = cfg.beta;
  copt.thresholds.zero_threshold = cfg.zero_threshold;
  copt.thresholds.line_tol = cfg.line_tol;
  copt.thresholds.plane_tol = cfg.plane_tol;
  copt.seed = cfg.seed;
  copt.c5_enforce_decay = cfg.c5_enforce_decay;
  return copt;
}

std::filesystem::path ensure_out_dir(const RunConfig& cfg) {
  std::filesystem::path dir(cfg.out_dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

int run_analyze(const RunConfig& cfg) {
  const BuiltSystem built = build_preset(cfg);
  const VariationalFrame frame = frame_for(cfg, built);
  ConditionOptions copt = condition_options(cfg);
  const ConditionReport rep = evaluate_conditions(frame, copt);

  const auto dir = ensure_out_dir(cfg);
  write_file((dir / "report.json").string(),
             condition_report_json(rep, frame, config_to_json(cfg)));
  std::string text = condition_report_text(rep);
  if (!built.note.empty()) text += "note: " + built.note + "\n";
  write_file((dir / "report.txt").string(), text);
  write_file((dir / "resolved_config.json").string(),
             config_to_json(cfg) + "\n");

  if (!cfg.beta_grid.empty()) {
    std::ostringstream os;
    os << "beta,F1,F1_prime,F4_1,F4_3,F4_1_prime,F4_3_prime\r\n";
    os.precision(17);
    for (double b : cfg.beta_grid) {
      ConditionOptions bopt = copt;
      bopt.beta = b;
      const CondScalar f1p = cond_C1p(frame, b, bopt.thresholds);
      const C4Result c4 = cond_C4(frame, b, bopt.thresholds);
      const C4Result c4p = cond_C4p(frame, b, bopt.thresholds);
      os << b << "," << rep.F1.quad.value << "," << f1p.quad.value << ","
         << c4.f1.quad.value << "," << c4.f3.quad.value << ","
         << c4p.f1.quad.value << "," << c4p.f3.quad.value << "\r\n";
    }
    write_file((dir / "beta_sweep.csv").string(), os.str());
  }
  return 0;
}

int run_verify(const RunConfig& cfg) {
  const BuiltSystem built = build_preset(cfg);
  if (built.reference_orbit)
    throw InvalidInput(
        "verify: the experimental reference-orbit preset has no orbit to "
        "verify against");

  VerifyOptions vopt;
  vopt.window_T = cfg.verify_window;
  vopt.nodes = cfg.verify_nodes;
  vopt.seed_phase = cfg.verify_seed_phase;

  const auto dir = ensure_out_dir(cfg);
  std::vector<SweepRow> rows;
  std::vector<double> log_eps, log_dist;
  for (std::size_t i = 0; i < cfg.eps.size(); ++i) {
    const double eps = cfg.eps[i];
    const VerifyResult res = direct_verify(built.sys, built.orbit, eps, vopt);
    rows.push_back({eps, res.found ? res.distance : -1.0, res.found});
    if (res.found) {
      std::ostringstream csv;
      csv << "t,x,y\r\n";
      csv.precision(17);
      for (std::size_t k = 0; k < res.sample_t.size(); ++k)
        csv << res.sample_t[k] << "," << res.sample_x[k].x << ","
            << res.sample_x[k].y << "\r\n";
      write_file((dir / ("solution_" + std::to_string(i) + ".csv")).string(),
                 csv.str());
    }
    if (res.found && eps != 0.0 && res.distance > 0.0) {
      log_eps.push_back(std::log(std::abs(eps)));
      log_dist.push_back(std::log(res.distance));
    }
  }

  double slope = 0.0;
  if (log_eps.size() >= 2) {
    double st = 0, sv = 0, stt = 0, stv = 0;
    for (std::size_t i = 0; i < log_eps.size(); ++i) {
      st += log_eps[i];
      sv += log_dist[i];
      stt += log_eps[i] * log_eps[i];
      stv += log_eps[i] * log_dist[i];
    }
    const double n = double(log_eps.size());
    slope = (n * stv - st * sv) / (n * stt - st * st);
  }

  write_file((dir / "sweep.csv").string(), sweep_csv(rows));
  json j;
  j["slope"] = slope;
  j["points_used"] = log_eps.size();
  j["config"] = json::parse(config_to_json(cfg));
  write_file((dir / "verify.json").string(), j.dump(2) + "\n");
  return 0;
}

int run_scan(const RunConfig& cfg) {
  const BuiltSystem built = build_preset(cfg);
  const VariationalFrame frame = frame_for(cfg, built);
  const BifurcationScan scan = scan_roots(frame, cfg.scan, cfg.eps);

  const auto dir = ensure_out_dir(cfg);
  write_file((dir / "scan.csv").string(), scan_csv(scan));
  json j = json::parse(scan_json(scan));
  j["config"] = json::parse(config_to_json(cfg));
  write_file((dir / "scan.json").string(), j.dump(2) + "\n");
  return 0;
}

int run_frame(const RunConfig& cfg) {
  const BuiltSystem built = build_preset(cfg);
  const VariationalFrame frame = frame_for(cfg, built);
  const auto dir = ensure_out_dir(cfg);
  write_file((dir / "frame.csv").string(), frame_csv(frame));
  write_file((dir / "orbit.csv").string(),
             orbit_csv(built.orbit, cfg.window, 0.05));
  return 0;
}

}  // namespace hgate
