#pragma once

#include <string>
#include <vector>

#include "hgate/bifurcation.hpp"
#include "hgate/conditions.hpp"
#include "hgate/homoclinic_orbit.hpp"
#include "hgate/planar_system.hpp"

namespace hgate {

/// Fully resolved run configuration. Parsed from JSON (unknown keys are
/// rejected) and embedded verbatim into every emitted report so that a run
/// can be reproduced from its own output.
struct RunConfig {
  std::string preset = "powerlaw";
  double nu = 1.0;
  double mu = 1.0;
  int p = 2;
  double energy_damp = 0.15;  // powerlaw-energy-damped
  double shear = 0.5;         // powerlaw-sheared
  double damping = 0.1;       // powerlaw-damped (experimental carrier)
  std::string forcing = "a1";
  double forcing_const = 0.1;
  double window = 30.0;  // frame half-width T
  double zero_threshold = 1e-6;
  double line_tol = 1e-10;
  double plane_tol = 1e-8;
  double beta = 0.0;
  std::vector<double> beta_grid;  // optional sweep for analyze
  std::vector<double> eps{1e-2, 1e-3, 1e-4};
  unsigned seed = 12345;
  std::string out_dir = "out";
  double verify_window = 12.0;
  int verify_nodes = 16;
  /// Seed phase for the boundary-value sweep: bounded solutions exist near
  /// the zeros of the solvability function, not necessarily at phase 0.
  double verify_seed_phase = 0.0;
  ScanSlice scan;
  bool c5_enforce_decay = true;
};

RunConfig parse_config_json(const std::string& text);
RunConfig load_config_file(const std::string& path);
std::string config_to_json(const RunConfig& cfg);

struct BuiltSystem {
  PlanarSystem sys;
  HomoclinicOrbit orbit;
  /// Set for carriers whose orbit is a reference curve rather than a
  /// trajectory of the field (the linear-damping preset).
  bool reference_orbit = false;
  std::string note;
};

BuiltSystem build_preset(const RunConfig& cfg);

/// Subcommand drivers; each writes its artifacts under cfg.out_dir and
/// returns 0 on success. Errors propagate as exceptions.
int run_analyze(const RunConfig& cfg);
int run_verify(const RunConfig& cfg);
int run_scan(const RunConfig& cfg);
int run_frame(const RunConfig& cfg);

}  // namespace hgate
