#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hgate/cli_config.hpp"
#include "hgate/error.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::string preset;
  std::string forcing;
  std::string out;
  double tol = -1.0;
  double window = -1.0;
  std::string beta;
  std::vector<double> eps;
};

void add_common(CLI::App* cmd, CommonFlags& fl) {
  cmd->add_option("--config", fl.config_path, "JSON configuration file");
  cmd->add_option("--preset", fl.preset,
                  "system preset: powerlaw, powerlaw-energy-damped, "
                  "powerlaw-sheared, powerlaw-damped");
  cmd->add_option("--forcing", fl.forcing,
                  "forcing preset: a1, ycos, const, mixed, none");
  cmd->add_option("--out", fl.out, "output directory");
  cmd->add_option("--tol", fl.tol, "verdict threshold (zero_threshold)");
  cmd->add_option("--window", fl.window, "frame window half-width T");
  cmd->add_option("--beta", fl.beta,
                  "phase shift: a number, or lo:hi:n for a sweep grid");
  cmd->add_option("--eps", fl.eps, "epsilon list");
}

hgate::RunConfig resolve(const CommonFlags& fl) {
  hgate::RunConfig cfg;
  if (!fl.config_path.empty()) cfg = hgate::load_config_file(fl.config_path);
  if (!fl.preset.empty()) cfg.preset = fl.preset;
  if (!fl.forcing.empty()) cfg.forcing = fl.forcing;
  if (!fl.out.empty()) cfg.out_dir = fl.out;
  if (fl.tol > 0.0) cfg.zero_threshold = fl.tol;
  if (fl.window > 0.0) cfg.window = fl.window;
  if (!fl.eps.empty()) cfg.eps = fl.eps;
  if (!fl.beta.empty()) {
    const auto c1 = fl.beta.find(':');
    if (c1 == std::string::npos) {
      cfg.beta = std::stod(fl.beta);
    } else {
      const auto c2 = fl.beta.find(':', c1 + 1);
      if (c2 == std::string::npos)
        throw hgate::InvalidInput("--beta grid must be lo:hi:n");
      const double lo = std::stod(fl.beta.substr(0, c1));
      const double hi = std::stod(fl.beta.substr(c1 + 1, c2 - c1 - 1));
      const int n = std::stoi(fl.beta.substr(c2 + 1));
      if (n < 2) throw hgate::InvalidInput("--beta grid needs n >= 2");
      cfg.beta_grid.clear();
      for (int i = 0; i < n; ++i)
        cfg.beta_grid.push_back(lo + (hi - lo) * i / (n - 1));
      cfg.beta = cfg.beta_grid.front();
    }
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "homoclinic-gate: persistence and bifurcation of bounded solutions "
      "near a planar homoclinic orbit under small perturbation"};
  app.require_subcommand(1);

  CommonFlags fa, fv, fs, ff;
  CLI::App* analyze = app.add_subcommand(
      "analyze", "evaluate the condition functionals and write a report");
  add_common(analyze, fa);
  CLI::App* verify = app.add_subcommand(
      "verify", "direct boundary-value verification sweep over epsilon");
  add_common(verify, fv);
  double seed_phase = 0.0;
  bool seed_phase_set = false;
  verify->add_option("--seed-phase", seed_phase,
                     "phase of the shooting seed gamma(t + phase)")
      ->each([&](const std::string&) { seed_phase_set = true; });
  CLI::App* scan = app.add_subcommand(
      "scan", "sample the bifurcation function over a parameter slice");
  add_common(scan, fs);
  std::string scan_var = "";
  double scan_lo = 0.0, scan_hi = 0.0;
  int scan_samples = 0;
  scan->add_option("--var", scan_var, "scan variable: xi, alpha, beta");
  scan->add_option("--lo", scan_lo, "slice lower end");
  scan->add_option("--hi", scan_hi, "slice upper end");
  scan->add_option("--samples", scan_samples, "slice sample count");
  CLI::App* frame = app.add_subcommand(
      "frame", "export the variational frame and orbit as CSV");
  add_common(frame, ff);

  CLI11_PARSE(app, argc, argv);

  try {
    if (analyze->parsed()) return hgate::run_analyze(resolve(fa));
    if (verify->parsed()) {
      hgate::RunConfig cfg = resolve(fv);
      if (seed_phase_set) cfg.verify_seed_phase = seed_phase;
      return hgate::run_verify(cfg);
    }
    if (scan->parsed()) {
      hgate::RunConfig cfg = resolve(fs);
      if (!scan_var.empty()) {
        if (scan_var == "xi")
          cfg.scan.var = hgate::ScanVar::Xi;
        else if (scan_var == "alpha")
          cfg.scan.var = hgate::ScanVar::Alpha;
        else if (scan_var == "beta")
          cfg.scan.var = hgate::ScanVar::Beta;
        else
          throw hgate::InvalidInput("unknown scan variable: " + scan_var);
      }
      if (scan_lo != 0.0 || scan_hi != 0.0) {
        cfg.scan.lo = scan_lo;
        cfg.scan.hi = scan_hi;
      }
      if (scan_samples > 0) cfg.scan.samples = scan_samples;
      return hgate::run_scan(cfg);
    }
    if (frame->parsed()) return hgate::run_frame(resolve(ff));
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
