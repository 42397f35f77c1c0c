#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "hgate/homoclinic_orbit.hpp"
#include "hgate/interp.hpp"
#include "hgate/planar_system.hpp"
#include "hgate/vec2.hpp"

namespace hgate {

struct FrameOptions {
  double h_core = 0.0125;   // grid step over the core window
  double core_span = 12.0;  // half-width of the uniform core region
  double stretch = 1.04;    // geometric growth of the step in the tails
  /// Tail step cap; keeps the interpolation error of the growing column at
  /// the 1e-8 level. Both steps are divided by max(1, omega).
  double h_tail_max = 0.02;
  double rtol = 1e-10;
  double atol = 1e-12;
  /// Default normalization is zeta(0) = perp(gamma'(0)) / |gamma'(0)|^2,
  /// which makes Delta(0) = 1 with zeta(0) orthogonal to gamma'(0).
  /// Override to exercise other frame normalizations.
  std::optional<Vec2> zeta0_override;
  /// Tolerance of the Abel-identity cross check (relative).
  double abel_tol = 1e-6;
  /// Delta constancy tolerance for hamiltonian-flagged systems.
  double hamiltonian_delta_tol = 1e-8;
  /// Set when the orbit is a reference curve that is not a trajectory of the
  /// field (experimental carrier mode): the gamma' column is then not a
  /// variational solution, so the Abel and constancy checks are recorded but
  /// not enforced.
  bool reference_orbit_mode = false;
};

struct FrameDiagnostics {
  double abel_max_rel_err = 0.0;
  double delta_min_abs = 0.0;
  double delta_max_abs = 0.0;
  /// |Delta(T) - Delta(-T)| / |Delta(T)|; small only when the trace of Df
  /// integrates to zero along the orbit.
  double delta_limit_gap = 0.0;
  double hamiltonian_delta_drift = 0.0;
  double zeta_growth_slope_fwd = 0.0;
  double zeta_growth_slope_bwd = 0.0;
};

/// Fundamental frame of the variational equation z' = Df(gamma(t)) z: the
/// bounded column gamma' (taken identically as f(gamma(t))), one unbounded
/// column zeta obtained by outward integration from t = 0, and
/// Delta(t) = wedge(gamma'(t), zeta(t)). Immutable after construction.
struct VariationalFrame {
  std::shared_ptr<const HomoclinicOrbit> orbit;
  PlanarSystem sys;
  std::vector<double> grid;
  HermiteCurve2 zeta_curve;
  HermiteCurve1 delta_curve;
  double T = 0.0;
  double omega = 0.0;
  Vec2 zeta0;
  double dichotomy_k = 0.0;
  /// Squared L2 norm of gamma' over the line (cached for the projection).
  double gamma_prime_l2sq = 0.0;
  FrameDiagnostics diag;

  Vec2 gamma(double t) const { return orbit->gamma(t); }
  Vec2 gamma_prime(double t) const { return sys.f(orbit->gamma(t)); }
  Vec2 zeta(double t) const { return zeta_curve.eval(t); }
  double delta(double t) const { return delta_curve.eval(t); }
};

/// Builds the frame on [-T, T]. Throws if Delta crosses zero, the Abel
/// identity fails, or (for hamiltonian-flagged systems) Delta drifts.
VariationalFrame build_frame(const PlanarSystem& sys,
                             const HomoclinicOrbit& orbit, double T,
                             const FrameOptions& opt = {});

/// Empirical constant of the pairing estimates: the supremum over sampled
/// pairs t >= s >= 0 (and t <= s <= 0) of |gamma_i'(t) zeta_j(s)| scaled by
/// exp(omega |t - s|). Throws when the supremum exceeds the overflow guard,
/// which signals a wrong omega or a broken frame.
double check_dichotomy(const VariationalFrame& frame,
                       std::optional<double> omega_override = std::nullopt,
                       double guard = 1e12);

struct AsymptoticsRow {
  double t;
  Vec2 gamma_prime_scaled;  // gamma'(t) * exp(omega |t|)
  Vec2 zeta_scaled;         // zeta(t)   * exp(-omega |t|)
};

struct AsymptoticsReport {
  std::vector<AsymptoticsRow> rows;  // includes t = 0 and the outer tails
  /// Relative drift of the scaled tail quantities over the last decade
  /// (a time span of ln(10)/omega at each end).
  double gamma_prime_drift_fwd = 0.0, gamma_prime_drift_bwd = 0.0;
  double zeta_drift_fwd = 0.0, zeta_drift_bwd = 0.0;
  bool converged(double tol = 0.05) const {
    return gamma_prime_drift_fwd < tol && gamma_prime_drift_bwd < tol &&
           zeta_drift_fwd < tol && zeta_drift_bwd < tol;
  }
};

AsymptoticsReport check_asymptotics(const VariationalFrame& frame);

}  // namespace hgate
