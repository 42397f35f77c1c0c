#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hgate/quadrature.hpp"
#include "hgate/variational.hpp"

namespace hgate {

/// Bounded continuous forcing of the inhomogeneous variational equation,
/// with decay metadata for the tail handling of the line integrals.
struct ForcingFunction {
  std::function<Vec2(double)> evaluate;
  double decay_rate = 1.0;
  double core_window = 10.0;
};

/// Melnikov-type solvability functional: int (1/Delta) f(gamma) ^ F ds.
/// Vanishing is exactly the bounded-solvability condition of Lz = F.
QuadResult melnikov_residual(const VariationalFrame& frame,
                             const ForcingFunction& F, double tol = 1e-11);

struct GreenOptions {
  double x2 = 0.0;
  /// Residual verification: propagate z through the inhomogeneous equation
  /// over short spans and compare. Throws when the mismatch rate exceeds
  /// residual_tol.
  bool check_residual = true;
  double residual_tol = 1e-6;
  /// Bounded mode pins the full-line solvability integral to zero (its
  /// analytic value under the precondition), evaluating the growing-column
  /// coefficient from the near end on each side. Without this, the
  /// quadrature noise of the full-line integral rides exp(omega T) and
  /// destroys the solution at the window edges. Disable only for the
  /// growth diagnostic.
  bool enforce_bounded = true;
  /// Bounded mode refuses when the actual solvability integral exceeds this.
  double solvability_tol = 1e-6;
};

struct GreenSolution {
  std::function<Vec2(double)> z;
  double x2 = 0.0;
  double sup_norm = 0.0;   // over the frame window
  double residual = 0.0;   // verified ODE mismatch rate
};

/// Bounded solution of z' - Df(gamma(t)) z = F via the variational-frame
/// kernel: z_i = gamma_i'(t) (x2 - int_0^t (zeta/Delta)^F) +
///              zeta_i(t) int_{-inf}^t (gamma'/Delta)^F.
/// Requires melnikov_residual(F) ~ 0; otherwise the result grows like
/// exp(omega t) (use green_growth_diagnostic for that regime).
GreenSolution green_solve(const VariationalFrame& frame,
                          const ForcingFunction& F, const GreenOptions& opt);

/// green_solve with x2 chosen so that int z . gamma' dt = 0 (the L2
/// complement convention for the Lyapunov-Schmidt splitting).
GreenSolution green_solve_orthogonal(const VariationalFrame& frame,
                                     const ForcingFunction& F,
                                     bool check_residual = true);

/// Growth-rate fit of log||z|| on the tails when the solvability integral is
/// away from zero (the unbounded branch of the solvability alternative).
double green_growth_diagnostic(const VariationalFrame& frame,
                               const ForcingFunction& F);

/// The linear projection p onto the obstruction direction:
/// (pF)(t) = (Delta^2(t)/||gamma'||_2^2) J(t) int J(s).F(s) ds.
ForcingFunction project_p(const VariationalFrame& frame,
                          const ForcingFunction& F, double tol = 1e-11);

/// Scalar int J(s).F(s) ds (identical to melnikov_residual by definition).
double project_coefficient(const VariationalFrame& frame,
                           const ForcingFunction& F, double tol = 1e-11);

/// Perturbation-parameter triple of the moving ansatz. The stated ranges are
/// the domain the reduction is built for; solve_eta validates them.
struct PerturbationParams {
  double epsilon = 0.0;  // |epsilon| <= 0.5
  double beta = 0.0;     // finite
  double alpha = 1.0;    // in [0.5, 1.5]
};

/// Throws InvalidInput when the parameters leave the admissible box.
void validate_params(const PerturbationParams& p);

struct EtaOptions {
  double tol = 1e-11;       // sup-norm fixed-point update tolerance
  int max_iter = 100;
  double quad_tol = 1e-11;  // projection coefficient tolerance
};

/// State of the Lyapunov-Schmidt splitting z = xi gamma' + eta.
struct LSState {
  double xi = 0.0, alpha = 1.0, beta = 0.0, epsilon = 0.0;
  std::function<Vec2(double)> eta;
  double eta_sup = 0.0;
  int iterations = 0;
  double contraction_ratio = 0.0;
  double orthogonality = 0.0;  // int eta . gamma' dt
  bool converged = false;
};

/// Nonlinear remainder of the perturbed equation in the moving ansatz
/// x(t - beta) = alpha gamma(t) + z(t):
///   F(t, z) = f(alpha gamma + z) - alpha f(gamma) - Df(gamma) z
///             + epsilon g(alpha gamma + z, t - beta),
/// evaluated exactly (no series truncation).
Vec2 ls_remainder(const VariationalFrame& frame, double t, Vec2 z,
                  double alpha, double beta, double epsilon);

/// Fixed-point solve of eta = k (I - p) F(., xi gamma' + eta, ...).
/// Throws ConvergenceError when the iteration stops contracting.
LSState solve_eta(const VariationalFrame& frame, double xi, double alpha,
                  double beta, double epsilon, const EtaOptions& opt = {});

/// Bifurcation function B = int J(s) . F(s, xi gamma' + eta, ...) ds at the
/// solved eta.
double bifurcation_B(const VariationalFrame& frame, double xi, double alpha,
                     double beta, double epsilon, const EtaOptions& opt = {},
                     LSState* state_out = nullptr);

// ---- root scanning ------------------------------------------------------

enum class ScanVar { Xi, Alpha, Beta };

std::string to_string(ScanVar v);

struct ScanSlice {
  ScanVar var = ScanVar::Alpha;
  double lo = 0.9, hi = 1.1;
  int samples = 41;
  // Fixed values of the non-scanned variables.
  double xi = 0.0, alpha = 1.0, beta = 0.0;
  /// Sign changes where both endpoints are below this magnitude are treated
  /// as quadrature noise, not roots (B on a degenerate slice is a numerical
  /// zero with random sign).
  double root_noise_floor = 1e-11;
};

struct ScanPoint {
  double value = 0.0;  // scan variable
  double B = 0.0;
  bool ok = true;
  std::string error;
};

struct ScanRoot {
  double epsilon = 0.0;
  double location = 0.0;
};

struct BifurcationScan {
  ScanSlice slice;
  std::vector<double> eps_list;
  std::vector<std::vector<ScanPoint>> samples;  // one row per epsilon
  std::vector<ScanRoot> roots;
  int roots_pos = -1, roots_neg = -1;  // counts at smallest |eps| per sign
  std::string classification;
};

/// Generic scanner over fn(scan_value, epsilon); brackets sign changes and
/// refines each root by bisection to 1e-10 in the scan variable.
BifurcationScan scan_function(
    const std::function<double(double, double)>& fn, const ScanSlice& slice,
    const std::vector<double>& eps_list);

/// Scanner bound to the bifurcation function of the frame.
BifurcationScan scan_roots(const VariationalFrame& frame,
                           const ScanSlice& slice,
                           const std::vector<double>& eps_list,
                           const EtaOptions& opt = {});

// ---- reconstruction and distance ----------------------------------------

/// Solution rebuilt from a point of the reduced problem:
/// x(tau) = alpha gamma(tau + beta) + xi gamma'(tau + beta) + eta(tau + beta).
struct ReconstructedSolution {
  std::function<Vec2(double)> x;
  LSState state;
  double ode_residual = 0.0;      // sup-norm ODE mismatch over the window
  double distance_to_gamma = 0.0;  // phase-minimized sup distance
  double best_phase = 0.0;
};

ReconstructedSolution reconstruct_solution(const VariationalFrame& frame,
                                           double xi, double alpha, double beta,
                                           double epsilon,
                                           const EtaOptions& opt = {});

/// min over phase shifts of sup_t ||x(t - phase) - gamma(t)|| on
/// [-T_compare, T_compare].
double phase_min_distance(const std::function<Vec2(double)>& x,
                          const HomoclinicOrbit& orbit, double T_compare,
                          double phase_range, double* best_phase = nullptr);

// ---- direct boundary-value verification ----------------------------------

struct VerifyOptions {
  double window_T = 12.0;
  int nodes = 16;
  double newton_tol = 1e-10;
  int max_newton = 60;
  double rtol = 1e-12;
  double atol = 1e-13;
  double sample_dt = 0.02;
  double compare_margin = 1.0;  // trim of the distance-evaluation window
  double phase_range = 2.0;
  /// Shooting seed; defaults to gamma(t + seed_phase). Bounded solutions
  /// exist only near phases where the solvability function has a zero, so
  /// the seed phase matters for time-dependent forcing.
  std::function<Vec2(double)> seed;
  double seed_phase = 0.0;
};

struct VerifyResult {
  bool found = false;
  double distance = 0.0;
  double best_phase = 0.0;
  double residual_norm = 0.0;
  int newton_iterations = 0;
  std::string message;
  std::vector<double> sample_t;
  std::vector<Vec2> sample_x;
  std::function<Vec2(double)> x;  // dense solution on [-T, T]
};

/// Multiple-shooting boundary-value solve of x' = f(x) + epsilon g(x, t) on
/// [-T, T]: interior matching at the shooting nodes, boundary conditions
/// confining x(-T) - eq to the unstable eigendirection and x(T) - eq to the
/// stable one, damped (Levenberg-style) Newton on the stacked residual.
/// Non-convergence is reported in the result, not thrown.
VerifyResult direct_verify(const PlanarSystem& sys,
                           const HomoclinicOrbit& orbit, double epsilon,
                           const VerifyOptions& opt = {});

}  // namespace hgate
