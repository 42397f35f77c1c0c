#pragma once

#include <functional>
#include <string>

#include "hgate/interp.hpp"
#include "hgate/planar_system.hpp"
#include "hgate/vec2.hpp"

namespace hgate {

/// Saddle equilibrium with symmetric eigenvalues +-omega and unit
/// eigen-directions.
struct SaddleData {
  Vec2 equilibrium;
  double omega = 0.0;
  Vec2 unstable_dir;
  Vec2 stable_dir;
};

/// Evaluable homoclinic orbit gamma(t), anchored so that t = 0 sits at the
/// point of maximal excursion from the equilibrium. gamma_dot is the
/// parameterization derivative (analytic for the closed-form family); the
/// exact bounded variational solution used downstream is always f(gamma(t)).
struct HomoclinicOrbit {
  std::function<Vec2(double)> gamma;
  std::function<Vec2(double)> gamma_dot;
  SaddleData saddle;
  Vec2 anchor;
  /// T_core with ||gamma(+-T_core) - equilibrium|| < tail_tol.
  double decay_window = 0.0;
  double tail_tol = 1e-5;
  /// |t| range over which the parameterization is directly represented;
  /// beyond it the orbit is extended by exponential decay onto the
  /// eigen-directions. Closed forms use a large finite window.
  double window = 0.0;
  bool closed_form = false;
  std::string label;
};

struct NewtonOptions {
  double tol = 1e-12;
  int max_iter = 50;
};

/// Newton iteration for f(x) = 0 from the given guess.
Vec2 find_equilibrium(const PlanarSystem& sys, Vec2 guess,
                      const NewtonOptions& opt = {});

/// Eigen-data of Df at an equilibrium; requires a real symmetric pair
/// +-omega (trace below 1e-10), otherwise throws.
SaddleData saddle_data(const PlanarSystem& sys, Vec2 equilibrium);

/// Closed-form homoclinic of x' = y, y' = nu x - mu x^(p+1):
///   x(t) = x_max sech^(2/p)((p sqrt(nu)/2) t),  x_max = ((p+2)nu/(2mu))^(1/p)
/// with y = x'(t).
HomoclinicOrbit powerlaw_homoclinic(double nu, double mu, int p,
                                    double tail_tol = 1e-5);

/// Image of an orbit under the linear map P (for conjugated systems).
HomoclinicOrbit map_orbit(const HomoclinicOrbit& orbit, const Mat2& P);

struct ShootOptions {
  double delta = 1e-6;       // offset along the unstable eigendirection
  double box_radius = 10.0;  // escape guard
  double max_time = 80.0;
  double return_tol = 1e-4;  // alignment tolerance at the returning end
  /// Stop radius of the return detector. Going much closer to the saddle is
  /// counterproductive: roundoff seeded during the loop transit rides the
  /// unstable mode and contaminates the incoming direction.
  double return_radius = 1e-4;
  double tail_tol = 1e-5;
  double sample_dt = 0.004;
  double rtol = 1e-12;
  double atol = 1e-13;
};

/// Numeric homoclinic by single shooting along the unstable manifold.
/// Integrates forward from equilibrium + delta * unstable_dir, requires the
/// trajectory to come back to the equilibrium aligned with the stable
/// direction, and reparameterizes so that the maximal excursion sits at t=0.
HomoclinicOrbit shoot_homoclinic(const PlanarSystem& sys,
                                 const SaddleData& saddle,
                                 const ShootOptions& opt = {});

/// Max-residual check ||gamma'(t) - f(gamma(t))|| over a dense grid.
double orbit_ode_residual(const HomoclinicOrbit& orbit, const PlanarSystem& sys,
                          double t_max, int samples = 2000);

}  // namespace hgate
