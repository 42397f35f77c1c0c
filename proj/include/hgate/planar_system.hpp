#pragma once

#include <array>
#include <functional>
#include <string>

#include "hgate/vec2.hpp"

namespace hgate {

enum class DerivativeMode { Analytic, FiniteDifference };

/// Time-dependent perturbation g(x, t) with its spatial gradient
/// (rows of grad = gradients of the two components).
struct Forcing {
  std::string name = "none";
  std::function<Vec2(Vec2, double)> g = [](Vec2, double) { return Vec2{}; };
  std::function<Mat2(Vec2, double)> grad_g = [](Vec2, double) {
    return Mat2{};
  };
};

/// Planar field x' = f(x) together with first/second derivatives and a
/// perturbation g(x, t). All evaluation maps are pure; instances are
/// immutable in practice and safe to share across threads.
struct PlanarSystem {
  std::string name;
  std::function<Vec2(Vec2)> f;
  std::function<Mat2(Vec2)> jacobian_f;
  /// hessians()[k](i,j) = d2 f_k / dx_i dx_j (symmetric).
  std::function<std::array<Mat2, 2>(Vec2)> hessians_f;
  std::function<Vec2(Vec2, double)> g = [](Vec2, double) { return Vec2{}; };
  std::function<Mat2(Vec2, double)> grad_g = [](Vec2, double) {
    return Mat2{};
  };
  bool hamiltonian_flag = false;
  DerivativeMode derivative_mode = DerivativeMode::Analytic;

  PlanarSystem with_forcing(const Forcing& forcing) const {
    PlanarSystem s = *this;
    s.g = forcing.g;
    s.grad_g = forcing.grad_g;
    s.name = name + "+" + forcing.name;
    return s;
  }
};

/// Central finite-difference Jacobian, O(h^2). Throws on step underflow.
Mat2 finite_diff_jacobian(const std::function<Vec2(Vec2)>& f, Vec2 x, double h);

/// Default step for central differences at x: cbrt(eps) * (1 + |x|).
double default_fd_step(Vec2 x);

struct ProbeBox {
  Vec2 lo{-2.0, -2.0};
  Vec2 hi{2.0, 2.0};
};

/// Random-probe validation of the declared invariants: analytic Jacobian vs
/// finite differences (relative 1e-5) and trace-free Jacobian for systems
/// carrying the hamiltonian flag (1e-10). Throws InvalidInput on violation.
void validate_system(const PlanarSystem& sys, const ProbeBox& box,
                     unsigned seed = 12345, int probes = 100);

// ---- built-in systems -------------------------------------------------

/// x' = y, y' = nu x - mu x^(p+1). Hamiltonian; carries the closed-form
/// homoclinic loop through the origin.
PlanarSystem powerlaw_system(double nu, double mu, int p);

/// Power-law field with the energy-proportional damping term c*H(x,y)*y added
/// to the second component, H = (y^2 - nu x^2 + 2 mu x^(p+2)/(p+2))/2.
/// The extra term vanishes on the H=0 level set, so the unperturbed homoclinic
/// orbit survives unchanged while the field ceases to be divergence free.
PlanarSystem powerlaw_energy_damped_system(double nu, double mu, int p,
                                           double c);

/// Power-law field with plain linear damping -delta*y in the second
/// component. Has no homoclinic of its own; used only as the experimental
/// frame/condition carrier on a reference orbit.
PlanarSystem powerlaw_damped_system(double nu, double mu, int p, double delta);

/// Conjugation u = P x of a system: f_P(u) = P f(P^inv u), forcing included.
/// Derivatives are transformed exactly.
PlanarSystem conjugate_system(const PlanarSystem& sys, const Mat2& P,
                              const std::string& name);

/// powerlaw_system conjugated by the shear [[1, sigma], [0, 1]]. Still
/// divergence free, but the first component is no longer linear, which keeps
/// the C4/C5 machinery non-degenerate.
PlanarSystem powerlaw_sheared_system(double nu, double mu, int p, double sigma);

// ---- built-in forcings ------------------------------------------------

Forcing forcing_none();
/// (0, y*(2+cos t)): increasing in y, even and bounded in t.
Forcing forcing_a1();
/// (0, y*cos t): mean-zero variant of forcing_a1.
Forcing forcing_ycos();
/// (0, c): constant push on the second component.
Forcing forcing_const(double c);
/// (x sin t, y cos t): acts on both components.
Forcing forcing_mixed();

Forcing forcing_by_name(const std::string& name, double const_value = 0.1);

}  // namespace hgate
