#include "hgate/planar_system.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "hgate/error.hpp"

namespace hgate {

double default_fd_step(Vec2 x) {
  // cbrt(machine eps) scaling is optimal for central differences.
  return 6.055454452393343e-06 * (1.0 + norm(x));
}

Mat2 finite_diff_jacobian(const std::function<Vec2(Vec2)>& f, Vec2 x,
                          double h) {
  if (!(h > 0.0)) throw InvalidInput("finite_diff_jacobian: h must be > 0");
  if (h < 64.0 * 2.220446049250313e-16 * (1.0 + norm(x)))
    throw InvalidInput("finite_diff_jacobian: step underflow");
  const Vec2 fxp = f({x.x + h, x.y});
  const Vec2 fxm = f({x.x - h, x.y});
  const Vec2 fyp = f({x.x, x.y + h});
  const Vec2 fym = f({x.x, x.y - h});
  const double inv = 1.0 / (2.0 * h);
  return {(fxp.x - fxm.x) * inv, (fyp.x - fym.x) * inv,
          (fxp.y - fxm.y) * inv, (fyp.y - fym.y) * inv};
}

void validate_system(const PlanarSystem& sys, const ProbeBox& box,
                     unsigned seed, int probes) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> ux(box.lo.x, box.hi.x);
  std::uniform_real_distribution<double> uy(box.lo.y, box.hi.y);
  for (int k = 0; k < probes; ++k) {
    const Vec2 x{ux(rng), uy(rng)};
    const Vec2 fx = sys.f(x);
    if (!is_finite(fx))
      throw InvalidInput("validate_system: non-finite field value");
    const Mat2 J = sys.jacobian_f(x);
    if (!is_finite(J))
      throw InvalidInput("validate_system: non-finite Jacobian");
    if (sys.derivative_mode == DerivativeMode::Analytic) {
      const Mat2 Jfd = finite_diff_jacobian(sys.f, x, default_fd_step(x));
      double scale = 1.0;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          scale = std::max(scale, std::abs(J(i, j)));
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          if (std::abs(J(i, j) - Jfd(i, j)) > 1e-5 * scale) {
            std::ostringstream msg;
            msg << "validate_system: analytic Jacobian disagrees with finite "
                   "differences at "
                << x << " entry (" << i << "," << j << ")";
            throw InvalidInput(msg.str());
          }
    }
    if (sys.hamiltonian_flag && std::abs(J.trace()) > 1e-10) {
      std::ostringstream msg;
      msg << "validate_system: hamiltonian flag set but trace Df = "
          << J.trace() << " at " << x;
      throw InvalidInput(msg.str());
    }
  }
}

PlanarSystem powerlaw_system(double nu, double mu, int p) {
  if (!(nu > 0.0) || !(mu > 0.0) || p < 2)
    throw InvalidInput("powerlaw_system: need nu>0, mu>0, p>=2");
  PlanarSystem s;
  std::ostringstream name;
  name << "powerlaw(nu=" << nu << ",mu=" << mu << ",p=" << p << ")";
  s.name = name.str();
  s.hamiltonian_flag = true;
  s.f = [nu, mu, p](Vec2 v) -> Vec2 {
    return {v.y, nu * v.x - mu * std::pow(v.x, p + 1)};
  };
  s.jacobian_f = [nu, mu, p](Vec2 v) -> Mat2 {
    return {0.0, 1.0, nu - (p + 1) * mu * std::pow(v.x, p), 0.0};
  };
  s.hessians_f = [mu, p](Vec2 v) -> std::array<Mat2, 2> {
    Mat2 h2{-double(p) * (p + 1) * mu * std::pow(v.x, p - 1), 0.0, 0.0, 0.0};
    return {Mat2::zero(), h2};
  };
  return s;
}

PlanarSystem powerlaw_energy_damped_system(double nu, double mu, int p,
                                           double c) {
  PlanarSystem s = powerlaw_system(nu, mu, p);
  std::ostringstream name;
  name << "powerlaw-energy-damped(nu=" << nu << ",mu=" << mu << ",p=" << p
       << ",c=" << c << ")";
  s.name = name.str();
  s.hamiltonian_flag = false;
  auto H = [nu, mu, p](Vec2 v) {
    return 0.5 * (v.y * v.y - nu * v.x * v.x) +
           mu * std::pow(v.x, p + 2) / (p + 2);
  };
  s.f = [nu, mu, p, c, H](Vec2 v) -> Vec2 {
    return {v.y, nu * v.x - mu * std::pow(v.x, p + 1) + c * H(v) * v.y};
  };
  s.jacobian_f = [nu, mu, p, c, H](Vec2 v) -> Mat2 {
    const double Hx = -nu * v.x + mu * std::pow(v.x, p + 1);
    return {0.0, 1.0,
            nu - (p + 1) * mu * std::pow(v.x, p) + c * v.y * Hx,
            c * (H(v) + v.y * v.y)};
  };
  s.hessians_f = [nu, mu, p, c](Vec2 v) -> std::array<Mat2, 2> {
    const double Hx = -nu * v.x + mu * std::pow(v.x, p + 1);
    const double Hxx = -nu + (p + 1) * mu * std::pow(v.x, p);
    const double f2xx = -double(p) * (p + 1) * mu * std::pow(v.x, p - 1) +
                        c * v.y * Hxx;
    const double f2xy = c * Hx;
    const double f2yy = 3.0 * c * v.y;
    return {Mat2::zero(), Mat2{f2xx, f2xy, f2xy, f2yy}};
  };
  return s;
}

PlanarSystem powerlaw_damped_system(double nu, double mu, int p,
                                    double delta) {
  PlanarSystem s = powerlaw_system(nu, mu, p);
  std::ostringstream name;
  name << "powerlaw-damped(nu=" << nu << ",mu=" << mu << ",p=" << p
       << ",delta=" << delta << ")";
  s.name = name.str();
  s.hamiltonian_flag = false;
  auto base_f = s.f;
  auto base_j = s.jacobian_f;
  s.f = [base_f, delta](Vec2 v) -> Vec2 {
    Vec2 w = base_f(v);
    return {w.x, w.y - delta * v.y};
  };
  s.jacobian_f = [base_j, delta](Vec2 v) -> Mat2 {
    Mat2 J = base_j(v);
    return {J.a, J.b, J.c, J.d - delta};
  };
  return s;
}

PlanarSystem conjugate_system(const PlanarSystem& sys, const Mat2& P,
                              const std::string& name) {
  if (std::abs(P.det()) < 1e-14)
    throw InvalidInput("conjugate_system: singular matrix");
  const Mat2 Pinv = inverse(P);
  PlanarSystem s;
  s.name = name;
  s.hamiltonian_flag = sys.hamiltonian_flag && std::abs(P.det() - 1.0) < 1e-14;
  s.derivative_mode = sys.derivative_mode;
  auto f0 = sys.f;
  auto j0 = sys.jacobian_f;
  auto h0 = sys.hessians_f;
  auto g0 = sys.g;
  auto dg0 = sys.grad_g;
  s.f = [f0, P, Pinv](Vec2 u) { return P * f0(Pinv * u); };
  s.jacobian_f = [j0, P, Pinv](Vec2 u) { return P * j0(Pinv * u) * Pinv; };
  s.hessians_f = [h0, P, Pinv](Vec2 u) -> std::array<Mat2, 2> {
    const auto H = h0(Pinv * u);
    // D2(f_P)_k = Pinv^T (sum_m P_km H_m) Pinv
    std::array<Mat2, 2> out;
    for (int k = 0; k < 2; ++k) {
      const double w0 = k == 0 ? P.a : P.c;
      const double w1 = k == 0 ? P.b : P.d;
      const Mat2 mix = w0 * H[0] + w1 * H[1];
      out[k] = transpose(Pinv) * mix * Pinv;
    }
    return out;
  };
  s.g = [g0, P, Pinv](Vec2 u, double t) { return P * g0(Pinv * u, t); };
  s.grad_g = [dg0, P, Pinv](Vec2 u, double t) {
    return P * dg0(Pinv * u, t) * Pinv;
  };
  return s;
}

PlanarSystem powerlaw_sheared_system(double nu, double mu, int p,
                                     double sigma) {
  std::ostringstream name;
  name << "powerlaw-sheared(nu=" << nu << ",mu=" << mu << ",p=" << p
       << ",sigma=" << sigma << ")";
  const Mat2 P{1.0, sigma, 0.0, 1.0};
  return conjugate_system(powerlaw_system(nu, mu, p), P, name.str());
}

Forcing forcing_none() { return Forcing{}; }

Forcing forcing_a1() {
  Forcing f;
  f.name = "a1";
  f.g = [](Vec2 v, double t) -> Vec2 {
    return {0.0, v.y * (2.0 + std::cos(t))};
  };
  f.grad_g = [](Vec2, double t) -> Mat2 {
    return {0.0, 0.0, 0.0, 2.0 + std::cos(t)};
  };
  return f;
}

Forcing forcing_ycos() {
  Forcing f;
  f.name = "ycos";
  f.g = [](Vec2 v, double t) -> Vec2 { return {0.0, v.y * std::cos(t)}; };
  f.grad_g = [](Vec2, double t) -> Mat2 {
    return {0.0, 0.0, 0.0, std::cos(t)};
  };
  return f;
}

Forcing forcing_const(double c) {
  Forcing f;
  f.name = "const";
  f.g = [c](Vec2, double) -> Vec2 { return {0.0, c}; };
  f.grad_g = [](Vec2, double) -> Mat2 { return {}; };
  return f;
}

Forcing forcing_mixed() {
  Forcing f;
  f.name = "mixed";
  f.g = [](Vec2 v, double t) -> Vec2 {
    return {v.x * std::sin(t), v.y * std::cos(t)};
  };
  f.grad_g = [](Vec2, double t) -> Mat2 {
    return {std::sin(t), 0.0, 0.0, std::cos(t)};
  };
  return f;
}

Forcing forcing_by_name(const std::string& name, double const_value) {
  if (name == "none") return forcing_none();
  if (name == "a1") return forcing_a1();
  if (name == "ycos") return forcing_ycos();
  if (name == "const") return forcing_const(const_value);
  if (name == "mixed") return forcing_mixed();
  throw InvalidInput("unknown forcing preset: " + name);
}

}  // namespace hgate
