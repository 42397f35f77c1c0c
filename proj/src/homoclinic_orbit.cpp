#include "hgate/homoclinic_orbit.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>
#include <vector>

#include "hgate/error.hpp"
#include "hgate/ode.hpp"

namespace hgate {

Vec2 find_equilibrium(const PlanarSystem& sys, Vec2 guess,
                      const NewtonOptions& opt) {
  Vec2 x = guess;
  for (int it = 0; it < opt.max_iter; ++it) {
    const Vec2 fx = sys.f(x);
    if (norm(fx) < opt.tol) return x;
    const Mat2 J = sys.jacobian_f(x);
    if (std::abs(J.det()) < 1e-14 * (1.0 + norm(fx)))
      throw ConvergenceError("find_equilibrium: singular Jacobian");
    x = x - inverse(J) * fx;
    if (!is_finite(x))
      throw ConvergenceError("find_equilibrium: iterate diverged");
  }
  if (norm(sys.f(x)) < opt.tol) return x;
  throw ConvergenceError("find_equilibrium: no convergence in " +
                         std::to_string(opt.max_iter) + " iterations");
}

SaddleData saddle_data(const PlanarSystem& sys, Vec2 equilibrium) {
  if (norm(sys.f(equilibrium)) > 1e-10)
    throw InvalidInput("saddle_data: point is not an equilibrium");
  const Mat2 J = sys.jacobian_f(equilibrium);
  if (std::abs(J.trace()) > 1e-10)
    throw InvalidInput("saddle_data: non-symmetric spectrum, trace = " +
                       std::to_string(J.trace()));
  const double disc = -J.det();  // eigenvalues +-sqrt(-det) when trace = 0
  if (disc <= 0.0)
    throw InvalidInput("saddle_data: complex or zero eigenvalues");
  const double omega = std::sqrt(disc);

  auto eigvec = [&](double lambda) -> Vec2 {
    // (J - lambda I) v = 0; pick the more robust row.
    const Vec2 r0{J.a - lambda, J.b};
    const Vec2 r1{J.c, J.d - lambda};
    Vec2 v = norm(r0) >= norm(r1) ? Vec2{-r0.y, r0.x} : Vec2{-r1.y, r1.x};
    const double n = norm(v);
    if (n < 1e-14) throw InvalidInput("saddle_data: defective eigenvector");
    v = v / n;
    if (v.x < 0.0 || (v.x == 0.0 && v.y < 0.0)) v = -v;  // fixed orientation
    return v;
  };

  SaddleData s;
  s.equilibrium = equilibrium;
  s.omega = omega;
  s.unstable_dir = eigvec(omega);
  s.stable_dir = eigvec(-omega);
  for (double sgn : {1.0, -1.0}) {
    const Vec2 v = sgn > 0 ? s.unstable_dir : s.stable_dir;
    const Vec2 res = J * v - sgn * omega * v;
    if (norm(res) > 1e-10)
      throw InvalidInput("saddle_data: eigenvector residual too large");
  }
  return s;
}

HomoclinicOrbit powerlaw_homoclinic(double nu, double mu, int p,
                                    double tail_tol) {
  if (!(nu > 0.0) || !(mu > 0.0) || p < 2)
    throw InvalidInput("powerlaw_homoclinic: need nu>0, mu>0, p>=2");
  const double x_max = std::pow((p + 2) * nu / (2.0 * mu), 1.0 / p);
  const double sq_nu = std::sqrt(nu);
  const double wp = 0.5 * p * sq_nu;  // sech argument rate
  const double e = 2.0 / p;

  auto xval = [=](double t) { return x_max * std::pow(1.0 / std::cosh(wp * t), e); };
  auto gamma = [=](double t) -> Vec2 {
    const double x = xval(t);
    return {x, -sq_nu * x * std::tanh(wp * t)};
  };
  auto gamma_dot = [=](double t) -> Vec2 {
    const double x = xval(t);
    const double th = std::tanh(wp * t);
    const double sech2 = 1.0 - th * th;
    const double xd = -sq_nu * x * th;
    const double yd = nu * x * th * th - sq_nu * wp * x * sech2;
    return {xd, yd};
  };

  HomoclinicOrbit orbit;
  orbit.gamma = gamma;
  orbit.gamma_dot = gamma_dot;
  orbit.closed_form = true;
  orbit.anchor = {x_max, 0.0};
  orbit.tail_tol = tail_tol;
  orbit.window = 1e6;  // sech closed form is valid everywhere
  {
    const PlanarSystem sys = powerlaw_system(nu, mu, p);
    orbit.saddle = saddle_data(sys, {0.0, 0.0});
  }
  // Smallest T with ||gamma(+-T)|| below the tail tolerance (gamma is
  // symmetric in |t| for this family).
  double T = 1.0;
  while (norm(gamma(T)) >= tail_tol && T < 1e4) T *= 1.5;
  double lo = T / 1.5, hi = T;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    (norm(gamma(mid)) < tail_tol ? hi : lo) = mid;
  }
  orbit.decay_window = hi;
  std::ostringstream label;
  label << "powerlaw-homoclinic(nu=" << nu << ",mu=" << mu << ",p=" << p
        << ")";
  orbit.label = label.str();
  return orbit;
}

HomoclinicOrbit map_orbit(const HomoclinicOrbit& orbit, const Mat2& P) {
  HomoclinicOrbit out = orbit;
  auto g = orbit.gamma;
  auto gd = orbit.gamma_dot;
  const Vec2 eq = orbit.saddle.equilibrium;
  out.gamma = [g, P, eq](double t) { return P * (g(t) - eq) + eq; };
  out.gamma_dot = [gd, P](double t) { return P * gd(t); };
  out.anchor = P * (orbit.anchor - eq) + eq;
  out.saddle.unstable_dir = P * orbit.saddle.unstable_dir;
  out.saddle.unstable_dir =
      out.saddle.unstable_dir / norm(out.saddle.unstable_dir);
  out.saddle.stable_dir = P * orbit.saddle.stable_dir;
  out.saddle.stable_dir = out.saddle.stable_dir / norm(out.saddle.stable_dir);
  out.label = orbit.label + "#mapped";
  return out;
}

namespace {

struct Sample {
  double t;
  Vec2 x;
};

}  // namespace

HomoclinicOrbit shoot_homoclinic(const PlanarSystem& sys,
                                 const SaddleData& saddle,
                                 const ShootOptions& opt) {
  const Vec2 eq = saddle.equilibrium;
  IntegratorOptions iopt;
  iopt.rtol = opt.rtol;
  iopt.atol = opt.atol;
  iopt.h_max = opt.sample_dt;

  auto rhs = [&sys](double, const std::array<double, 2>& y,
                    std::array<double, 2>& dy) {
    const Vec2 f = sys.f({y[0], y[1]});
    dy[0] = f.x;
    dy[1] = f.y;
  };

  std::vector<Sample> samples;
  std::array<double, 2> y{eq.x + opt.delta * saddle.unstable_dir.x,
                          eq.y + opt.delta * saddle.unstable_dir.y};
  double t = 0.0;
  samples.push_back({t, {y[0], y[1]}});

  // Leave the launch neighborhood before arming the return detector.
  const double stop_radius = std::max(opt.return_radius, 10.0 * opt.delta);
  bool armed = false;
  double return_t = -1.0;
  while (t < opt.max_time) {
    const double t_next = t + opt.sample_dt;
    y = integrate_to<2>(rhs, t, y, t_next, iopt);
    t = t_next;
    const Vec2 x{y[0], y[1]};
    samples.push_back({t, x});
    const double d = norm(x - eq);
    if (!armed && d > std::max(100.0 * opt.delta, 10.0 * stop_radius))
      armed = true;
    if (d > opt.box_radius)
      throw ConvergenceError(
          "shoot_homoclinic: orbit escapes the working box (no homoclinic "
          "found)");
    if (armed && d < stop_radius) {
      return_t = t;
      break;
    }
  }
  if (return_t < 0.0)
    throw ConvergenceError(
        "shoot_homoclinic: no return to the equilibrium within max_time");

  // Return-matching: the incoming direction must align with the stable
  // eigendirection.
  {
    const Vec2 back = samples.back().x - eq;
    const Vec2 u = back / norm(back);
    const double misalign = std::abs(wedge(u, saddle.stable_dir));
    if (misalign > opt.return_tol)
      throw ConvergenceError(
          "shoot_homoclinic: return-matching residual above tolerance");
  }

  // Anchor at maximal excursion. The excursion itself can be very flat at
  // the top, so when the orbit crosses the section {y = eq.y} there (the
  // symmetric case) the transversal crossing is refined by bisection;
  // otherwise fall back to a quadratic fit of ||x - eq||^2.
  std::size_t imax = 0;
  double dmax = -1.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double d = norm(samples[i].x - eq);
    if (d > dmax) {
      dmax = d;
      imax = i;
    }
  }
  double t_anchor = samples[imax].t;
  const std::size_t lo_i = imax >= 3 ? imax - 3 : 0;
  const std::size_t hi_i = std::min(imax + 3, samples.size() - 1);
  bool section_found = false;
  for (std::size_t i = lo_i; i < hi_i && !section_found; ++i) {
    const double yl = samples[i].x.y - eq.y;
    const double yr = samples[i + 1].x.y - eq.y;
    if (yl == 0.0) {
      t_anchor = samples[i].t;
      section_found = true;
    } else if (std::signbit(yl) != std::signbit(yr)) {
      double ta = samples[i].t, tb = samples[i + 1].t;
      std::array<double, 2> ys{samples[i].x.x, samples[i].x.y};
      const double ta0 = ta;
      const std::array<double, 2> ys0 = ys;
      for (int bis = 0; bis < 60 && tb - ta > 1e-13; ++bis) {
        const double tm = 0.5 * (ta + tb);
        const auto ym = integrate_to<2>(rhs, ta0, ys0, tm, iopt);
        if (std::signbit(ym[1] - eq.y) == std::signbit(yl))
          ta = tm;
        else
          tb = tm;
      }
      t_anchor = 0.5 * (ta + tb);
      section_found = true;
    }
  }
  if (!section_found && imax > 0 && imax + 1 < samples.size()) {
    auto d2 = [&](std::size_t i) {
      const Vec2 r = samples[i].x - eq;
      return dot(r, r);
    };
    const double dm = d2(imax - 1), d0 = d2(imax), dp = d2(imax + 1);
    const double denom = dm - 2.0 * d0 + dp;
    if (std::abs(denom) > 1e-30)
      t_anchor += 0.5 * opt.sample_dt * (dm - dp) / denom;
  }

  // Re-integrate from the refined anchor for a clean symmetric grid.
  std::array<double, 2> ya = integrate_to<2>(
      rhs, samples[imax].t, {samples[imax].x.x, samples[imax].x.y}, t_anchor,
      iopt);

  const double span_fwd = samples.back().t - t_anchor;
  const double span_bwd = t_anchor - samples.front().t;
  const double span = std::min(span_fwd, span_bwd);

  std::vector<double> ts;
  std::vector<Vec2> xs, dxs;
  const int n_side = int(span / opt.sample_dt);
  ts.resize(2 * n_side + 1);
  xs.resize(ts.size());
  dxs.resize(ts.size());
  // forward sweep
  std::array<double, 2> yc = ya;
  double tc = 0.0;
  ts[n_side] = 0.0;
  xs[n_side] = {ya[0], ya[1]};
  for (int k = 1; k <= n_side; ++k) {
    yc = integrate_to<2>(rhs, tc, yc, tc + opt.sample_dt, iopt);
    tc += opt.sample_dt;
    ts[n_side + k] = tc;
    xs[n_side + k] = {yc[0], yc[1]};
  }
  // backward sweep
  yc = ya;
  tc = 0.0;
  for (int k = 1; k <= n_side; ++k) {
    yc = integrate_to<2>(rhs, tc, yc, tc - opt.sample_dt, iopt);
    tc -= opt.sample_dt;
    ts[n_side - k] = tc;
    xs[n_side - k] = {yc[0], yc[1]};
  }
  for (std::size_t i = 0; i < ts.size(); ++i) dxs[i] = sys.f(xs[i]);

  auto curve = std::make_shared<HermiteCurve2>(ts, xs, dxs);
  const double T_rep = ts.back();

  HomoclinicOrbit orbit;
  orbit.saddle = saddle;
  orbit.anchor = {ya[0], ya[1]};
  orbit.tail_tol = opt.tail_tol;
  orbit.window = T_rep;
  orbit.closed_form = false;
  orbit.label = sys.name + "#shooting";
  const double omega = saddle.omega;
  orbit.gamma = [curve, T_rep, eq, omega](double t) -> Vec2 {
    if (t > T_rep)
      return eq + std::exp(-omega * (t - T_rep)) * (curve->eval(T_rep) - eq);
    if (t < -T_rep)
      return eq + std::exp(omega * (t + T_rep)) * (curve->eval(-T_rep) - eq);
    return curve->eval(t);
  };
  orbit.gamma_dot = [curve, T_rep, eq, omega](double t) -> Vec2 {
    if (t > T_rep)
      return -omega * std::exp(-omega * (t - T_rep)) *
             (curve->eval(T_rep) - eq);
    if (t < -T_rep)
      return omega * std::exp(omega * (t + T_rep)) * (curve->eval(-T_rep) - eq);
    return curve->deriv(t);
  };

  // Decay window: smallest T with both tails below tail_tol, measured
  // through the exponential extension when the stored window ends above it.
  auto tail_T = [&](double sign) {
    const double edge = norm(orbit.gamma(sign * T_rep) - eq);
    if (edge <= opt.tail_tol) {
      double tt = T_rep;
      while (tt > 1.0 && norm(orbit.gamma(sign * (tt - 0.1)) - eq) <
                             opt.tail_tol)
        tt -= 0.1;
      return tt;
    }
    return T_rep + std::log(edge / opt.tail_tol) / omega;
  };
  orbit.decay_window = std::max(tail_T(1.0), tail_T(-1.0));
  return orbit;
}

double orbit_ode_residual(const HomoclinicOrbit& orbit,
                          const PlanarSystem& sys, double t_max, int samples) {
  double worst = 0.0;
  for (int i = 0; i <= samples; ++i) {
    const double t = -t_max + 2.0 * t_max * i / samples;
    const Vec2 r = orbit.gamma_dot(t) - sys.f(orbit.gamma(t));
    worst = std::max(worst, norm(r));
  }
  return worst;
}

}  // namespace hgate
