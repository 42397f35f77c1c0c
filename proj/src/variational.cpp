#include "hgate/variational.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hgate/error.hpp"
#include "hgate/grid_integral.hpp"
#include "hgate/ode.hpp"

namespace hgate {
namespace {

std::vector<double> graded_grid(double T, double omega,
                                const FrameOptions& opt) {
  // Uniform over the core, geometrically stretched toward +-T with a cap,
  // symmetric about 0. Steps shrink with the dichotomy rate.
  const double scale = std::max(1.0, omega);
  std::vector<double> right;
  right.push_back(0.0);
  const double core = std::min(opt.core_span, T);
  double t = 0.0, h = opt.h_core / scale;
  while (t < core - 1e-12) {
    t = std::min(core, t + h);
    right.push_back(t);
  }
  while (t < T - 1e-12) {
    h = std::min(h * opt.stretch, opt.h_tail_max / scale);
    t = std::min(T, t + h);
    right.push_back(t);
  }
  std::vector<double> grid;
  grid.reserve(2 * right.size() - 1);
  for (std::size_t i = right.size(); i-- > 1;) grid.push_back(-right[i]);
  for (double v : right) grid.push_back(v);
  return grid;
}

double fit_log_slope(const std::vector<double>& t,
                     const std::vector<double>& logv) {
  // Least-squares slope of logv against t.
  double st = 0, sv = 0, stt = 0, stv = 0;
  const double n = double(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    st += t[i];
    sv += logv[i];
    stt += t[i] * t[i];
    stv += t[i] * logv[i];
  }
  return (n * stv - st * sv) / (n * stt - st * st);
}

}  // namespace

VariationalFrame build_frame(const PlanarSystem& sys,
                             const HomoclinicOrbit& orbit, double T,
                             const FrameOptions& opt) {
  if (T < orbit.decay_window)
    throw InvalidInput("build_frame: T below the orbit decay window (" +
                       std::to_string(orbit.decay_window) + ")");

  VariationalFrame frame;
  frame.orbit = std::make_shared<HomoclinicOrbit>(orbit);
  frame.sys = sys;
  frame.T = T;
  frame.omega = orbit.saddle.omega;
  frame.grid = graded_grid(T, frame.omega, opt);

  const Vec2 gp0 = sys.f(orbit.gamma(0.0));
  if (norm(gp0) < 1e-14)
    throw InvalidInput("build_frame: gamma'(0) vanishes");
  frame.zeta0 =
      opt.zeta0_override ? *opt.zeta0_override : perp(gp0) / dot(gp0, gp0);

  // zeta = solution of z' = Df(gamma(t)) z, integrated outward from t = 0 in
  // both directions (outward integration rides the growing mode, which is the
  // numerically stable way to capture zeta).
  auto rhs = [&](double t, const std::array<double, 2>& z,
                 std::array<double, 2>& dz) {
    const Mat2 A = sys.jacobian_f(orbit.gamma(t));
    const Vec2 v = A * Vec2{z[0], z[1]};
    dz[0] = v.x;
    dz[1] = v.y;
  };
  IntegratorOptions iopt;
  iopt.rtol = opt.rtol;
  iopt.atol = opt.atol;

  const std::size_t n = frame.grid.size();
  const std::size_t i0 =
      std::size_t(std::lower_bound(frame.grid.begin(), frame.grid.end(), 0.0) -
                  frame.grid.begin());
  std::vector<Vec2> zeta(n), dzeta(n);
  zeta[i0] = frame.zeta0;
  std::array<double, 2> z{frame.zeta0.x, frame.zeta0.y};
  for (std::size_t i = i0 + 1; i < n; ++i) {
    z = integrate_to<2>(rhs, frame.grid[i - 1], z, frame.grid[i], iopt);
    zeta[i] = {z[0], z[1]};
  }
  z = {frame.zeta0.x, frame.zeta0.y};
  for (std::size_t i = i0; i-- > 0;) {
    z = integrate_to<2>(rhs, frame.grid[i + 1], z, frame.grid[i], iopt);
    zeta[i] = {z[0], z[1]};
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Mat2 A = sys.jacobian_f(orbit.gamma(frame.grid[i]));
    dzeta[i] = A * zeta[i];
  }
  frame.zeta_curve = HermiteCurve2(frame.grid, zeta, dzeta);

  // Delta(t) = wedge(gamma'(t), zeta(t)); its derivative is trace(A) Delta
  // by the Abel identity, which we use as the exact Hermite slope. In
  // reference-orbit mode the gamma' column is not a variational solution and
  // the slope comes from the chain rule instead.
  std::vector<double> delta(n), ddelta(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = frame.grid[i];
    const Vec2 g = orbit.gamma(t);
    const Mat2 A = sys.jacobian_f(g);
    const Vec2 gp = sys.f(g);
    delta[i] = wedge(gp, zeta[i]);
    ddelta[i] = opt.reference_orbit_mode
                    ? wedge(A * orbit.gamma_dot(t), zeta[i]) +
                          wedge(gp, A * zeta[i])
                    : A.trace() * delta[i];
  }
  frame.delta_curve = HermiteCurve1(frame.grid, delta, ddelta);

  FrameDiagnostics diag;
  diag.delta_min_abs = std::abs(delta[0]);
  diag.delta_max_abs = std::abs(delta[0]);
  for (double d : delta) {
    diag.delta_min_abs = std::min(diag.delta_min_abs, std::abs(d));
    diag.delta_max_abs = std::max(diag.delta_max_abs, std::abs(d));
  }
  if (diag.delta_min_abs == 0.0 ||
      std::signbit(delta.front()) != std::signbit(delta.back()))
    throw Error("build_frame: Delta crosses zero, frame degenerate");

  // Abel cross-check: Delta from the wedge vs Delta(0) exp(int trace).
  const double delta0 = frame.delta_curve.eval(0.0);
  HermiteCurve1 trace_int = cumulative_integral(frame.grid, [&](double t) {
    return sys.jacobian_f(orbit.gamma(t)).trace();
  });
  const double tr0 = trace_int.eval(0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double abel = delta0 * std::exp(trace_int.eval(frame.grid[i]) - tr0);
    diag.abel_max_rel_err = std::max(
        diag.abel_max_rel_err, std::abs(delta[i] - abel) / std::abs(abel));
  }
  if (diag.abel_max_rel_err > opt.abel_tol && !opt.reference_orbit_mode)
    throw Error("build_frame: Abel identity violated, rel err = " +
                std::to_string(diag.abel_max_rel_err));

  diag.delta_limit_gap =
      std::abs(delta.back() - delta.front()) / std::abs(delta.back());

  if (sys.hamiltonian_flag) {
    for (double d : delta)
      diag.hamiltonian_delta_drift = std::max(
          diag.hamiltonian_delta_drift, std::abs(d - delta0) / std::abs(delta0));
    if (diag.hamiltonian_delta_drift > opt.hamiltonian_delta_tol &&
        !opt.reference_orbit_mode)
      throw Error("build_frame: Delta not constant for hamiltonian system");
  }

  // Tail growth diagnostics for zeta.
  {
    std::vector<double> ts, lv;
    for (std::size_t i = 0; i < n; ++i)
      if (frame.grid[i] > 0.75 * T) {
        ts.push_back(frame.grid[i]);
        lv.push_back(std::log(norm(zeta[i])));
      }
    if (ts.size() >= 3) diag.zeta_growth_slope_fwd = fit_log_slope(ts, lv);
    ts.clear();
    lv.clear();
    for (std::size_t i = 0; i < n; ++i)
      if (frame.grid[i] < -0.75 * T) {
        ts.push_back(frame.grid[i]);
        lv.push_back(std::log(norm(zeta[i])));
      }
    if (ts.size() >= 3) diag.zeta_growth_slope_bwd = fit_log_slope(ts, lv);
  }
  frame.diag = diag;

  frame.gamma_prime_l2sq = grid_integral(frame.grid, [&](double t) {
    const Vec2 gp = sys.f(orbit.gamma(t));
    return dot(gp, gp);
  });

  frame.dichotomy_k = check_dichotomy(frame);
  return frame;
}

double check_dichotomy(const VariationalFrame& frame,
                       std::optional<double> omega_override, double guard) {
  const double omega = omega_override.value_or(frame.omega);
  // Subsample the grid; the supremum is attained away from grid-resolution
  // scales, so ~200 points per side are plenty.
  std::vector<double> pts;
  const std::size_t stride = std::max<std::size_t>(1, frame.grid.size() / 400);
  for (std::size_t i = 0; i < frame.grid.size(); i += stride)
    pts.push_back(frame.grid[i]);
  pts.push_back(frame.grid.back());

  double k = 0.0;
  for (double t : pts) {
    if (t < 0.0) continue;
    const Vec2 gp = frame.gamma_prime(t);
    for (double s : pts) {
      if (!(t >= s && s >= 0.0)) continue;
      const Vec2 zs = frame.zeta(s);
      const double scale = std::exp(omega * (t - s));
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          k = std::max(k, std::abs(gp[i] * zs[j]) * scale);
      if (k > guard)
        throw Error("check_dichotomy: pairing constant exceeds guard; "
                    "omega or frame is wrong");
    }
  }
  for (double t : pts) {
    if (t > 0.0) continue;
    const Vec2 gp = frame.gamma_prime(t);
    for (double s : pts) {
      if (!(t <= s && s <= 0.0)) continue;
      const Vec2 zs = frame.zeta(s);
      const double scale = std::exp(omega * (s - t));
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          k = std::max(k, std::abs(gp[i] * zs[j]) * scale);
      if (k > guard)
        throw Error("check_dichotomy: pairing constant exceeds guard; "
                    "omega or frame is wrong");
    }
  }
  return k;
}

AsymptoticsReport check_asymptotics(const VariationalFrame& frame) {
  AsymptoticsReport rep;
  const double omega = frame.omega;
  auto row_at = [&](double t) {
    AsymptoticsRow r;
    r.t = t;
    r.gamma_prime_scaled = std::exp(omega * std::abs(t)) * frame.gamma_prime(t);
    r.zeta_scaled = std::exp(-omega * std::abs(t)) * frame.zeta(t);
    return r;
  };
  const double T = frame.T;
  const double decade = std::log(10.0) / omega;
  for (double t : {-T, -T + decade, -T + 2 * decade, 0.0, T - 2 * decade,
                   T - decade, T})
    rep.rows.push_back(row_at(t));

  auto drift = [](Vec2 a, Vec2 b) {
    const double scale = std::max(norm(a), norm(b));
    return scale > 0.0 ? norm(a - b) / scale : 0.0;
  };
  const AsymptoticsRow fwd0 = row_at(T - decade), fwd1 = row_at(T);
  const AsymptoticsRow bwd0 = row_at(-T + decade), bwd1 = row_at(-T);
  rep.gamma_prime_drift_fwd =
      drift(fwd0.gamma_prime_scaled, fwd1.gamma_prime_scaled);
  rep.gamma_prime_drift_bwd =
      drift(bwd0.gamma_prime_scaled, bwd1.gamma_prime_scaled);
  rep.zeta_drift_fwd = drift(fwd0.zeta_scaled, fwd1.zeta_scaled);
  rep.zeta_drift_bwd = drift(bwd0.zeta_scaled, bwd1.zeta_scaled);
  return rep;
}

}  // namespace hgate
