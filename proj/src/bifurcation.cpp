#include "hgate/bifurcation.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include <limits>

#include "hgate/concurrency.hpp"
#include "hgate/error.hpp"
#include "hgate/grid_integral.hpp"
#include "hgate/ode.hpp"

namespace hgate {
namespace {

DecayingIntegrand1D pairing_integrand(const VariationalFrame& frame,
                                      const ForcingFunction& F) {
  DecayingIntegrand1D d;
  auto fr = &frame;
  auto eval = F.evaluate;
  d.evaluate = [fr, eval](double s) {
    return wedge(fr->gamma_prime(s), eval(s)) / fr->delta(s);
  };
  // Even for merely bounded F the gamma' pairing decays at rate omega.
  d.decay_rate = frame.omega;
  d.core_window = std::min(frame.orbit->decay_window, 0.8 * frame.T);
  return d;
}

}  // namespace

QuadResult melnikov_residual(const VariationalFrame& frame,
                             const ForcingFunction& F, double tol) {
  return integrate_line(pairing_integrand(frame, F), tol);
}

double project_coefficient(const VariationalFrame& frame,
                           const ForcingFunction& F, double tol) {
  return melnikov_residual(frame, F, tol).value;
}

ForcingFunction project_p(const VariationalFrame& frame,
                          const ForcingFunction& F, double tol) {
  const double c = project_coefficient(frame, F, tol) / frame.gamma_prime_l2sq;
  ForcingFunction out;
  out.decay_rate = frame.omega;
  out.core_window = F.core_window;
  auto fr = std::make_shared<VariationalFrame>(frame);
  out.evaluate = [fr, c](double t) -> Vec2 {
    // Delta^2(t) J(t) = Delta(t) (-gamma_2'(t), gamma_1'(t)).
    return (c * fr->delta(t)) * perp(fr->gamma_prime(t));
  };
  return out;
}

GreenSolution green_solve(const VariationalFrame& frame,
                          const ForcingFunction& F, const GreenOptions& opt) {
  auto fr = std::make_shared<VariationalFrame>(frame);
  auto Feval = F.evaluate;

  auto zeta_pair = [fr, Feval](double s) {
    return wedge(fr->zeta(s), Feval(s)) / fr->delta(s);
  };
  auto gamma_pair = [fr, Feval](double s) {
    return wedge(fr->gamma_prime(s), Feval(s)) / fr->delta(s);
  };

  // Cumulative integrals on the frame grid: I_zeta from 0, I_gamma from the
  // left window edge.
  auto Izeta_raw = std::make_shared<HermiteCurve1>(
      cumulative_integral(frame.grid, zeta_pair));
  const double Izeta0 = Izeta_raw->eval(0.0);
  auto Igamma = std::make_shared<HermiteCurve1>(
      cumulative_integral(frame.grid, gamma_pair));
  const double Igamma_total = Igamma->eval(frame.grid.back());

  if (opt.enforce_bounded && std::abs(Igamma_total) > opt.solvability_tol)
    throw Error(
        "green_solve: solvability integral is " +
        std::to_string(Igamma_total) +
        "; the bounded formula does not apply (use the growth diagnostic)");

  // In bounded mode the I_gamma coefficient is represented from the near
  // window end on each side, so the growing column is never multiplied by
  // the quadrature noise of the (analytically zero) full-line integral.
  const double right_shift = opt.enforce_bounded ? Igamma_total : 0.0;
  const double x2 = opt.x2;
  GreenSolution sol;
  sol.x2 = x2;
  sol.z = [fr, Izeta_raw, Izeta0, Igamma, right_shift, x2](double t) -> Vec2 {
    const double izeta = Izeta_raw->eval(t) - Izeta0;
    const double igamma = Igamma->eval(t) - (t >= 0.0 ? right_shift : 0.0);
    return (x2 - izeta) * fr->gamma_prime(t) + igamma * fr->zeta(t);
  };

  for (double t : frame.grid)
    sol.sup_norm = std::max(sol.sup_norm, norm(sol.z(t)));

  if (opt.check_residual) {
    // Propagate through the true inhomogeneous equation over short spans and
    // compare against the formula; this validates formula, quadrature and
    // interpolation at integrator accuracy.
    IntegratorOptions iopt;
    iopt.rtol = 1e-12;
    iopt.atol = 1e-13;
    auto rhs = [&frame, &Feval](double t, const std::array<double, 2>& y,
                                std::array<double, 2>& dy) {
      const Mat2 A = frame.sys.jacobian_f(frame.gamma(t));
      const Vec2 v = A * Vec2{y[0], y[1]} + Feval(t);
      dy[0] = v.x;
      dy[1] = v.y;
    };
    const double span = 0.25;
    double worst = 0.0;
    for (double t = -0.8 * frame.T; t < 0.8 * frame.T; t += 2.1) {
      const Vec2 z0 = sol.z(t);
      auto y = integrate_to<2>(rhs, t, {z0.x, z0.y}, t + span, iopt);
      const Vec2 z1 = sol.z(t + span);
      worst = std::max(worst, norm(z1 - Vec2{y[0], y[1]}) / span);
    }
    sol.residual = worst;
    if (worst > opt.residual_tol)
      throw Error("green_solve: residual check failed, mismatch rate = " +
                  std::to_string(worst));
  }
  return sol;
}

GreenSolution green_solve_orthogonal(const VariationalFrame& frame,
                                     const ForcingFunction& F,
                                     bool check_residual) {
  // z(x2) = z(0) + x2 gamma', so one pass of the cumulative integrals
  // suffices; the shift along the kernel is then chosen analytically.
  GreenOptions opt;
  opt.x2 = 0.0;
  opt.check_residual = false;
  GreenSolution sol = green_solve(frame, F, opt);
  auto z0 = sol.z;
  const double inner = grid_integral(frame.grid, [&](double t) {
    return dot(z0(t), frame.gamma_prime(t));
  });
  const double x2 = -inner / frame.gamma_prime_l2sq;
  auto fr = std::make_shared<VariationalFrame>(frame);
  sol.x2 = x2;
  sol.z = [fr, z0, x2](double t) -> Vec2 {
    return z0(t) + x2 * fr->gamma_prime(t);
  };
  sol.sup_norm = 0.0;
  for (double t : frame.grid)
    sol.sup_norm = std::max(sol.sup_norm, norm(sol.z(t)));

  if (check_residual) {
    IntegratorOptions iopt;
    iopt.rtol = 1e-12;
    iopt.atol = 1e-13;
    auto Feval = F.evaluate;
    auto rhs = [fr, Feval](double t, const std::array<double, 2>& y,
                           std::array<double, 2>& dy) {
      const Mat2 A = fr->sys.jacobian_f(fr->gamma(t));
      const Vec2 v = A * Vec2{y[0], y[1]} + Feval(t);
      dy[0] = v.x;
      dy[1] = v.y;
    };
    const double span = 0.25;
    double worst = 0.0;
    for (double t = -0.8 * frame.T; t < 0.8 * frame.T; t += 2.1) {
      const Vec2 za = sol.z(t);
      auto y = integrate_to<2>(rhs, t, {za.x, za.y}, t + span, iopt);
      worst = std::max(worst, norm(sol.z(t + span) - Vec2{y[0], y[1]}) / span);
    }
    sol.residual = worst;
    if (worst > 1e-6)
      throw Error("green_solve_orthogonal: residual check failed, rate = " +
                  std::to_string(worst));
  }
  return sol;
}

double green_growth_diagnostic(const VariationalFrame& frame,
                               const ForcingFunction& F) {
  GreenOptions opt;
  opt.check_residual = false;
  opt.enforce_bounded = false;  // the growth is exactly what we measure
  const GreenSolution sol = green_solve(frame, F, opt);
  // Fit log||z|| against |t| on the forward tail, where the solvability
  // defect rides the growing mode.
  std::vector<double> ts, lv;
  for (double t : frame.grid)
    if (t > 0.6 * frame.T && norm(sol.z(t)) > 0.0) {
      ts.push_back(t);
      lv.push_back(std::log(norm(sol.z(t))));
    }
  double st = 0, sv = 0, stt = 0, stv = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    st += ts[i];
    sv += lv[i];
    stt += ts[i] * ts[i];
    stv += ts[i] * lv[i];
  }
  const double n = double(ts.size());
  return (n * stv - st * sv) / (n * stt - st * st);
}

Vec2 ls_remainder(const VariationalFrame& frame, double t, Vec2 z,
                  double alpha, double beta, double epsilon) {
  const Vec2 g = frame.gamma(t);
  const Vec2 base = alpha * g;
  return frame.sys.f(base + z) - alpha * frame.sys.f(g) -
         frame.sys.jacobian_f(g) * z +
         epsilon * frame.sys.g(base + z, t - beta);
}

void validate_params(const PerturbationParams& p) {
  if (!(std::abs(p.epsilon) <= 0.5))
    throw InvalidInput("perturbation parameters: |epsilon| <= 0.5 required");
  if (!(p.alpha >= 0.5 && p.alpha <= 1.5))
    throw InvalidInput("perturbation parameters: alpha in [0.5, 1.5] required");
  if (!std::isfinite(p.beta))
    throw InvalidInput("perturbation parameters: beta must be finite");
}

LSState solve_eta(const VariationalFrame& frame, double xi, double alpha,
                  double beta, double epsilon, const EtaOptions& opt) {
  validate_params({epsilon, beta, alpha});
  LSState st;
  st.xi = xi;
  st.alpha = alpha;
  st.beta = beta;
  st.epsilon = epsilon;
  st.eta = [](double) { return Vec2{}; };

  auto fr = std::make_shared<VariationalFrame>(frame);
  double prev_update = -1.0;
  int rising = 0;

  for (int it = 0; it < opt.max_iter; ++it) {
    auto eta_prev = st.eta;
    ForcingFunction Fn;
    Fn.decay_rate = frame.omega;
    Fn.core_window = std::min(frame.orbit->decay_window, 0.8 * frame.T);
    Fn.evaluate = [fr, eta_prev, xi, alpha, beta, epsilon](double t) -> Vec2 {
      const Vec2 z = xi * fr->gamma_prime(t) + eta_prev(t);
      return ls_remainder(*fr, t, z, alpha, beta, epsilon);
    };
    // Remove the obstruction component, then invert L with the orthogonal
    // kernel normalization.
    const double c =
        project_coefficient(frame, Fn, opt.quad_tol) / frame.gamma_prime_l2sq;
    ForcingFunction Fproj;
    Fproj.decay_rate = Fn.decay_rate;
    Fproj.core_window = Fn.core_window;
    auto Fn_eval = Fn.evaluate;
    Fproj.evaluate = [fr, Fn_eval, c](double t) -> Vec2 {
      return Fn_eval(t) - (c * fr->delta(t)) * perp(fr->gamma_prime(t));
    };
    const GreenSolution next = green_solve_orthogonal(frame, Fproj, false);

    double update = 0.0;
    for (double t : frame.grid)
      update = std::max(update, norm(next.z(t) - eta_prev(t)));
    st.eta = next.z;
    st.eta_sup = next.sup_norm;
    st.iterations = it + 1;

    if (update <= opt.tol) {
      st.converged = true;
      break;
    }
    if (!std::isfinite(update) || update > 1e6)
      throw ConvergenceError(
          "solve_eta: iteration diverged; outside the contraction region");
    if (prev_update > 0.0) {
      st.contraction_ratio = update / prev_update;
      rising = st.contraction_ratio >= 1.0 ? rising + 1 : 0;
      if (rising >= 3)
        throw ConvergenceError(
            "solve_eta: fixed point not contracting (ratio >= 1 over 3 "
            "steps); outside the contraction region");
    }
    prev_update = update;
  }
  if (!st.converged)
    throw ConvergenceError("solve_eta: iteration cap reached without "
                           "convergence");

  st.orthogonality = grid_integral(frame.grid, [&](double t) {
    return dot(st.eta(t), frame.gamma_prime(t));
  });
  return st;
}

double bifurcation_B(const VariationalFrame& frame, double xi, double alpha,
                     double beta, double epsilon, const EtaOptions& opt,
                     LSState* state_out) {
  const LSState st = solve_eta(frame, xi, alpha, beta, epsilon, opt);
  auto fr = std::make_shared<VariationalFrame>(frame);
  auto eta = st.eta;
  ForcingFunction F;
  F.decay_rate = frame.omega;
  F.core_window = std::min(frame.orbit->decay_window, 0.8 * frame.T);
  F.evaluate = [fr, eta, xi, alpha, beta, epsilon](double t) -> Vec2 {
    const Vec2 z = xi * fr->gamma_prime(t) + eta(t);
    return ls_remainder(*fr, t, z, alpha, beta, epsilon);
  };
  const double B = project_coefficient(frame, F, opt.quad_tol);
  if (state_out) *state_out = st;
  return B;
}

std::string to_string(ScanVar v) {
  switch (v) {
    case ScanVar::Xi:
      return "xi";
    case ScanVar::Alpha:
      return "alpha";
    default:
      return "beta";
  }
}

BifurcationScan scan_function(
    const std::function<double(double, double)>& fn, const ScanSlice& slice,
    const std::vector<double>& eps_list) {
  BifurcationScan scan;
  scan.slice = slice;
  scan.eps_list = eps_list;
  scan.samples.resize(eps_list.size());

  // Sample the whole (eps, slice) grid in parallel; output is written by
  // index, so the result does not depend on the schedule.
  for (std::size_t ie = 0; ie < eps_list.size(); ++ie)
    scan.samples[ie].resize(slice.samples);
  parallel_for(eps_list.size() * std::size_t(slice.samples),
               [&](std::size_t flat) {
                 const std::size_t ie = flat / std::size_t(slice.samples);
                 const int i = int(flat % std::size_t(slice.samples));
                 ScanPoint& pt = scan.samples[ie][i];
                 pt.value = slice.lo + (slice.hi - slice.lo) * i /
                                           double(slice.samples - 1);
                 try {
                   pt.B = fn(pt.value, eps_list[ie]);
                 } catch (const Error& e) {
                   pt.ok = false;
                   pt.error = e.what();
                   pt.B = std::numeric_limits<double>::quiet_NaN();
                 }
               });

  for (std::size_t ie = 0; ie < eps_list.size(); ++ie) {
    const double eps = eps_list[ie];
    auto& row = scan.samples[ie];
    // Bracket sign changes between consecutive valid samples and refine.
    for (int i = 0; i + 1 < slice.samples; ++i) {
      const ScanPoint& l = row[i];
      const ScanPoint& r = row[i + 1];
      if (!l.ok || !r.ok) continue;
      if (std::max(std::abs(l.B), std::abs(r.B)) < slice.root_noise_floor)
        continue;
      if (l.B == 0.0) {
        scan.roots.push_back({eps, l.value});
        continue;
      }
      if (std::signbit(l.B) == std::signbit(r.B)) continue;
      double a = l.value, b = r.value, fa = l.B;
      while (b - a > 1e-10) {
        const double m = 0.5 * (a + b);
        double fm;
        try {
          fm = fn(m, eps);
        } catch (const Error&) {
          break;
        }
        if (fm == 0.0) {
          a = b = m;
          break;
        }
        if (std::signbit(fm) == std::signbit(fa)) {
          a = m;
          fa = fm;
        } else {
          b = m;
        }
      }
      scan.roots.push_back({eps, 0.5 * (a + b)});
    }
    if (slice.samples > 0 && row.back().ok && row.back().B == 0.0)
      scan.roots.push_back({eps, row.back().value});
  }

  // Root counts at the smallest |eps| of each sign.
  auto count_roots = [&](double eps) {
    int n = 0;
    for (const ScanRoot& r : scan.roots)
      if (r.epsilon == eps) ++n;
    return n;
  };
  double best_pos = 0.0, best_neg = 0.0;
  for (double e : eps_list) {
    if (e > 0.0 && (best_pos == 0.0 || e < best_pos)) best_pos = e;
    if (e < 0.0 && (best_neg == 0.0 || e > best_neg)) best_neg = e;
  }
  if (best_pos != 0.0) scan.roots_pos = count_roots(best_pos);
  if (best_neg != 0.0) scan.roots_neg = count_roots(best_neg);

  const int p = scan.roots_pos, n = scan.roots_neg;
  if (p >= 0 && n >= 0 && ((p == 2 && n == 0) || (p == 0 && n == 2)))
    scan.classification = "sign-dependent pair";
  else if (p == 2 && n == 2)
    scan.classification = "sign-independent pair";
  else if ((p == 1 || p < 0) && (n == 1 || n < 0) && (p == 1 || n == 1))
    scan.classification = "single persistent";
  else if (p <= 0 && n <= 0)
    scan.classification = "no roots";
  else
    scan.classification = "unclassified";
  return scan;
}

BifurcationScan scan_roots(const VariationalFrame& frame,
                           const ScanSlice& slice,
                           const std::vector<double>& eps_list,
                           const EtaOptions& opt) {
  auto fn = [&frame, &slice, &opt](double v, double eps) {
    double xi = slice.xi, alpha = slice.alpha, beta = slice.beta;
    switch (slice.var) {
      case ScanVar::Xi:
        xi = v;
        break;
      case ScanVar::Alpha:
        alpha = v;
        break;
      case ScanVar::Beta:
        beta = v;
        break;
    }
    return bifurcation_B(frame, xi, alpha, beta, eps, opt);
  };
  return scan_function(fn, slice, eps_list);
}

double phase_min_distance(const std::function<Vec2(double)>& x,
                          const HomoclinicOrbit& orbit, double T_compare,
                          double phase_range, double* best_phase) {
  const int n_grid = 600;
  auto dist_at = [&](double phase) {
    double worst = 0.0;
    for (int i = 0; i <= n_grid; ++i) {
      const double t = -T_compare + 2.0 * T_compare * i / n_grid;
      worst = std::max(worst, norm(x(t - phase) - orbit.gamma(t)));
    }
    return worst;
  };

  double best_b = 0.0, best_d = dist_at(0.0);
  const int n_phase = 25;
  for (int i = 0; i <= n_phase; ++i) {
    const double b = -phase_range + 2.0 * phase_range * i / n_phase;
    const double d = dist_at(b);
    if (d < best_d) {
      best_d = d;
      best_b = b;
    }
  }
  // Golden-section refinement around the coarse minimum.
  const double gr = 0.6180339887498949;
  double a = best_b - 2.0 * phase_range / n_phase;
  double b = best_b + 2.0 * phase_range / n_phase;
  double c1 = b - gr * (b - a), c2 = a + gr * (b - a);
  double f1 = dist_at(c1), f2 = dist_at(c2);
  for (int it = 0; it < 40 && (b - a) > 1e-10; ++it) {
    if (f1 < f2) {
      b = c2;
      c2 = c1;
      f2 = f1;
      c1 = b - gr * (b - a);
      f1 = dist_at(c1);
    } else {
      a = c1;
      c1 = c2;
      f1 = f2;
      c2 = a + gr * (b - a);
      f2 = dist_at(c2);
    }
  }
  const double bm = 0.5 * (a + b);
  const double dm = dist_at(bm);
  if (best_phase) *best_phase = dm < best_d ? bm : best_b;
  return std::min(dm, best_d);
}

ReconstructedSolution reconstruct_solution(const VariationalFrame& frame,
                                           double xi, double alpha, double beta,
                                           double epsilon,
                                           const EtaOptions& opt) {
  ReconstructedSolution out;
  bifurcation_B(frame, xi, alpha, beta, epsilon, opt, &out.state);

  auto fr = std::make_shared<VariationalFrame>(frame);
  auto eta = out.state.eta;
  out.x = [fr, eta, xi, alpha, beta](double tau) -> Vec2 {
    const double t = tau + beta;
    return alpha * fr->gamma(t) + xi * fr->gamma_prime(t) + eta(t);
  };

  // ODE residual by finite differences of the reconstructed solution against
  // the perturbed field, sampled away from the window edges.
  const double h = 1e-3;
  const double Tr = 0.8 * frame.T;
  double worst = 0.0;
  for (double tau = -Tr; tau <= Tr; tau += 0.37) {
    const Vec2 xm2 = out.x(tau - 2 * h), xm1 = out.x(tau - h);
    const Vec2 xp1 = out.x(tau + h), xp2 = out.x(tau + 2 * h);
    const Vec2 xd = (1.0 / (12.0 * h)) * (xm2 - 8.0 * xm1 + 8.0 * xp1 - xp2);
    const Vec2 xc = out.x(tau);
    const Vec2 rhs = frame.sys.f(xc) + epsilon * frame.sys.g(xc, tau);
    worst = std::max(worst, norm(xd - rhs));
  }
  out.ode_residual = worst;

  const double range = std::abs(beta) + 1.0;
  const double Tcmp =
      std::min(frame.T - range - 0.5, frame.orbit->decay_window);
  out.distance_to_gamma =
      phase_min_distance(out.x, *frame.orbit, Tcmp, range, &out.best_phase);
  return out;
}

}  // namespace hgate
