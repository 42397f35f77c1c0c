#include "hgate/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "hgate/error.hpp"
#include "hgate/grid_integral.hpp"

namespace hgate {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Holds:
      return "holds";
    case Verdict::Fails:
      return "fails";
    default:
      return "inconclusive";
  }
}

namespace {

Verdict classify(const QuadResult& q, const ConditionThresholds& th) {
  const double mag = std::abs(q.value);
  if (mag > std::max(th.zero_threshold, 3.0 * q.abs_error_estimate))
    return Verdict::Holds;
  if (mag <= th.zero_threshold) return Verdict::Fails;
  return Verdict::Inconclusive;
}

CondScalar make_scalar(const QuadResult& q, const ConditionThresholds& th) {
  CondScalar c;
  c.quad = q;
  c.verdict = classify(q, th);
  return c;
}

/// (Df(gamma) gamma - f(gamma))_k, the recurring bracket of C3/C4/C5.
double radial_defect(const VariationalFrame& fr, double t, int k) {
  const Vec2 g = fr.gamma(t);
  const Vec2 v = fr.sys.jacobian_f(g) * g - fr.sys.f(g);
  return v[k];
}

DecayingIntegrand1D line_integrand(const VariationalFrame& fr,
                                   std::function<double(double)> f,
                                   double rate_factor = 1.0) {
  DecayingIntegrand1D d;
  d.evaluate = std::move(f);
  d.decay_rate = rate_factor * fr.omega;
  d.core_window = std::min(fr.orbit->decay_window, 0.8 * fr.T);
  return d;
}

/// Axis factor of a separable plane integrand, sampled once on a uniform
/// grid and interpolated, with an exponential tail beyond the frame window.
/// The plane quadratures evaluate these factors millions of times; direct
/// evaluation of the kappa machinery at every node would dominate the run.
class SampledFactor {
 public:
  SampledFactor(const VariationalFrame& fr,
                const std::function<double(double)>& fn, double tail_rate)
      : T_(fr.T), rate_(tail_rate) {
    const double h = 0.0125 / std::max(1.0, fr.omega);
    const std::size_t n = std::size_t(2.0 * T_ / h) + 1;
    std::vector<double> t(n), v(n), m(n);
    for (std::size_t i = 0; i < n; ++i) {
      t[i] = -T_ + 2.0 * T_ * double(i) / double(n - 1);
      v[i] = fn(t[i]);
    }
    const double dt = t[1] - t[0];
    for (std::size_t i = 0; i < n; ++i) {
      if (i >= 2 && i + 2 < n)
        m[i] = (v[i - 2] - 8 * v[i - 1] + 8 * v[i + 1] - v[i + 2]) / (12 * dt);
      else if (i >= 1 && i + 1 < n)
        m[i] = (v[i + 1] - v[i - 1]) / (2 * dt);
      else
        m[i] = i == 0 ? (v[1] - v[0]) / dt : (v[n - 1] - v[n - 2]) / dt;
    }
    curve_ = HermiteCurve1(std::move(t), std::move(v), std::move(m));
    v_lo_ = curve_.eval(-T_);
    v_hi_ = curve_.eval(T_);
  }

  double operator()(double t) const {
    if (t > T_) return v_hi_ * std::exp(-rate_ * (t - T_));
    if (t < -T_) return v_lo_ * std::exp(-rate_ * (-t - T_));
    return curve_.eval(t);
  }

 private:
  HermiteCurve1 curve_;
  double T_, rate_;
  double v_lo_ = 0.0, v_hi_ = 0.0;
};

}  // namespace

CondScalar cond_C1(const VariationalFrame& frame,
                   const ConditionThresholds& th) {
  auto integrand = [&frame](double s) {
    const Vec2 g = frame.gamma(s);
    const Vec2 fg = frame.sys.f(g);
    return wedge(fg, frame.sys.jacobian_f(g) * g) / frame.delta(s);
  };
  const QuadResult q =
      integrate_line(line_integrand(frame, integrand, 2.0), th.line_tol);
  return make_scalar(q, th);
}

CondScalar cond_C1p(const VariationalFrame& frame, double beta,
                    const ConditionThresholds& th) {
  auto integrand = [&frame, beta](double s) {
    const Vec2 g = frame.gamma(s);
    return wedge(frame.sys.f(g), frame.sys.g(g, s - beta)) / frame.delta(s);
  };
  const QuadResult q =
      integrate_line(line_integrand(frame, integrand, 1.0), th.line_tol);
  return make_scalar(q, th);
}

C2Result cond_C2(const HomoclinicOrbit& orbit, const PlanarSystem& sys,
                 double threshold) {
  C2Result out;
  const double T = std::max(orbit.decay_window, 1.0);
  const int n = 4000;
  for (int i = 0; i <= n; ++i) {
    const double t = -T + 2.0 * T * i / n;
    const Vec2 g = orbit.gamma(t);
    const double w = std::abs(wedge(g, sys.f(g)));
    if (w > out.sup) {
      out.sup = w;
      out.argmax_t = t;
    }
  }
  out.verdict = out.sup > threshold ? Verdict::Holds : Verdict::Fails;
  return out;
}

CondScalar cond_C3(const VariationalFrame& frame, double beta,
                   const ConditionThresholds& th) {
  // f2(gamma(s)) f1(gamma(t)) [G(s,t) ^ F-hat(s,t)] / (Delta(t) Delta(s))
  // splits into products of four axis factors; s is the inner variable.
  const SampledFactor a(frame, [&](double s) {
    return frame.sys.f(frame.gamma(s)).y * frame.sys.g(frame.gamma(s), s - beta).x /
           frame.delta(s);
  }, frame.omega);
  const SampledFactor b(frame, [&](double t) {
    return frame.sys.f(frame.gamma(t)).x * radial_defect(frame, t, 1) /
           frame.delta(t);
  }, frame.omega);
  const SampledFactor c(frame, [&](double s) {
    return frame.sys.f(frame.gamma(s)).y * radial_defect(frame, s, 0) /
           frame.delta(s);
  }, frame.omega);
  const SampledFactor d(frame, [&](double t) {
    return frame.sys.f(frame.gamma(t)).x * frame.sys.g(frame.gamma(t), t - beta).y /
           frame.delta(t);
  }, frame.omega);
  auto integrand = [&](double s, double t) { return a(s) * b(t) - c(s) * d(t); };
  const double core = std::min(frame.orbit->decay_window, 0.8 * frame.T);
  QuadOptions qopt;
  qopt.tol = th.plane_tol;
  const QuadResult q = integrate_plane(integrand, frame.omega, core, qopt);
  return make_scalar(q, th);
}

namespace {

C4Result cond_C4_impl(const VariationalFrame& frame, double beta,
                      const ConditionThresholds& th, bool primed) {
  // Unprimed: a = 2 (f_2 prefactors), b = 1; primed swaps the roles.
  const int a = primed ? 0 : 1;
  const int b = primed ? 1 : 0;
  C4Result out;

  auto f41 = [&, a, b](double s) {
    const Vec2 gs = frame.gamma(s);
    return frame.sys.f(gs)[a] * frame.sys.g(gs, s - beta)[b] / frame.delta(s);
  };
  out.f1 = make_scalar(
      integrate_line(line_integrand(frame, f41, 1.0), th.line_tol), th);

  auto fbar = [&](double t, int k) -> Vec2 {
    const Vec2 g = frame.gamma(t);
    const auto H = frame.sys.hessians_f(g);
    return {sum_entries(H[k]), radial_defect(frame, t, k)};
  };
  // The f prefactor and the F-bar factor carry opposite indices on each
  // axis: f_1(gamma(t)) pairs with F-bar_2(t), f_2(gamma(s)) with F-bar_1(s).
  {
    const SampledFactor tx(frame, [&](double t) {
      return frame.sys.f(frame.gamma(t))[b] * fbar(t, a).x / frame.delta(t);
    }, frame.omega);
    const SampledFactor ty(frame, [&](double t) {
      return frame.sys.f(frame.gamma(t))[b] * fbar(t, a).y / frame.delta(t);
    }, frame.omega);
    const SampledFactor sx(frame, [&](double s) {
      return frame.sys.f(frame.gamma(s))[a] * fbar(s, b).x / frame.delta(s);
    }, frame.omega);
    const SampledFactor sy(frame, [&](double s) {
      return frame.sys.f(frame.gamma(s))[a] * fbar(s, b).y / frame.delta(s);
    }, frame.omega);
    auto f42 = [&](double s, double t) {
      return tx(t) * sy(s) - ty(t) * sx(s);
    };
    QuadOptions qopt;
    qopt.tol = th.plane_tol;
    const double core = std::min(frame.orbit->decay_window, 0.8 * frame.T);
    out.f2 = make_scalar(integrate_plane(f42, frame.omega, core, qopt), th);
  }

  auto f43 = [&, a, b](double s) {
    return frame.sys.f(frame.gamma(s))[a] * radial_defect(frame, s, b) /
           frame.delta(s);
  };
  out.f3 = make_scalar(
      integrate_line(line_integrand(frame, f43, 2.0), th.line_tol), th);

  out.f3_degenerate =
      std::abs(out.f3.quad.value) <= th.kappa_denominator_tol;
  if (out.f3_degenerate && !primed)
    out.f3.note = "kappa1 denominator at zero";

  const bool all_nonzero = out.f1.verdict == Verdict::Holds &&
                           out.f2.verdict == Verdict::Holds &&
                           out.f3.verdict == Verdict::Holds;
  const bool any_zero = out.f1.verdict == Verdict::Fails ||
                        out.f2.verdict == Verdict::Fails ||
                        out.f3.verdict == Verdict::Fails;
  out.verdict = all_nonzero ? Verdict::Holds
                            : (any_zero ? Verdict::Fails
                                        : Verdict::Inconclusive);
  return out;
}

}  // namespace

C4Result cond_C4(const VariationalFrame& frame, double beta,
                 const ConditionThresholds& th) {
  return cond_C4_impl(frame, beta, th, false);
}

C4Result cond_C4p(const VariationalFrame& frame, double beta,
                  const ConditionThresholds& th) {
  return cond_C4_impl(frame, beta, th, true);
}

KappaFunctions compute_kappas(const VariationalFrame& frame, double beta,
                              const ConditionThresholds& th) {
  KappaFunctions out;
  out.beta = beta;

  // kappa1 = -F41 / F43. Both integrals vanish identically for systems whose
  // first component is linear; that 0/0 is resolved to kappa1 = 0 since the
  // kappa1 term then drops out of the C5 integrand.
  const C4Result c4 = cond_C4_impl(frame, beta, th, false);
  const double num = c4.f1.quad.value;
  const double den = c4.f3.quad.value;
  if (std::abs(den) <= th.kappa_denominator_tol) {
    if (std::abs(num) <= th.kappa_denominator_tol) {
      out.kappa1 = 0.0;
      out.kappa1_degenerate = true;
    } else {
      throw Error("compute_kappas: kappa1 denominator below threshold (" +
                  std::to_string(den) + ") with nonzero numerator");
    }
  } else {
    out.kappa1 = -num / den;
  }

  // Cumulative inner integrals on the frame grid. The "-infinity" ends start
  // at the window edge with a first-order exponential tail correction.
  auto c1_integrand = [&frame](double s) {
    const Vec2 g = frame.gamma(s);
    const Vec2 fg = frame.sys.f(g);
    return wedge(fg, frame.sys.jacobian_f(g) * g) / frame.delta(s);
  };
  auto c1p_integrand = [&frame, beta](double s) {
    const Vec2 g = frame.gamma(s);
    return wedge(frame.sys.f(g), frame.sys.g(g, s - beta)) / frame.delta(s);
  };
  auto defect_wedge_zeta = [&frame](double s) {
    const Vec2 d{radial_defect(frame, s, 0), radial_defect(frame, s, 1)};
    return wedge(d, frame.zeta(s)) / frame.delta(s);
  };
  auto g_wedge_zeta = [&frame, beta](double s) {
    return wedge(frame.sys.g(frame.gamma(s), s - beta), frame.zeta(s)) /
           frame.delta(s);
  };

  auto K2a = std::make_shared<HermiteCurve1>(
      cumulative_integral(frame.grid, c1_integrand));
  // The full-line C1 integral vanishes for every planar homoclinic (the
  // integrand telescopes to a boundary term), so on the right half the
  // running integral is represented from the right end. Otherwise the
  // quadrature noise of the total would be amplified by the growing factor
  // zeta_j(t).
  const double K2a_total = K2a->eval(frame.grid.back());
  auto K3a = std::make_shared<HermiteCurve1>(
      cumulative_integral(frame.grid, c1p_integrand));
  // The "from 0" integrals: build cumulative from the left edge and subtract
  // the value at 0.
  auto K2b_raw = std::make_shared<HermiteCurve1>(
      cumulative_integral(frame.grid, defect_wedge_zeta));
  auto K3b_raw = std::make_shared<HermiteCurve1>(
      cumulative_integral(frame.grid, g_wedge_zeta));
  const double K2b0 = K2b_raw->eval(0.0);
  const double K3b0 = K3b_raw->eval(0.0);

  auto fr = std::make_shared<VariationalFrame>(frame);
  out.kappa2 = [fr, K2a, K2a_total, K2b_raw, K2b0](double t, int j) {
    const double k2a = K2a->eval(t) - (t >= 0.0 ? K2a_total : 0.0);
    return fr->zeta(t)[j] * k2a +
           fr->sys.f(fr->gamma(t))[j] * (K2b_raw->eval(t) - K2b0);
  };
  out.kappa3 = [fr, K3a, K3b_raw, K3b0](double t, int j) {
    return fr->zeta(t)[j] * K3a->eval(t) +
           fr->sys.f(fr->gamma(t))[j] * (K3b_raw->eval(t) - K3b0);
  };

  // Finiteness on the working grid.
  for (double t : frame.grid)
    for (int j = 0; j < 2; ++j)
      if (!std::isfinite(out.kappa2(t, j)) || !std::isfinite(out.kappa3(t, j)))
        throw Error("compute_kappas: non-finite kappa value on the grid");
  return out;
}

CondScalar cond_C5(const VariationalFrame& frame, double beta,
                   const ConditionOptions& opt) {
  const ConditionThresholds& th = opt.thresholds;
  CondScalar out;
  KappaFunctions kap;
  try {
    kap = compute_kappas(frame, beta, th);
  } catch (const Error& e) {
    out.status = std::string("kappa failure: ") + e.what();
    out.verdict = Verdict::Inconclusive;
    return out;
  }

  auto grad_g_sum = [&frame, beta](double t, int k) {
    const Mat2 dg = frame.sys.grad_g(frame.gamma(t), t - beta);
    return dg(k, 0) + dg(k, 1);
  };
  auto kappa_weight = [&](double t) -> Vec2 {
    const Vec2 g = frame.gamma(t);
    return {kap.kappa1 * g.x + kap.kappa2(t, 0) + kap.kappa3(t, 0),
            kap.kappa1 * g.y + kap.kappa2(t, 1) + kap.kappa3(t, 1)};
  };
  auto ftilde = [&](double t, int k) -> Vec2 {
    const auto H = frame.sys.hessians_f(frame.gamma(t));
    return {grad_g_sum(t, k) + colsum_contract(H[k], kappa_weight(t)),
            radial_defect(frame, t, k)};
  };
  const SampledFactor tx(frame, [&](double t) {
    return frame.sys.f(frame.gamma(t)).x * ftilde(t, 1).x / frame.delta(t);
  }, frame.omega);
  const SampledFactor ty(frame, [&](double t) {
    return frame.sys.f(frame.gamma(t)).x * ftilde(t, 1).y / frame.delta(t);
  }, frame.omega);
  const SampledFactor sx(frame, [&](double s) {
    return frame.sys.f(frame.gamma(s)).y * ftilde(s, 0).x / frame.delta(s);
  }, frame.omega);
  const SampledFactor sy(frame, [&](double s) {
    return frame.sys.f(frame.gamma(s)).y * ftilde(s, 0).y / frame.delta(s);
  }, frame.omega);
  auto integrand = [&](double s, double t) {
    return tx(t) * sy(s) - ty(t) * sx(s);
  };

  QuadOptions qopt;
  qopt.tol = th.plane_tol;
  qopt.enforce_decay = opt.c5_enforce_decay;
  qopt.truncation_override = opt.c5_truncation_override;
  const double core = std::min(frame.orbit->decay_window, 0.8 * frame.T);
  try {
    out = make_scalar(integrate_plane(integrand, frame.omega, core, qopt), th);
  } catch (const DecayError& e) {
    out.status = std::string("refused: ") + e.what();
    out.verdict = Verdict::Inconclusive;
    return out;
  }
  if (kap.kappa1_degenerate)
    out.note = "kappa1 = 0/0 resolved to 0 (degenerate denominator)";
  if (!opt.c5_enforce_decay)
    out.note += std::string(out.note.empty() ? "" : "; ") +
                "fixed-window evaluation, decay not verified";
  return out;
}

C6Result cond_C6(const PlanarSystem& sys, const HomoclinicOrbit& orbit,
                 Vec2 box_lo, Vec2 box_hi, unsigned seed, double tol) {
  C6Result out;
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> ux(box_lo.x, box_hi.x);
  std::uniform_real_distribution<double> uy(box_lo.y, box_hi.y);
  std::uniform_real_distribution<double> ut(0.0, 6.283185307179586);

  std::vector<Vec2> points;
  const int grid_n = 5;
  for (int i = 0; i <= grid_n; ++i)
    for (int j = 0; j <= grid_n; ++j)
      points.push_back({box_lo.x + (box_hi.x - box_lo.x) * i / grid_n,
                        box_lo.y + (box_hi.y - box_lo.y) * j / grid_n});
  for (int k = 0; k < 20; ++k) points.push_back({ux(rng), uy(rng)});
  // Points on the orbit itself are the most relevant ones.
  for (int k = 0; k <= 10; ++k)
    points.push_back(
        orbit.gamma(-orbit.decay_window + 2.0 * orbit.decay_window * k / 10));

  std::vector<std::pair<double, double>> time_pairs = {
      {0.0, 3.141592653589793}, {0.0, 1.0}, {1.0, 2.5}, {-1.0, 1.5}};
  for (int k = 0; k < 8; ++k) time_pairs.push_back({ut(rng), ut(rng)});

  for (const Vec2& x : points) {
    for (const auto& [t1, t2] : time_pairs) {
      if (t1 == t2) continue;
      const Vec2 d = sys.g(x, t1) - sys.g(x, t2);
      if (norm_inf(d) > tol) {
        out.holds = true;
        out.witness = C6Witness{x, t1, t2, norm_inf(d)};
        return out;
      }
    }
  }
  return out;
}

double line_integral_F1p(const HomoclinicOrbit& orbit, const PlanarSystem& sys,
                         double beta, double delta0, double tol) {
  // Invert gamma_1 on the incoming branch (t <= 0) by bisection; the built-in
  // family has gamma_1 increasing there from the equilibrium to the anchor.
  const double T = orbit.decay_window + 8.0 / std::max(orbit.saddle.omega, 0.1);
  const double x_lo = orbit.gamma(-T).x;
  const double x_hi = orbit.anchor.x;
  auto time_of_x = [&](double x) {
    double lo = -T, hi = 0.0;
    for (int i = 0; i < 80; ++i) {
      const double mid = 0.5 * (lo + hi);
      (orbit.gamma(mid).x < x ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };

  auto integrand = [&](double x) {
    const double tx = time_of_x(x);  // branch time, <= 0
    const Vec2 up = orbit.gamma(tx);
    const Vec2 dn = orbit.gamma(-tx);
    const Vec2 g_up = sys.g(up, tx - beta);
    const Vec2 g_dn = sys.g(dn, -tx - beta);
    double val = g_up.y - g_dn.y;
    // dy contribution of a two-component perturbation: dy = (f2/f1) dx on
    // each branch.
    const Vec2 f_up = sys.f(up);
    const Vec2 f_dn = sys.f(dn);
    if (g_up.x != 0.0 || g_dn.x != 0.0)
      val -= g_up.x * (f_up.y / f_up.x) - g_dn.x * (f_dn.y / f_dn.x);
    return val;
  };
  const QuadResult q = integrate_interval(integrand, x_lo, x_hi, tol);
  return q.value / delta0;
}

ConditionReport evaluate_conditions(const VariationalFrame& frame,
                                    const ConditionOptions& opt) {
  ConditionReport rep;
  rep.system_name = frame.sys.name;
  rep.beta = opt.beta;
  rep.thresholds = opt.thresholds;
  rep.delta0 = frame.delta(0.0);

  auto guarded = [&](const std::function<CondScalar()>& eval) -> CondScalar {
    try {
      return eval();
    } catch (const Error& e) {
      CondScalar c;
      c.status = std::string("refused: ") + e.what();
      c.verdict = Verdict::Inconclusive;
      return c;
    }
  };

  rep.F1 = guarded([&] { return cond_C1(frame, opt.thresholds); });
  rep.F1_prime =
      guarded([&] { return cond_C1p(frame, opt.beta, opt.thresholds); });
  rep.C2 = cond_C2(*frame.orbit, frame.sys, opt.thresholds.zero_threshold);
  rep.F3 = guarded([&] { return cond_C3(frame, opt.beta, opt.thresholds); });
  try {
    rep.F4 = cond_C4(frame, opt.beta, opt.thresholds);
  } catch (const Error& e) {
    rep.F4.f1.status = std::string("refused: ") + e.what();
  }
  try {
    rep.F4_prime = cond_C4p(frame, opt.beta, opt.thresholds);
  } catch (const Error& e) {
    rep.F4_prime.f1.status = std::string("refused: ") + e.what();
  }
  rep.F5 = guarded([&] { return cond_C5(frame, opt.beta, opt); });

  // Probe box: orbit bounding box inflated by 10%.
  Vec2 lo{1e300, 1e300}, hi{-1e300, -1e300};
  const double Tw = frame.orbit->decay_window;
  for (int i = 0; i <= 200; ++i) {
    const Vec2 g = frame.orbit->gamma(-Tw + 2.0 * Tw * i / 200);
    lo.x = std::min(lo.x, g.x);
    lo.y = std::min(lo.y, g.y);
    hi.x = std::max(hi.x, g.x);
    hi.y = std::max(hi.y, g.y);
  }
  const Vec2 pad = 0.1 * Vec2{hi.x - lo.x + 1.0, hi.y - lo.y + 1.0};
  rep.C6 = cond_C6(frame.sys, *frame.orbit, lo - pad, hi + pad, opt.seed);

  rep.kappa_note =
      "F-tilde uses kappa_2j + kappa_3j in both factors; the transposed "
      "subscript in one display is read as a typo";
  return rep;
}

}  // namespace hgate
