#include <doctest.h>

#include <cmath>
#include <memory>

#include "hgate/conditions.hpp"
#include "hgate/error.hpp"
#include "hgate/grid_integral.hpp"
#include "hgate/quadrature.hpp"
#include "support/test_oracles.hpp"

using namespace hgate;

namespace {

// Shared fixtures; frames are immutable so reuse across cases is safe.
struct Fixtures {
  HomoclinicOrbit orbit = powerlaw_homoclinic(1, 1, 2);
  PlanarSystem pl_a1 = powerlaw_system(1, 1, 2).with_forcing(forcing_a1());
  VariationalFrame fr_pl_a1 = build_frame(pl_a1, orbit, 30.0);

  double sigma = 0.5;
  Mat2 P{1.0, 0.5, 0.0, 1.0};
  HomoclinicOrbit orbit_sh = map_orbit(orbit, P);
  PlanarSystem sh_mixed =
      powerlaw_sheared_system(1, 1, 2, 0.5).with_forcing(forcing_mixed());
  VariationalFrame fr_sh_mixed = build_frame(sh_mixed, orbit_sh, 30.0);
};

const Fixtures& fix() {
  static Fixtures f;
  return f;
}

// x' = y, y' = x - x^3 + q x^2: quadratic term keeps the Hessian of the
// second component nonzero at the origin. Not flagged hamiltonian: frames on
// its shot orbit carry the representation seam, which exceeds the 1e-8
// constancy check even though div f = 0.
PlanarSystem quad_oscillator(double q) {
  PlanarSystem s;
  s.name = "quad-oscillator";
  s.f = [q](Vec2 v) -> Vec2 {
    return {v.y, v.x - v.x * v.x * v.x + q * v.x * v.x};
  };
  s.jacobian_f = [q](Vec2 v) -> Mat2 {
    return {0, 1, 1 - 3 * v.x * v.x + 2 * q * v.x, 0};
  };
  s.hessians_f = [q](Vec2 v) -> std::array<Mat2, 2> {
    return {Mat2::zero(), Mat2{-6 * v.x + 2 * q, 0, 0, 0}};
  };
  return s;
}

}  // namespace

TEST_SUITE_BEGIN("conditions");

TEST_CASE("C1 vanishes for the power-law system") {
  const CondScalar c1 = cond_C1(fix().fr_pl_a1);
  CHECK(std::abs(c1.quad.value) < 1e-6);
  CHECK(c1.verdict == Verdict::Fails);
}

TEST_CASE("C1 vanishes even off the hamiltonian class") {
  // The C1 integrand telescopes: with the two-dimensional identity
  // Ma^b + a^Mb = tr(M)(a^b) and the Abel identity, the integral reduces to
  // the boundary term -[(gamma'^gamma)/Delta], which dies with the orbit.
  // The energy-damped field is a genuinely non-hamiltonian check of that.
  const PlanarSystem sys =
      powerlaw_energy_damped_system(1, 1, 2, 0.15).with_forcing(forcing_a1());
  const VariationalFrame fr = build_frame(sys, fix().orbit, 30.0);
  const CondScalar c1 = cond_C1(fr);
  CHECK(std::abs(c1.quad.value) < 1e-8);
  CHECK(c1.verdict == Verdict::Fails);
  // Independent oracle: Simpson quadrature of the closed-form integrand,
  // Delta(s) = exp((2c/3) tanh^3 s).
  const double c = 0.15;
  auto integrand = [&](double s) {
    const Vec2 g = fix().orbit.gamma(s);
    const Vec2 fg = sys.f(g);
    const double th = std::tanh(s);
    const double delta = std::exp(2.0 * c / 3.0 * th * th * th);
    return wedge(fg, sys.jacobian_f(g) * g) / delta;
  };
  CHECK(std::abs(oracle::simpson_line(integrand, 40.0, 80000)) < 1e-9);
}

TEST_CASE("C1' of the A1 forcing: positive, matches the Simpson oracle") {
  const CondScalar c = cond_C1p(fix().fr_pl_a1, 0.0);
  CHECK(c.verdict == Verdict::Holds);
  CHECK(c.quad.value > 0.0);
  // gamma' = (y, .), g = (0, y(2+cos t)): the pairing is y^2 (2+cos t).
  auto integrand = [](double t) {
    const double sh = 1.0 / std::cosh(t), th = std::tanh(t);
    return 2.0 * sh * sh * th * th * (2.0 + std::cos(t));
  };
  const double ref = oracle::simpson_line(integrand, 40.0, 80000);
  CHECK(c.quad.value == doctest::Approx(ref).epsilon(1e-9));
}

TEST_CASE("C1' time route equals the curve-integral route") {
  for (double beta : {0.0, 0.4, -1.1}) {
    const CondScalar time_route = cond_C1p(fix().fr_pl_a1, beta);
    const double line_route =
        line_integral_F1p(fix().orbit, fix().pl_a1, beta);
    CHECK(line_route ==
          doctest::Approx(time_route.quad.value).epsilon(1e-6));
  }
}

TEST_CASE("C1' of a field-parallel perturbation vanishes") {
  PlanarSystem sys = powerlaw_system(1, 1, 2);
  auto f = sys.f;
  auto jac = sys.jacobian_f;
  sys.g = [f](Vec2 v, double) { return f(v); };
  sys.grad_g = [jac](Vec2 v, double) { return jac(v); };
  const VariationalFrame fr = build_frame(sys, fix().orbit, 30.0);
  const CondScalar c = cond_C1p(fr, 0.0);
  CHECK(std::abs(c.quad.value) < 1e-12);
  CHECK(c.verdict == Verdict::Fails);
}

TEST_CASE("C2 on the power-law loop: sup attained at the anchor") {
  const C2Result c2 = cond_C2(fix().orbit, fix().pl_a1);
  CHECK(c2.verdict == Verdict::Holds);
  CHECK(c2.sup == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(std::abs(c2.argmax_t) < 0.05);
}

TEST_CASE("C2 scaling: doubling f doubles the sup, not the verdict") {
  PlanarSystem sys = powerlaw_system(1, 1, 2);
  auto f = sys.f;
  sys.f = [f](Vec2 v) { return 2.0 * f(v); };
  const C2Result base = cond_C2(fix().orbit, fix().pl_a1);
  const C2Result twice = cond_C2(fix().orbit, sys);
  CHECK(twice.sup == doctest::Approx(2.0 * base.sup).epsilon(1e-9));
  CHECK(twice.verdict == base.verdict);
}

TEST_CASE("C2 fails on a straight-line escape orbit") {
  // gamma parallel to f(gamma) everywhere: a ray through the origin of the
  // linear saddle flow.
  PlanarSystem sys;
  sys.name = "ray";
  sys.f = [](Vec2 v) -> Vec2 { return {v.x, v.y}; };
  sys.jacobian_f = [](Vec2) { return Mat2::identity(); };
  sys.hessians_f = [](Vec2) -> std::array<Mat2, 2> { return {}; };
  HomoclinicOrbit ray;
  ray.gamma = [](double t) -> Vec2 {
    return {std::exp(-std::abs(t)), std::exp(-std::abs(t))};
  };
  ray.gamma_dot = ray.gamma;
  ray.decay_window = 10.0;
  const C2Result c2 = cond_C2(ray, sys);
  CHECK(c2.sup < 1e-12);
  CHECK(c2.verdict == Verdict::Fails);
}

TEST_CASE("C3 vanishes when g = 0") {
  const PlanarSystem sys =
      powerlaw_sheared_system(1, 1, 2, 0.5).with_forcing(forcing_none());
  const VariationalFrame fr = build_frame(sys, fix().orbit_sh, 30.0);
  const CondScalar c3 = cond_C3(fr, 0.0);
  CHECK(std::abs(c3.quad.value) < 1e-10);
  CHECK(c3.verdict == Verdict::Fails);
}

TEST_CASE("C3 on the sheared system matches its separable closed form") {
  // The C3 kernel is a wedge of one s-factor and one t-factor, so the plane
  // integral factors into the four line integrals of C4/C4':
  // F3 = F41 F43' - F43 F41'.
  const double beta = 0.3;
  const CondScalar c3 = cond_C3(fix().fr_sh_mixed, beta);
  const C4Result c4 = cond_C4(fix().fr_sh_mixed, beta);
  const C4Result c4p = cond_C4p(fix().fr_sh_mixed, beta);
  const double separable = c4.f1.quad.value * c4p.f3.quad.value -
                           c4.f3.quad.value * c4p.f1.quad.value;
  CHECK(c3.quad.value == doctest::Approx(separable).epsilon(1e-7));
  CHECK(c3.verdict == Verdict::Holds);
  // Node-doubling style reproducibility: tighter tolerance, same value.
  ConditionThresholds tight;
  tight.plane_tol = 2e-9;
  const CondScalar c3b = cond_C3(fix().fr_sh_mixed, beta, tight);
  CHECK(c3b.quad.value == doctest::Approx(c3.quad.value).epsilon(1e-6));
}

TEST_CASE("C3 flips sign when the wedge arguments are swapped") {
  // Inline re-evaluation with G and F-hat exchanged in the wedge.
  const VariationalFrame& fr = fix().fr_sh_mixed;
  const double beta = 0.3;
  auto defect = [&](double t, int k) {
    const Vec2 g = fr.gamma(t);
    return (fr.sys.jacobian_f(g) * g - fr.sys.f(g))[k];
  };
  auto swapped = [&](double s, double t) {
    const Vec2 gs = fr.gamma(s);
    const Vec2 gt = fr.gamma(t);
    const double w = defect(s, 0) * fr.sys.g(gt, t - beta).y -
                     defect(t, 1) * fr.sys.g(gs, s - beta).x;
    return fr.sys.f(gs).y * fr.sys.f(gt).x * w / (fr.delta(t) * fr.delta(s));
  };
  QuadOptions qopt;
  qopt.tol = 1e-7;
  const QuadResult sw = integrate_plane(
      swapped, fr.omega, std::min(fr.orbit->decay_window, 0.8 * fr.T), qopt);
  const CondScalar c3 = cond_C3(fr, beta);
  CHECK(sw.value == doctest::Approx(-c3.quad.value).epsilon(1e-5));
}

TEST_CASE("C4 on the power-law: the Hessian pairing vanishes identically") {
  const C4Result c4 = cond_C4(fix().fr_pl_a1, 0.0);
  const C4Result c4p = cond_C4p(fix().fr_pl_a1, 0.0);
  CHECK(std::abs(c4.f2.quad.value) <=
        3.0 * c4.f2.quad.abs_error_estimate + 1e-15);
  CHECK(c4.f2.quad.abs_error_estimate < 1e-8);
  CHECK(std::abs(c4p.f2.quad.value) <=
        3.0 * c4p.f2.quad.abs_error_estimate + 1e-15);
  CHECK(c4p.f2.quad.abs_error_estimate < 1e-8);
  CHECK(c4.verdict == Verdict::Fails);
  CHECK(c4.f3_degenerate);  // kappa1 denominator flagged
}

TEST_CASE("C4 with g = 0 has zero forcing integral") {
  const PlanarSystem sys =
      powerlaw_sheared_system(1, 1, 2, 0.5).with_forcing(forcing_none());
  const VariationalFrame fr = build_frame(sys, fix().orbit_sh, 30.0);
  const C4Result c4 = cond_C4(fr, 0.0);
  CHECK(std::abs(c4.f1.quad.value) < 1e-12);
}

TEST_CASE("C4 forcing integral is even in beta for even forcing") {
  // g = (x cos t, 0) on the plain power-law: gamma_1 even, f_2(gamma) even,
  // so F41(beta) = F41(-beta).
  PlanarSystem sys = powerlaw_system(1, 1, 2);
  sys.g = [](Vec2 v, double t) -> Vec2 { return {v.x * std::cos(t), 0.0}; };
  sys.grad_g = [](Vec2, double t) -> Mat2 {
    return {std::cos(t), 0, 0, 0};
  };
  const VariationalFrame fr = build_frame(sys, fix().orbit, 30.0);
  for (double beta : {0.35, 1.2}) {
    const C4Result plus = cond_C4(fr, beta);
    const C4Result minus = cond_C4(fr, -beta);
    CHECK(plus.f1.quad.value ==
          doctest::Approx(minus.f1.quad.value).epsilon(1e-9));
    CHECK(std::abs(plus.f1.quad.value) > 1e-3);
  }
}

TEST_CASE("F43 of the sheared system has the parts-integration value") {
  // F43 = -2 sigma int y' x^3 dt = 6 sigma int x^2 y^2 dt = 6 sigma * 16/15.
  const C4Result c4 = cond_C4(fix().fr_sh_mixed, 0.0);
  CHECK(c4.f1.quad.value != doctest::Approx(0.0));
  CHECK(c4.f3.quad.value ==
        doctest::Approx(6.0 * fix().sigma * 16.0 / 15.0).epsilon(1e-9));
  CHECK_FALSE(c4.f3_degenerate);
}

TEST_CASE("kappa functions: g = 0 kills kappa3") {
  const PlanarSystem sys =
      powerlaw_sheared_system(1, 1, 2, 0.5).with_forcing(forcing_none());
  const VariationalFrame fr = build_frame(sys, fix().orbit_sh, 30.0);
  const KappaFunctions kap = compute_kappas(fr, 0.0);
  for (double t : {-20.0, -3.0, 0.0, 1.7, 12.0})
    for (int j = 0; j < 2; ++j)
      CHECK(std::abs(kap.kappa3(t, j)) < 1e-10);
}

TEST_CASE("kappa2 vanishes in the deep tail and stays bounded") {
  const PlanarSystem sys =
      powerlaw_system(1, 1, 2).with_forcing(forcing_ycos());
  const HomoclinicOrbit& orbit = fix().orbit;
  const VariationalFrame f15 = build_frame(sys, orbit, 15.0);
  const VariationalFrame f30 = build_frame(sys, orbit, 30.0);
  const KappaFunctions k15 = compute_kappas(f15, 0.0);
  const KappaFunctions k30 = compute_kappas(f30, 0.0);
  // Deep-tail decay at the window edge.
  for (int j = 0; j < 2; ++j)
    CHECK(std::abs(k30.kappa2(f30.grid.front(), j)) < 1e-8);
  // Sup stability under window doubling.
  auto sup2 = [](const VariationalFrame& fr, const KappaFunctions& k) {
    double s = 0.0;
    for (double t : fr.grid)
      for (int j = 0; j < 2; ++j) s = std::max(s, std::abs(k.kappa2(t, j)));
    return s;
  };
  const double s15 = sup2(f15, k15);
  const double s30 = sup2(f30, k30);
  CHECK(std::isfinite(s15));
  CHECK(std::abs(s30 - s15) / s15 < 0.05);
}

TEST_CASE("kappa1 degenerate 0/0 resolves to zero; hard failure otherwise") {
  // Power-law + a1: both the numerator and the denominator vanish.
  const KappaFunctions kap = compute_kappas(fix().fr_pl_a1, 0.0);
  CHECK(kap.kappa1 == 0.0);
  CHECK(kap.kappa1_degenerate);
  // Quadratic oscillator + mixed forcing: numerator nonzero, denominator
  // zero; compute_kappas must refuse.
  const PlanarSystem base = quad_oscillator(0.3);
  const HomoclinicOrbit orb = shoot_homoclinic(base, saddle_data(base, {0, 0}));
  FrameOptions fo;
  fo.abel_tol = 1e-4;  // shot-orbit representation seam
  const VariationalFrame fr =
      build_frame(base.with_forcing(forcing_mixed()), orb, 30.0, fo);
  CHECK_THROWS_AS(compute_kappas(fr, 0.7), Error);
  ConditionOptions opt;
  opt.beta = 0.7;
  const CondScalar c5 = cond_C5(fr, 0.7, opt);
  CHECK(c5.status.find("kappa failure") == 0);
}

TEST_CASE("C5 at the Melnikov-zero phase: convergent, reproducible, nonzero") {
  const VariationalFrame& fr = fix().fr_sh_mixed;
  // Locate the phase where F1' crosses zero (the regime in which the kappa
  // functions stay bounded and the plane integral converges).
  double lo = 0.0, hi = 3.14;
  auto f1p = [&](double b) { return cond_C1p(fr, b).quad.value; };
  double flo = f1p(lo);
  for (int i = 0; i < 50; ++i) {
    const double mid = 0.5 * (lo + hi);
    (std::signbit(f1p(mid)) == std::signbit(flo) ? lo : hi) = mid;
    if (lo == mid) flo = f1p(lo);
  }
  const double bstar = 0.5 * (lo + hi);
  CHECK(std::abs(f1p(bstar)) < 1e-8);

  ConditionOptions opt;
  opt.beta = bstar;
  const CondScalar c5 = cond_C5(fr, bstar, opt);
  CHECK(c5.status == "ok");
  CHECK(c5.verdict == Verdict::Holds);

  ConditionOptions tight = opt;
  tight.thresholds.plane_tol = opt.thresholds.plane_tol / 4.0;
  const CondScalar c5b = cond_C5(fr, bstar, tight);
  CHECK(c5b.quad.value == doctest::Approx(c5.quad.value).epsilon(1e-5));
}

TEST_CASE("C5 flips sign under exchanging the two factor roles") {
  const VariationalFrame& fr = fix().fr_sh_mixed;
  const double beta = 0.286;
  ConditionOptions opt;
  opt.beta = beta;
  const CondScalar c5 = cond_C5(fr, beta, opt);

  const KappaFunctions kap = compute_kappas(fr, beta);
  auto ftilde = [&](double t, int k) -> Vec2 {
    const Vec2 g = fr.gamma(t);
    const Mat2 dg = fr.sys.grad_g(g, t - beta);
    const auto H = fr.sys.hessians_f(g);
    const Vec2 w{kap.kappa1 * g.x + kap.kappa2(t, 0) + kap.kappa3(t, 0),
                 kap.kappa1 * g.y + kap.kappa2(t, 1) + kap.kappa3(t, 1)};
    const Vec2 defect = fr.sys.jacobian_f(g) * g - fr.sys.f(g);
    return {dg(k, 0) + dg(k, 1) + colsum_contract(H[k], w), defect[k]};
  };
  auto swapped = [&](double s, double t) {
    // All roles exchanged: prefactor indices and the F-tilde order.
    return fr.sys.f(fr.gamma(t)).y * fr.sys.f(fr.gamma(s)).x *
           wedge(ftilde(t, 0), ftilde(s, 1)) / (fr.delta(t) * fr.delta(s));
  };
  QuadOptions qopt;
  qopt.tol = 1e-7;
  const QuadResult sw = integrate_plane(
      swapped, fr.omega, std::min(fr.orbit->decay_window, 0.8 * fr.T), qopt);
  CHECK(sw.value == doctest::Approx(-c5.quad.value).epsilon(1e-4));
}

TEST_CASE("C5 on the canonical preset: zero, reproducible under refinement") {
  // Mechanical first component makes the F-tilde_1 factor vanish identically,
  // so the value is an exact zero at any quadrature resolution.
  ConditionOptions opt;
  const CondScalar a = cond_C5(fix().fr_pl_a1, 0.0, opt);
  ConditionOptions fine = opt;
  fine.thresholds.plane_tol = opt.thresholds.plane_tol / 4.0;
  const CondScalar b = cond_C5(fix().fr_pl_a1, 0.0, fine);
  CHECK(a.status == "ok");
  CHECK(b.status == "ok");
  CHECK(std::abs(a.quad.value - b.quad.value) < 1e-12);
  CHECK(std::abs(a.quad.value) < 1e-12);
}

TEST_CASE("C5 trivial zero: linear field pieces and no forcing") {
  PlanarSystem sys = powerlaw_system(1, 1, 2).with_forcing(forcing_none());
  sys.hessians_f = [](Vec2) -> std::array<Mat2, 2> { return {}; };
  sys.hamiltonian_flag = false;
  const VariationalFrame fr = build_frame(sys, fix().orbit, 30.0);
  ConditionOptions opt;
  const CondScalar c5 = cond_C5(fr, 0.0, opt);
  CHECK(c5.status == "ok");
  CHECK(c5.quad.value == doctest::Approx(0.0));
}

TEST_CASE("C5 refuses honestly when the integrand does not decay") {
  // Quadratic oscillator sheared: Hessians are nonzero at the saddle, so the
  // unbounded kappa3 (F1' != 0 at beta = 0) leaks into the integrand.
  const PlanarSystem base = quad_oscillator(0.3);
  const HomoclinicOrbit orb0 =
      shoot_homoclinic(base, saddle_data(base, {0, 0}));
  const Mat2 P{1.0, 0.5, 0.0, 1.0};
  const PlanarSystem sys =
      conjugate_system(base, P, "quad-sheared").with_forcing(forcing_mixed());
  const HomoclinicOrbit orb = map_orbit(orb0, P);
  FrameOptions fo;
  fo.abel_tol = 1e-4;
  const VariationalFrame fr = build_frame(sys, orb, 30.0, fo);
  CHECK(std::abs(cond_C1p(fr, 0.0).quad.value) > 0.5);  // kappa3 unbounded

  ConditionOptions opt;
  const CondScalar c5 = cond_C5(fr, 0.0, opt);
  CHECK(c5.status.find("refused") == 0);
  CHECK(c5.verdict == Verdict::Inconclusive);

  // Fixed-window diagnostic mode remains reproducible under refinement.
  ConditionOptions fixed = opt;
  fixed.c5_enforce_decay = false;
  fixed.c5_truncation_override = 25.0;
  const CondScalar a = cond_C5(fr, 0.0, fixed);
  ConditionOptions finer = fixed;
  finer.thresholds.plane_tol = fixed.thresholds.plane_tol / 4.0;
  const CondScalar b = cond_C5(fr, 0.0, finer);
  CHECK(a.status == "ok");
  CHECK(a.quad.value == doctest::Approx(b.quad.value).epsilon(1e-5));
}

TEST_CASE("C6 detects time dependence with a witness") {
  const C6Result c6 =
      cond_C6(fix().pl_a1, fix().orbit, {-2, -2}, {2, 2}, 7);
  CHECK(c6.holds);
  REQUIRE(c6.witness.has_value());
  const C6Witness& w = *c6.witness;
  const Vec2 d = fix().pl_a1.g(w.x, w.t1) - fix().pl_a1.g(w.x, w.t2);
  CHECK(norm_inf(d) > 1e-9);
}

TEST_CASE("C6 is false for an autonomous perturbation") {
  PlanarSystem sys = powerlaw_system(1, 1, 2);
  sys.g = [](Vec2 v, double) -> Vec2 { return {v.x, v.y * v.y}; };
  const C6Result c6 = cond_C6(sys, fix().orbit, {-2, -2}, {2, 2}, 7);
  CHECK_FALSE(c6.holds);
}

TEST_CASE("C6 holds for y sin t even though it vanishes on y = 0") {
  PlanarSystem sys = powerlaw_system(1, 1, 2);
  sys.g = [](Vec2 v, double t) -> Vec2 { return {0.0, v.y * std::sin(t)}; };
  const C6Result c6 = cond_C6(sys, fix().orbit, {-2, -2}, {2, 2}, 7);
  CHECK(c6.holds);
}

TEST_CASE("linearity in g for F1', F3 and F41") {
  const VariationalFrame& fr = fix().fr_sh_mixed;
  PlanarSystem sys_b = powerlaw_sheared_system(1, 1, 2, 0.5);
  sys_b.g = [](Vec2 v, double t) -> Vec2 {
    return {0.3 * v.y * std::sin(2 * t), v.x * std::cos(t)};
  };
  sys_b.grad_g = [](Vec2, double t) -> Mat2 {
    return {0, 0.3 * std::sin(2 * t), std::cos(t), 0};
  };
  PlanarSystem sys_sum = sys_b;
  auto ga = fix().sh_mixed.g;
  auto gb = sys_b.g;
  sys_sum.g = [ga, gb](Vec2 v, double t) { return ga(v, t) + 2.0 * gb(v, t); };
  auto dga = fix().sh_mixed.grad_g;
  auto dgb = sys_b.grad_g;
  sys_sum.grad_g = [dga, dgb](Vec2 v, double t) {
    return dga(v, t) + 2.0 * dgb(v, t);
  };

  const VariationalFrame fr_b = build_frame(sys_b, fix().orbit_sh, 30.0);
  const VariationalFrame fr_sum = build_frame(sys_sum, fix().orbit_sh, 30.0);
  const double beta = 0.2;

  CHECK(cond_C1p(fr_sum, beta).quad.value ==
        doctest::Approx(cond_C1p(fr, beta).quad.value +
                        2.0 * cond_C1p(fr_b, beta).quad.value)
            .epsilon(1e-8));
  CHECK(cond_C4(fr_sum, beta).f1.quad.value ==
        doctest::Approx(cond_C4(fr, beta).f1.quad.value +
                        2.0 * cond_C4(fr_b, beta).f1.quad.value)
            .epsilon(1e-8));
  CHECK(cond_C3(fr_sum, beta).quad.value ==
        doctest::Approx(cond_C3(fr, beta).quad.value +
                        2.0 * cond_C3(fr_b, beta).quad.value)
            .epsilon(1e-6));
}

TEST_CASE("frame scaling leaves every verdict unchanged") {
  // zeta -> 2 zeta: Delta doubles, each functional rescales by a nonzero
  // power of 1/2, kappas are invariant.
  const PlanarSystem sys = fix().sh_mixed;
  const HomoclinicOrbit& orbit = fix().orbit_sh;
  const VariationalFrame& base = fix().fr_sh_mixed;
  FrameOptions opt;
  opt.zeta0_override = 2.0 * base.zeta0;
  const VariationalFrame scaled = build_frame(sys, orbit, 30.0, opt);

  const double beta = 0.3;
  const CondScalar c1p_a = cond_C1p(base, beta);
  const CondScalar c1p_b = cond_C1p(scaled, beta);
  CHECK(c1p_b.quad.value ==
        doctest::Approx(0.5 * c1p_a.quad.value).epsilon(1e-9));
  CHECK(to_string(c1p_b.verdict) == to_string(c1p_a.verdict));

  const C4Result c4_a = cond_C4(base, beta);
  const C4Result c4_b = cond_C4(scaled, beta);
  CHECK(c4_b.f1.quad.value ==
        doctest::Approx(0.5 * c4_a.f1.quad.value).epsilon(1e-9));
  CHECK(c4_b.f3.quad.value ==
        doctest::Approx(0.5 * c4_a.f3.quad.value).epsilon(1e-9));
  CHECK(to_string(c4_b.verdict) == to_string(c4_a.verdict));

  const CondScalar c3_a = cond_C3(base, beta);
  const CondScalar c3_b = cond_C3(scaled, beta);
  CHECK(c3_b.quad.value ==
        doctest::Approx(0.25 * c3_a.quad.value).epsilon(1e-7));
  CHECK(to_string(c3_b.verdict) == to_string(c3_a.verdict));

  const KappaFunctions kap_a = compute_kappas(base, beta);
  const KappaFunctions kap_b = compute_kappas(scaled, beta);
  CHECK(kap_b.kappa1 == doctest::Approx(kap_a.kappa1).epsilon(1e-9));
  for (double t : {-5.0, 0.0, 3.0})
    for (int j = 0; j < 2; ++j)
      CHECK(kap_b.kappa2(t, j) ==
            doctest::Approx(kap_a.kappa2(t, j)).epsilon(1e-7));
}

TEST_CASE("F1' is invariant under unimodular conjugation") {
  // With Delta(0) = 1 on both sides and trace Df invariant, the normalized
  // Wronskians coincide, so wedge(Pf, Pg) = det(P) wedge(f, g) makes the
  // pairing functional invariant for det P = 1. This exercises conjugation,
  // orbit mapping, frame construction and quadrature as one chain.
  const Mat2 P{1.2, 0.7, -0.4, 0.6};  // det = 1.0
  REQUIRE(P.det() == doctest::Approx(1.0).epsilon(1e-14));
  const PlanarSystem base =
      powerlaw_system(1, 1, 2).with_forcing(forcing_ycos());
  const PlanarSystem conj = conjugate_system(base, P, "conjugated");
  const HomoclinicOrbit orb = map_orbit(fix().orbit, P);
  const VariationalFrame fr_base = build_frame(base, fix().orbit, 30.0);
  const VariationalFrame fr_conj = build_frame(conj, orb, 30.0);
  for (double beta : {0.0, 0.7}) {
    const double a = cond_C1p(fr_base, beta).quad.value;
    const double b = cond_C1p(fr_conj, beta).quad.value;
    CHECK(b == doctest::Approx(a).epsilon(1e-8));
  }
}

TEST_CASE("full pipeline at a faster dichotomy rate") {
  // nu = 4 gives omega = 2; everything downstream must scale its grids and
  // truncations from the rate instead of assuming omega = 1.
  const PlanarSystem sys = powerlaw_system(4, 1, 3).with_forcing(forcing_a1());
  const HomoclinicOrbit orb = powerlaw_homoclinic(4, 1, 3);
  CHECK(orb.saddle.omega == doctest::Approx(2.0));
  const VariationalFrame fr = build_frame(sys, orb, 20.0);
  CHECK(fr.diag.hamiltonian_delta_drift < 1e-8);

  const CondScalar c1 = cond_C1(fr);
  CHECK(std::abs(c1.quad.value) < 1e-8);
  const C2Result c2 = cond_C2(orb, sys);
  CHECK(c2.verdict == Verdict::Holds);
  const CondScalar c1p = cond_C1p(fr, 0.3);
  CHECK(c1p.quad.value > 0.0);
  const double line = line_integral_F1p(orb, sys, 0.3);
  CHECK(line == doctest::Approx(c1p.quad.value).epsilon(1e-6));
  const C4Result c4 = cond_C4(fr, 0.0);
  CHECK(std::abs(c4.f2.quad.value) <=
        3.0 * c4.f2.quad.abs_error_estimate + 1e-15);
}

TEST_CASE("full report on the power-law + A1 preset") {
  ConditionOptions opt;
  const ConditionReport rep = evaluate_conditions(fix().fr_pl_a1, opt);
  CHECK(rep.F1.verdict == Verdict::Fails);
  CHECK(rep.F1_prime.verdict == Verdict::Holds);
  CHECK(rep.C2.verdict == Verdict::Holds);
  CHECK(rep.C6.holds);
  CHECK(rep.F4.f3_degenerate);
  CHECK(rep.F5.status == "ok");  // identically zero integrand, no refusal
}

TEST_SUITE_END();
