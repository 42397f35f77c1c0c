#include <doctest.h>

#include <cmath>

#include "hgate/error.hpp"
#include "hgate/grid_integral.hpp"
#include "hgate/ode.hpp"
#include "hgate/variational.hpp"
#include "support/test_oracles.hpp"

using namespace hgate;

namespace {

VariationalFrame powerlaw_frame(double T = 30.0) {
  static const PlanarSystem sys = powerlaw_system(1, 1, 2);
  static const HomoclinicOrbit orbit = powerlaw_homoclinic(1, 1, 2);
  return build_frame(sys, orbit, T);
}

}  // namespace

TEST_SUITE_BEGIN("variational");

TEST_CASE("normalization: zeta(0) perpendicular with Delta(0) = 1") {
  const VariationalFrame fr = powerlaw_frame();
  // gamma'(0) = (0, -sqrt(2)), so zeta(0) = (1/sqrt(2), 0).
  CHECK(fr.zeta0.x == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(fr.zeta0.y == doctest::Approx(0.0));
  CHECK(wedge(fr.gamma_prime(0.0), fr.zeta0) == doctest::Approx(1.0));
  CHECK(fr.delta(0.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("Delta is constant for the hamiltonian power-law") {
  const VariationalFrame fr = powerlaw_frame();
  double drift = 0.0;
  for (double t : fr.grid)
    drift = std::max(drift, std::abs(fr.delta(t) - 1.0));
  CHECK(drift < 1e-8);
  CHECK(fr.diag.hamiltonian_delta_drift < 1e-8);
  CHECK(fr.diag.delta_limit_gap < 1e-8);
}

TEST_CASE("zeta grows at rate omega on both tails") {
  const VariationalFrame fr = powerlaw_frame();
  CHECK(fr.diag.zeta_growth_slope_fwd == doctest::Approx(1.0).epsilon(0.1));
  CHECK(fr.diag.zeta_growth_slope_bwd == doctest::Approx(-1.0).epsilon(0.1));
}

TEST_CASE("Wronskian identity re-derived from interpolants") {
  const VariationalFrame fr = powerlaw_frame();
  double worst = 0.0;
  for (double t = -0.95 * fr.T; t < 0.95 * fr.T; t += 0.0917) {
    const double lhs = wedge(fr.gamma_prime(t), fr.zeta(t));
    worst = std::max(worst, std::abs(lhs - fr.delta(t)));
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("Abel identity against the closed form for the damped loop") {
  const double c = 0.15;
  const PlanarSystem sys = powerlaw_energy_damped_system(1, 1, 2, c);
  const HomoclinicOrbit orbit = powerlaw_homoclinic(1, 1, 2);
  const VariationalFrame fr = build_frame(sys, orbit, 30.0);
  // trace Df along the loop is c y^2(t), whose integral is (2c/3) tanh^3 t.
  double worst = 0.0;
  for (double t = -25.0; t <= 25.0; t += 0.31) {
    const double th = std::tanh(t);
    const double expected = std::exp((2.0 * c / 3.0) * th * th * th);
    worst = std::max(worst, std::abs(fr.delta(t) - expected) / expected);
  }
  CHECK(worst < 1e-6);
  CHECK(fr.diag.abel_max_rel_err < 1e-6);
  // The limits genuinely differ here: the trace integral over the line is
  // 4c/3, not zero.
  CHECK(fr.diag.delta_limit_gap ==
        doctest::Approx(1.0 - std::exp(-4.0 * c / 3.0)).epsilon(1e-4));
}

TEST_CASE("frame rebuild with c zeta + d gamma' rescales Delta by c") {
  const PlanarSystem sys = powerlaw_energy_damped_system(1, 1, 2, 0.15);
  const HomoclinicOrbit orbit = powerlaw_homoclinic(1, 1, 2);
  const VariationalFrame base = build_frame(sys, orbit, 25.0);
  FrameOptions opt;
  opt.zeta0_override = 2.0 * base.zeta0 + 0.3 * base.gamma_prime(0.0);
  const VariationalFrame scaled = build_frame(sys, orbit, 25.0, opt);
  for (double t : {-20.0, -7.0, -1.0, 0.0, 2.0, 11.0, 20.0})
    CHECK(scaled.delta(t) == doctest::Approx(2.0 * base.delta(t)).epsilon(1e-8));
  // Superposition at the integration nodes: the rebuilt column is exactly
  // 2 zeta + 0.3 gamma' (relative to the growing-mode magnitude).
  for (std::size_t i = 0; i < base.grid.size(); i += 37) {
    const double t = base.grid[i];
    const Vec2 expect = 2.0 * base.zeta(t) + 0.3 * base.gamma_prime(t);
    const double scale = std::max(1.0, norm(expect));
    CHECK(norm(scaled.zeta(t) - expect) / scale < 1e-7);
  }
}

TEST_CASE("dichotomy constant is finite and stable under window doubling") {
  const VariationalFrame f15 = powerlaw_frame(15.0);
  const VariationalFrame f30 = powerlaw_frame(30.0);
  CHECK(std::isfinite(f15.dichotomy_k));
  CHECK(f15.dichotomy_k > 0.0);
  CHECK(std::abs(f30.dichotomy_k - f15.dichotomy_k) / f15.dichotomy_k < 0.05);
}

TEST_CASE("dichotomy bound at t = s reduces to the plain product") {
  const VariationalFrame fr = powerlaw_frame(20.0);
  const double k = fr.dichotomy_k;
  for (double t : {0.0, 1.0, 3.5, 9.0}) {
    const Vec2 gp = fr.gamma_prime(t);
    const Vec2 z = fr.zeta(t);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        CHECK(std::abs(gp[i] * z[j]) <= k * (1.0 + 1e-12));
  }
}

TEST_CASE("wrong omega makes the pairing constant blow up") {
  const VariationalFrame fr = powerlaw_frame(30.0);
  CHECK_THROWS_AS(check_dichotomy(fr, 2.0 * fr.omega), Error);
}

TEST_CASE("asymptotics report: scaled tails converge") {
  const VariationalFrame fr = powerlaw_frame(30.0);
  const AsymptoticsReport rep = check_asymptotics(fr);
  CHECK(rep.converged(0.05));
  // x-component of gamma' * e^t tends to -2 sqrt(2) (sech expansion).
  const AsymptoticsRow& last = rep.rows.back();
  CHECK(last.gamma_prime_scaled.x ==
        doctest::Approx(-2.0 * std::sqrt(2.0)).epsilon(1e-3));
  CHECK(last.gamma_prime_scaled.y ==
        doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-3));
  // zeta e^{-|t|} converges to a nonzero vector.
  CHECK(norm(last.zeta_scaled) > 1e-3);
}

TEST_CASE("asymptotics report t = 0 row is the raw gamma'(0)") {
  const VariationalFrame fr = powerlaw_frame(20.0);
  const AsymptoticsReport rep = check_asymptotics(fr);
  bool found = false;
  for (const AsymptoticsRow& row : rep.rows)
    if (row.t == 0.0) {
      found = true;
      CHECK(row.gamma_prime_scaled.x == doctest::Approx(0.0));
      CHECK(row.gamma_prime_scaled.y ==
            doctest::Approx(-std::sqrt(2.0)).epsilon(1e-12));
    }
  CHECK(found);
}

TEST_CASE("window below the decay window is rejected") {
  const PlanarSystem sys = powerlaw_system(1, 1, 2);
  const HomoclinicOrbit orbit = powerlaw_homoclinic(1, 1, 2);
  CHECK_THROWS_AS(build_frame(sys, orbit, 5.0), InvalidInput);
}

TEST_CASE("Abel consistency of a plain linear system with known trace") {
  // z' = A(t) z with A = [[a, 1], [-1, a]], a = 0.3 tanh t sech t. The
  // trace is 2a with odd integrand, so det X has equal limits; the Abel
  // closed form is exp(0.6 (1 - sech t)).
  auto a = [](double t) { return 0.3 * std::tanh(t) / std::cosh(t); };
  IntegratorOptions iopt;
  iopt.rtol = 1e-12;
  iopt.atol = 1e-13;
  auto rhs = [&](double t, const std::array<double, 4>& y,
                 std::array<double, 4>& dy) {
    const double at = a(t);
    dy[0] = at * y[0] + y[1];
    dy[1] = -y[0] + at * y[1];
    dy[2] = at * y[2] + y[3];
    dy[3] = -y[2] + at * y[3];
  };
  double worst = 0.0;
  for (double T : {2.0, 5.0, 8.0}) {
    for (double sgn : {1.0, -1.0}) {
      const auto y = integrate_to<4>(rhs, 0.0, {1, 0, 0, 1}, sgn * T, iopt);
      const double det = y[0] * y[3] - y[1] * y[2];
      const double abel = std::exp(0.6 * (1.0 - 1.0 / std::cosh(T)));
      worst = std::max(worst, std::abs(det - abel) / abel);
    }
  }
  CHECK(worst < 1e-6);
  // Equal limits: det X(T) vs det X(-T) at the window edge.
  const auto yp = integrate_to<4>(rhs, 0.0, {1, 0, 0, 1}, 8.0, iopt);
  const auto ym = integrate_to<4>(rhs, 0.0, {1, 0, 0, 1}, -8.0, iopt);
  const double dp = yp[0] * yp[3] - yp[1] * yp[2];
  const double dm = ym[0] * ym[3] - ym[1] * ym[2];
  CHECK(std::abs(dp - dm) / std::abs(dp) < 1e-4);
}

TEST_SUITE_END();
