#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>

#include "hgate/error.hpp"

namespace hgate {

struct IntegratorOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double h_init = 1e-3;
  double h_max = 0.5;
  long max_steps = 2000000;
};

/// Embedded Dormand-Prince 5(4) pair with standard step control.
/// Integrates y' = rhs(t, y) from t0 to t1 (either direction) and returns
/// y(t1). Accuracy is controlled per step by rtol/atol on each component.
template <std::size_t N>
std::array<double, N> integrate_to(
    const std::function<void(double, const std::array<double, N>&,
                             std::array<double, N>&)>& rhs,
    double t0, std::array<double, N> y, double t1,
    const IntegratorOptions& opt = {}) {
  if (t1 == t0) return y;
  const double dir = t1 > t0 ? 1.0 : -1.0;

  // Dormand-Prince coefficients.
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                   a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                   a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                   b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  std::array<double, N> k1, k2, k3, k4, k5, k6, k7, ytmp, ynew;
  double t = t0;
  double h = dir * std::min(opt.h_init, std::abs(t1 - t0));
  rhs(t, y, k1);

  for (long step = 0; step < opt.max_steps; ++step) {
    if (dir * (t + h - t1) > 0.0) h = t1 - t;

    for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
    rhs(t + c2 * h, ytmp, k2);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    rhs(t + c3 * h, ytmp, k3);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    rhs(t + c4 * h, ytmp, k4);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] =
          y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    rhs(t + c5 * h, ytmp, k5);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                            a64 * k4[i] + a65 * k5[i]);
    rhs(t + h, ytmp, k6);
    for (std::size_t i = 0; i < N; ++i)
      ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] +
                            b5 * k5[i] + b6 * k6[i]);
    rhs(t + h, ynew, k7);

    double err = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] +
                             e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double sc =
          opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      err = std::max(err, std::abs(ei) / sc);
    }

    if (err <= 1.0) {
      t += h;
      y = ynew;
      k1 = k7;  // FSAL
      if (t == t1 || dir * (t1 - t) <= 0.0) return y;
    }

    const double fac =
        std::clamp(0.9 * std::pow(std::max(err, 1e-16), -0.2), 0.2, 5.0);
    h *= fac;
    if (std::abs(h) > opt.h_max) h = dir * opt.h_max;
    const double h_min = 1e-14 * std::max(1.0, std::abs(t));
    if (std::abs(h) < h_min)
      throw ConvergenceError("integrate_to: step size underflow at t=" +
                             std::to_string(t));
  }
  throw ConvergenceError("integrate_to: exceeded max step count");
}

}  // namespace hgate
