#pragma once

// Test-only oracles, independent of the library's quadrature and solver
// paths: composite Simpson integration, finite-difference derivatives, and
// random smooth decaying forcings.

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "hgate/vec2.hpp"

namespace oracle {

/// Composite Simpson on [a, b] with n panels (n rounded up to even).
inline double simpson(const std::function<double(double)>& f, double a,
                      double b, int n = 20000) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

/// Simpson over [-T, T] as a stand-in for the improper line integrals of
/// exponentially decaying integrands.
inline double simpson_line(const std::function<double(double)>& f, double T,
                           int n = 40000) {
  return simpson(f, -T, T, n);
}

/// Iterated Simpson for plane integrals of decaying integrands.
inline double simpson_plane(const std::function<double(double, double)>& f,
                            double T, int n = 600) {
  return simpson(
      [&](double t) {
        return simpson([&, t](double s) { return f(s, t); }, -T, T, n);
      },
      -T, T, n);
}

/// Fourth-order central difference of a scalar function.
inline double fd_derivative(const std::function<double(double)>& f, double x,
                            double h = 1e-4) {
  return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) /
         (12 * h);
}

/// Random smooth decaying forcing: sums of sech-bump components with
/// bounded frequencies. Deterministic for a given seed.
inline std::function<hgate::Vec2(double)> random_decaying_forcing(
    unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  std::uniform_real_distribution<double> rate(0.6, 1.4);
  std::uniform_real_distribution<double> shift(-2.0, 2.0);
  std::uniform_real_distribution<double> freq(0.0, 2.0);
  struct Bump {
    double a, r, c, w;
  };
  std::vector<Bump> bx, by;
  for (int i = 0; i < 3; ++i) {
    bx.push_back({amp(rng), rate(rng), shift(rng), freq(rng)});
    by.push_back({amp(rng), rate(rng), shift(rng), freq(rng)});
  }
  return [bx, by](double t) -> hgate::Vec2 {
    double x = 0.0, y = 0.0;
    for (const auto& b : bx)
      x += b.a * std::cos(b.w * t) / std::cosh(b.r * (t - b.c));
    for (const auto& b : by)
      y += b.a * std::cos(b.w * t) / std::cosh(b.r * (t - b.c));
    return {x, y};
  };
}

}  // namespace oracle
