#pragma once

#include <functional>

#include "hgate/error.hpp"

namespace hgate {

/// Scalar integrand on the whole line with a declared exponential tail:
/// |evaluate(t)| should fall off at least like exp(-decay_rate*(|t|-core))
/// outside the core window. integrate_line verifies this empirically and
/// refuses to produce a value when the samples contradict it.
struct DecayingIntegrand1D {
  std::function<double(double)> evaluate;
  double decay_rate = 1.0;
  double core_window = 10.0;
};

struct QuadResult {
  double value = 0.0;
  double abs_error_estimate = 0.0;
  double truncation_T = 0.0;
  long node_count = 0;
};

struct QuadOptions {
  double tol = 1e-10;
  /// When set (> 0), integrate on [-T, T] with this T instead of deriving the
  /// truncation from the tail bound. Used for fixed-window diagnostics.
  double truncation_override = 0.0;
  /// Empirical decay verification; disable only for fixed-window diagnostics
  /// of integrands that are known not to decay.
  bool enforce_decay = true;
  long max_nodes = 4000000;
};

QuadResult integrate_line(const DecayingIntegrand1D& f, const QuadOptions& opt);
inline QuadResult integrate_line(const DecayingIntegrand1D& f,
                                 double tol = 1e-10) {
  QuadOptions opt;
  opt.tol = tol;
  return integrate_line(f, opt);
}

/// Iterated double integral over the plane for integrands with separable
/// exponential decay in each variable. The first argument of f is the inner
/// (s) variable, the second the outer (t) variable.
QuadResult integrate_plane(const std::function<double(double, double)>& f,
                           double decay_rate, double core_window,
                           const QuadOptions& opt);
inline QuadResult integrate_plane(
    const std::function<double(double, double)>& f, double decay_rate,
    double core_window, double tol = 1e-8) {
  QuadOptions opt;
  opt.tol = tol;
  return integrate_plane(f, decay_rate, core_window, opt);
}

/// Adaptive Gauss-Kronrod on a fixed interval (no tail handling).
QuadResult integrate_interval(const std::function<double(double)>& f, double a,
                              double b, double tol, long max_nodes = 2000000);

}  // namespace hgate
