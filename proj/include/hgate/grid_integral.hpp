#pragma once

#include <functional>
#include <vector>

#include "hgate/interp.hpp"

namespace hgate {

/// Cumulative integral of a smooth integrand over a fixed grid: per-interval
/// 7-point Gauss-Legendre prefix sums, returned as a Hermite curve whose
/// slope at the nodes is the integrand itself (exact by construction).
HermiteCurve1 cumulative_integral(const std::vector<double>& grid,
                                  const std::function<double(double)>& f,
                                  double start_value = 0.0);

/// Definite integral over the whole grid with the same panel rule.
double grid_integral(const std::vector<double>& grid,
                     const std::function<double(double)>& f);

}  // namespace hgate
