#include "hgate/grid_integral.hpp"

namespace hgate {
namespace {

// 5-point Gauss-Legendre on [-1, 1]; on sub-0.05 panels of smooth integrands
// the panel error is far below double roundoff.
constexpr double kGx[5] = {-0.906179845938663992797626878299393,
                           -0.538469310105683091036314420700208,
                           0.0,
                           0.538469310105683091036314420700208,
                           0.906179845938663992797626878299393};
constexpr double kGw[5] = {0.236926885056189087514264040719917,
                           0.478628670499366468041291514835638,
                           0.568888888888888888888888888888889,
                           0.478628670499366468041291514835638,
                           0.236926885056189087514264040719917};

double panel(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double acc = 0.0;
  for (int i = 0; i < 5; ++i) acc += kGw[i] * f(c + h * kGx[i]);
  return acc * h;
}

}  // namespace

HermiteCurve1 cumulative_integral(const std::vector<double>& grid,
                                  const std::function<double(double)>& f,
                                  double start_value) {
  std::vector<double> vals(grid.size()), slopes(grid.size());
  vals[0] = start_value;
  slopes[0] = f(grid[0]);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    vals[i] = vals[i - 1] + panel(f, grid[i - 1], grid[i]);
    slopes[i] = f(grid[i]);
  }
  return HermiteCurve1(grid, vals, slopes);
}

double grid_integral(const std::vector<double>& grid,
                     const std::function<double(double)>& f) {
  double acc = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i)
    acc += panel(f, grid[i - 1], grid[i]);
  return acc;
}

}  // namespace hgate
