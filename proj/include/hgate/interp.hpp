#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "hgate/error.hpp"
#include "hgate/vec2.hpp"

namespace hgate {

/// Piecewise cubic Hermite interpolant on a strictly increasing grid.
/// Both the value and the derivative are prescribed at every node, so the
/// local error is O(h^4) and the derivative of the interpolant matches the
/// prescribed slope exactly at the nodes.
class HermiteCurve1 {
 public:
  HermiteCurve1() = default;
  HermiteCurve1(std::vector<double> t, std::vector<double> y,
                std::vector<double> dy)
      : t_(std::move(t)), y_(std::move(y)), dy_(std::move(dy)) {
    if (t_.size() < 2 || t_.size() != y_.size() || t_.size() != dy_.size())
      throw InvalidInput("HermiteCurve1: inconsistent sample arrays");
  }

  double front_t() const { return t_.front(); }
  double back_t() const { return t_.back(); }
  std::size_t size() const { return t_.size(); }
  const std::vector<double>& grid() const { return t_; }
  const std::vector<double>& values() const { return y_; }

  double eval(double t) const {
    const Seg s = locate(t);
    const double h00 = (1 + 2 * s.u) * s.m * s.m, h10 = s.u * s.m * s.m,
                 h01 = s.u * s.u * (3 - 2 * s.u), h11 = s.u * s.u * (s.u - 1);
    return h00 * y_[s.i] + s.h * h10 * dy_[s.i] + h01 * y_[s.i + 1] +
           s.h * h11 * dy_[s.i + 1];
  }

  double deriv(double t) const {
    const Seg s = locate(t);
    const double d00 = 6 * s.u * (s.u - 1);
    const double d10 = 3 * s.u * s.u - 4 * s.u + 1;
    const double d11 = 3 * s.u * s.u - 2 * s.u;
    return (d00 * y_[s.i] - d00 * y_[s.i + 1]) / s.h + d10 * dy_[s.i] +
           d11 * dy_[s.i + 1];
  }

 private:
  struct Seg {
    std::size_t i;
    double h, u, m;  // interval, normalized coordinate, 1-u
  };

  Seg locate(double t) const {
    // Clamped evaluation: callers are responsible for staying inside the
    // covered window; clamping keeps roundoff at the edges harmless.
    t = std::clamp(t, t_.front(), t_.back());
    const auto it = std::upper_bound(t_.begin(), t_.end(), t);
    std::size_t i = it == t_.begin() ? 0 : std::size_t(it - t_.begin()) - 1;
    if (i >= t_.size() - 1) i = t_.size() - 2;
    const double h = t_[i + 1] - t_[i];
    const double u = (t - t_[i]) / h;
    return {i, h, u, 1 - u};
  }

  std::vector<double> t_, y_, dy_;
};

/// Vec2-valued Hermite interpolant built from two scalar curves.
class HermiteCurve2 {
 public:
  HermiteCurve2() = default;
  HermiteCurve2(const std::vector<double>& t, const std::vector<Vec2>& y,
                const std::vector<Vec2>& dy) {
    std::vector<double> yx(y.size()), yy(y.size()), dx(y.size()), dyv(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
      yx[i] = y[i].x;
      yy[i] = y[i].y;
      dx[i] = dy[i].x;
      dyv[i] = dy[i].y;
    }
    cx_ = HermiteCurve1(t, yx, dx);
    cy_ = HermiteCurve1(t, yy, dyv);
  }

  Vec2 eval(double t) const { return {cx_.eval(t), cy_.eval(t)}; }
  Vec2 deriv(double t) const { return {cx_.deriv(t), cy_.deriv(t)}; }
  double front_t() const { return cx_.front_t(); }
  double back_t() const { return cx_.back_t(); }

 private:
  HermiteCurve1 cx_, cy_;
};

}  // namespace hgate
