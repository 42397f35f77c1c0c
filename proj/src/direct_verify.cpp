#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include "hgate/bifurcation.hpp"
#include "hgate/error.hpp"
#include "hgate/interp.hpp"
#include "hgate/ode.hpp"

namespace hgate {
namespace {

// Dense LU solve with partial pivoting (systems here are ~32x32).
bool lu_solve(std::vector<double> A, std::vector<double>& b, int n) {
  std::vector<int> piv(n);
  for (int i = 0; i < n; ++i) piv[i] = i;
  for (int k = 0; k < n; ++k) {
    int imax = k;
    double amax = std::abs(A[k * n + k]);
    for (int i = k + 1; i < n; ++i)
      if (std::abs(A[i * n + k]) > amax) {
        amax = std::abs(A[i * n + k]);
        imax = i;
      }
    if (amax < 1e-300) return false;
    if (imax != k) {
      for (int j = 0; j < n; ++j) std::swap(A[k * n + j], A[imax * n + j]);
      std::swap(b[k], b[imax]);
    }
    for (int i = k + 1; i < n; ++i) {
      const double m = A[i * n + k] / A[k * n + k];
      A[i * n + k] = 0.0;
      for (int j = k + 1; j < n; ++j) A[i * n + j] -= m * A[k * n + j];
      b[i] -= m * b[k];
    }
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (int j = i + 1; j < n; ++j) s -= A[i * n + j] * b[j];
    b[i] = s / A[i * n + i];
  }
  return true;
}

struct Segment {
  Vec2 end;   // state propagated to the right node
  Mat2 stm;   // state-transition matrix of the segment
};

Segment propagate(const PlanarSystem& sys, double epsilon, double t0, Vec2 x0,
                  double t1, const IntegratorOptions& iopt) {
  auto rhs = [&](double t, const std::array<double, 6>& y,
                 std::array<double, 6>& dy) {
    const Vec2 x{y[0], y[1]};
    const Vec2 f = sys.f(x) + epsilon * sys.g(x, t);
    const Mat2 J = sys.jacobian_f(x) + epsilon * sys.grad_g(x, t);
    dy[0] = f.x;
    dy[1] = f.y;
    // columns of the STM
    dy[2] = J.a * y[2] + J.b * y[3];
    dy[3] = J.c * y[2] + J.d * y[3];
    dy[4] = J.a * y[4] + J.b * y[5];
    dy[5] = J.c * y[4] + J.d * y[5];
  };
  auto y = integrate_to<6>(rhs, t0, {x0.x, x0.y, 1.0, 0.0, 0.0, 1.0}, t1, iopt);
  Segment s;
  s.end = {y[0], y[1]};
  s.stm = {y[2], y[4], y[3], y[5]};
  return s;
}

}  // namespace

VerifyResult direct_verify(const PlanarSystem& sys,
                           const HomoclinicOrbit& orbit, double epsilon,
                           const VerifyOptions& opt) {
  VerifyResult out;
  const double T = opt.window_T;
  const int N = opt.nodes;
  const int dim = 2 * N;
  const Vec2 eq = orbit.saddle.equilibrium;
  const Vec2 u = orbit.saddle.unstable_dir;
  const Vec2 sd = orbit.saddle.stable_dir;
  const double W = wedge(u, sd);

  IntegratorOptions iopt;
  iopt.rtol = opt.rtol;
  iopt.atol = opt.atol;

  std::vector<double> nodes(N);
  for (int k = 0; k < N; ++k) nodes[k] = -T + 2.0 * T * k / (N - 1);

  std::vector<Vec2> X(N);
  for (int k = 0; k < N; ++k)
    X[k] = opt.seed ? opt.seed(nodes[k])
                    : orbit.gamma(nodes[k] + opt.seed_phase);

  auto assemble = [&](const std::vector<Vec2>& Xc, std::vector<double>& R,
                      std::vector<double>* Jout) {
    R.assign(dim, 0.0);
    if (Jout) Jout->assign(dim * dim, 0.0);
    for (int k = 0; k + 1 < N; ++k) {
      const Segment seg =
          propagate(sys, epsilon, nodes[k], Xc[k], nodes[k + 1], iopt);
      const Vec2 r = seg.end - Xc[k + 1];
      R[2 * k] = r.x;
      R[2 * k + 1] = r.y;
      if (Jout) {
        auto& J = *Jout;
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j)
            J[(2 * k + i) * dim + (2 * k + j)] = seg.stm(i, j);
        J[(2 * k) * dim + (2 * k + 2)] = -1.0;
        J[(2 * k + 1) * dim + (2 * k + 3)] = -1.0;
      }
    }
    // Boundary rows: stable component at -T, unstable component at +T.
    const Vec2 vl = Xc[0] - eq;
    const Vec2 vr = Xc[N - 1] - eq;
    R[dim - 2] = wedge(u, vl) / W;
    R[dim - 1] = wedge(vr, sd) / W;
    if (Jout) {
      auto& J = *Jout;
      J[(dim - 2) * dim + 0] = -u.y / W;
      J[(dim - 2) * dim + 1] = u.x / W;
      J[(dim - 1) * dim + (dim - 2)] = sd.y / W;
      J[(dim - 1) * dim + (dim - 1)] = -sd.x / W;
    }
  };

  auto inf_norm = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  };

  std::vector<double> R, J;
  assemble(X, R, &J);
  double rnorm = inf_norm(R);
  double lambda = 1e-10;
  int it = 0;

  try {
    for (; it < opt.max_newton && rnorm > opt.newton_tol; ++it) {
      // Levenberg-regularized Gauss-Newton step: the phase direction of the
      // underlying connecting orbit makes the plain Jacobian nearly singular.
      std::vector<double> JtJ(dim * dim, 0.0), Jtr(dim, 0.0);
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
          double s = 0.0;
          for (int k = 0; k < dim; ++k) s += J[k * dim + i] * J[k * dim + j];
          JtJ[i * dim + j] = s;
        }
      for (int i = 0; i < dim; ++i) {
        double s = 0.0;
        for (int k = 0; k < dim; ++k) s += J[k * dim + i] * R[k];
        Jtr[i] = s;
      }
      double diag_scale = 0.0;
      for (int i = 0; i < dim; ++i)
        diag_scale = std::max(diag_scale, JtJ[i * dim + i]);

      bool accepted = false;
      for (int tries = 0; tries < 25 && !accepted; ++tries) {
        std::vector<double> A = JtJ;
        for (int i = 0; i < dim; ++i) A[i * dim + i] += lambda * diag_scale;
        std::vector<double> step = Jtr;
        if (!lu_solve(A, step, dim)) {
          lambda *= 10.0;
          continue;
        }
        std::vector<Vec2> Xtry(N);
        for (int k = 0; k < N; ++k)
          Xtry[k] = X[k] - Vec2{step[2 * k], step[2 * k + 1]};
        std::vector<double> Rtry;
        assemble(Xtry, Rtry, nullptr);
        const double rtry = inf_norm(Rtry);
        if (rtry < rnorm || rtry < opt.newton_tol) {
          X = Xtry;
          rnorm = rtry;
          lambda = std::max(lambda * 0.25, 1e-14);
          accepted = true;
        } else {
          lambda *= 8.0;
          if (lambda > 1e8) break;
        }
      }
      if (!accepted) break;
      if (rnorm > opt.newton_tol) assemble(X, R, &J);
    }
  } catch (const Error& e) {
    out.found = false;
    out.message = std::string("integration failure: ") + e.what();
    return out;
  }

  out.newton_iterations = it;
  out.residual_norm = rnorm;
  if (rnorm > opt.newton_tol) {
    out.found = false;
    out.message = "Newton divergence: residual " + std::to_string(rnorm) +
                  " above tolerance";
    return out;
  }

  // Dense samples of the converged solution for the distance metric.
  std::vector<double> ts;
  std::vector<Vec2> xs, dxs;
  for (int k = 0; k + 1 < N; ++k) {
    double t = nodes[k];
    Vec2 x = X[k];
    auto rhs2 = [&](double tt, const std::array<double, 2>& y,
                    std::array<double, 2>& dy) {
      const Vec2 xx{y[0], y[1]};
      const Vec2 f = sys.f(xx) + epsilon * sys.g(xx, tt);
      dy[0] = f.x;
      dy[1] = f.y;
    };
    while (t < nodes[k + 1] - 1e-12) {
      ts.push_back(t);
      xs.push_back(x);
      dxs.push_back(sys.f(x) + epsilon * sys.g(x, t));
      const double tn = std::min(t + opt.sample_dt, nodes[k + 1]);
      auto y = integrate_to<2>(rhs2, t, {x.x, x.y}, tn, iopt);
      x = {y[0], y[1]};
      t = tn;
    }
  }
  ts.push_back(nodes[N - 1]);
  xs.push_back(X[N - 1]);
  dxs.push_back(sys.f(X[N - 1]) + epsilon * sys.g(X[N - 1], nodes[N - 1]));

  auto curve = std::make_shared<HermiteCurve2>(ts, xs, dxs);
  out.x = [curve](double t) { return curve->eval(t); };
  out.sample_t = ts;
  out.sample_x = xs;

  const double Tcmp = T - opt.compare_margin;
  out.distance = phase_min_distance(out.x, orbit, Tcmp - opt.phase_range,
                                    opt.phase_range, &out.best_phase);
  out.found = true;
  return out;
}

}  // namespace hgate
