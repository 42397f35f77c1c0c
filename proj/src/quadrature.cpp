#include "hgate/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>
#include <vector>

namespace hgate {
namespace {

// 15-point Kronrod nodes/weights with the embedded 7-point Gauss rule
// (QUADPACK dqk15 constants).
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct PanelEval {
  double integral;
  double error;
};

PanelEval gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fv[15];
  for (int j = 0; j < 7; ++j) {
    fv[j] = f(c - h * kXgk[j]);
    fv[14 - j] = f(c + h * kXgk[j]);
  }
  fv[7] = f(c);

  double resk = kWgk[7] * fv[7];
  double resg = kWg[3] * fv[7];
  for (int j = 0; j < 7; ++j) resk += kWgk[j] * (fv[j] + fv[14 - j]);
  for (int j = 0; j < 3; ++j)
    resg += kWg[j] * (fv[2 * j + 1] + fv[13 - 2 * j]);

  double resabs = kWgk[7] * std::abs(fv[7]);
  for (int j = 0; j < 7; ++j)
    resabs += kWgk[j] * (std::abs(fv[j]) + std::abs(fv[14 - j]));

  const double mean = 0.5 * resk;
  double resasc = kWgk[7] * std::abs(fv[7] - mean);
  for (int j = 0; j < 7; ++j)
    resasc += kWgk[j] * (std::abs(fv[j] - mean) + std::abs(fv[14 - j] - mean));

  double err = std::abs(resk - resg) * h;
  resasc *= h;
  resabs *= h;
  if (resasc != 0.0 && err != 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  const double eps = 50.0 * 2.220446049250313e-16 * resabs;
  err = std::max(err, eps);
  return {resk * h, err};
}

struct Panel {
  double a, b;
  double integral;
  double error;
};

}  // namespace

QuadResult integrate_interval(const std::function<double(double)>& f, double a,
                              double b, double tol, long max_nodes) {
  QuadResult out;
  if (a == b) return out;

  std::vector<Panel> done;
  std::deque<Panel> work;
  auto push = [&](double lo, double hi) {
    const PanelEval e = gk15(f, lo, hi);
    work.push_back({lo, hi, e.integral, e.error});
    out.node_count += 15;
  };
  push(a, b);

  while (!work.empty()) {
    // Always split the worst panel first.
    auto worst = std::max_element(
        work.begin(), work.end(),
        [](const Panel& l, const Panel& r) { return l.error < r.error; });
    double total_err = 0.0;
    for (const Panel& p : work) total_err += p.error;
    for (const Panel& p : done) total_err += p.error;
    if (total_err <= tol) break;

    const Panel p = *worst;
    work.erase(worst);
    const double mid = 0.5 * (p.a + p.b);
    if (mid <= p.a || mid >= p.b || (p.b - p.a) < 1e-14 * (1.0 + std::abs(mid))) {
      done.push_back(p);  // cannot subdivide further
      continue;
    }
    if (out.node_count + 30 > max_nodes)
      throw ConvergenceError(
          "integrate_interval: node budget exhausted before reaching tol");
    push(p.a, mid);
    push(mid, p.b);
  }

  for (const Panel& p : work) done.push_back(p);
  // Deterministic summation order by interval position.
  std::sort(done.begin(), done.end(),
            [](const Panel& l, const Panel& r) { return l.a < r.a; });
  for (const Panel& p : done) {
    out.value += p.integral;
    out.abs_error_estimate += p.error;
  }
  return out;
}

QuadResult integrate_line(const DecayingIntegrand1D& f,
                          const QuadOptions& opt) {
  if (!(opt.tol > 0.0)) throw InvalidInput("integrate_line: tol must be > 0");
  if (!(f.decay_rate > 0.0))
    throw InvalidInput("integrate_line: decay_rate must be > 0");
  const double rate = f.decay_rate;
  const double core = std::max(f.core_window, 1.0 / rate);

  // Empirical amplitude of the exponential envelope beyond the core window.
  const double step = 1.0 / rate;
  const int probes = 12;
  double envelope = 0.0;
  std::vector<double> mags(probes);
  for (int k = 1; k <= probes; ++k) {
    const double t = core + k * step;
    const double m = std::max(std::abs(f.evaluate(t)), std::abs(f.evaluate(-t)));
    mags[k - 1] = m;
    envelope = std::max(envelope, m * std::exp(rate * (t - core)));
  }

  if (opt.enforce_decay) {
    // The sampled magnitudes must be compatible with the declared envelope:
    // a fitted exponential with too-slow a rate, or outright growth, is
    // rejected instead of silently truncating a divergent integral. Samples
    // too small to matter at the requested tolerance are exempt (integrands
    // that decay faster than declared bottom out at the roundoff floor and
    // wobble there).
    const double negligible =
        std::max({envelope * 1e-12, 0.01 * opt.tol * rate, 1e-280});
    for (int k = 0; k + 4 < probes; ++k) {
      if (mags[k] < negligible && mags[k + 4] < negligible) continue;
      const double expected_drop = std::exp(-rate * 4.0 * step);  // e^-4
      const double allowed = 20.0 * expected_drop;                // slack
      if (mags[k + 4] > std::max(mags[k] * allowed, negligible))
        throw DecayError(
            "integrate_line: integrand does not decay at the declared rate "
            "(sample at |t|=" +
            std::to_string(core + (k + 5) * step) + ")");
    }
  }

  double T;
  if (opt.truncation_override > 0.0) {
    T = opt.truncation_override;
  } else {
    // Truncate where the analytic tail bound drops below tol/4.
    const double target = opt.tol / 4.0;
    T = core;
    if (envelope > 0.0 && envelope / rate > target)
      T = core + std::log(envelope / (rate * target)) / rate;
    T = std::min(T, core + 500.0 / rate);
  }

  // Graded initial mesh: split at 0 (possible kink/peak), fine panels over
  // the core, wider toward the truncation ends.
  std::vector<double> knots;
  const int core_panels = 8;
  for (int i = 0; i <= core_panels; ++i)
    knots.push_back(-core + 2.0 * core * i / core_panels);
  double edge = core;
  while (edge < T) {
    edge = std::min(T, edge + 4.0 / rate);
    knots.push_back(edge);
    knots.push_back(-edge);
  }
  knots.push_back(0.0);
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

  QuadResult out;
  const double panel_tol = 0.5 * opt.tol / double(knots.size() - 1);
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const QuadResult part = integrate_interval(f.evaluate, knots[i],
                                               knots[i + 1], panel_tol,
                                               opt.max_nodes);
    out.value += part.value;
    out.abs_error_estimate += part.abs_error_estimate;
    out.node_count += part.node_count;
  }
  const double tail_bound =
      envelope > 0.0 ? envelope * std::exp(-rate * (T - core)) / rate : 0.0;
  out.abs_error_estimate += 2.0 * tail_bound;
  out.truncation_T = T;
  return out;
}

QuadResult integrate_plane(const std::function<double(double, double)>& f,
                           double decay_rate, double core_window,
                           const QuadOptions& opt) {
  if (!(opt.tol > 0.0)) throw InvalidInput("integrate_plane: tol must be > 0");
  // Estimate the outer truncation analytically to budget the inner tolerance.
  const double rate = decay_rate;
  const double core = std::max(core_window, 1.0 / rate);
  const double T_est =
      opt.truncation_override > 0.0
          ? opt.truncation_override
          : core + std::max(0.0, std::log(4.0 / (rate * opt.tol)) / rate);

  QuadOptions inner_opt = opt;
  inner_opt.tol = 0.25 * opt.tol / std::max(1.0, 2.0 * T_est);

  long inner_nodes = 0;
  double inner_err_sup = 0.0;
  DecayingIntegrand1D outer;
  outer.decay_rate = rate;
  outer.core_window = core;
  outer.evaluate = [&](double t) {
    DecayingIntegrand1D inner{[&, t](double s) { return f(s, t); }, rate, core};
    const QuadResult r = integrate_line(inner, inner_opt);
    inner_nodes += r.node_count;
    inner_err_sup = std::max(inner_err_sup, r.abs_error_estimate);
    return r.value;
  };

  QuadOptions outer_opt = opt;
  outer_opt.tol = 0.5 * opt.tol;
  QuadResult out = integrate_line(outer, outer_opt);
  out.node_count += inner_nodes;
  out.abs_error_estimate += inner_err_sup * 2.0 * out.truncation_T;
  return out;
}

}  // namespace hgate
