#pragma once

#include <functional>
#include <optional>
#include <string>

#include "hgate/quadrature.hpp"
#include "hgate/variational.hpp"

namespace hgate {

enum class Verdict { Holds, Fails, Inconclusive };

std::string to_string(Verdict v);

struct ConditionThresholds {
  /// A value is "nonzero" when |v| > max(zero_threshold, 3*error); it is
  /// "zero" when |v| <= zero_threshold. Units assume Delta(0) = 1.
  double zero_threshold = 1e-6;
  double line_tol = 1e-10;
  double plane_tol = 1e-8;
  double kappa_denominator_tol = 1e-9;
};

struct CondScalar {
  QuadResult quad;
  Verdict verdict = Verdict::Inconclusive;
  std::string status = "ok";
  std::string note;
};

struct C2Result {
  double sup = 0.0;
  double argmax_t = 0.0;
  Verdict verdict = Verdict::Inconclusive;
};

struct C4Result {
  CondScalar f1;  // line integral against g
  CondScalar f2;  // plane integral of the Hessian pairing
  CondScalar f3;  // line integral, kappa1 denominator
  Verdict verdict = Verdict::Inconclusive;  // all three nonzero
  bool f3_degenerate = false;               // kappa1 denominator at zero
};

struct C6Witness {
  Vec2 x;
  double t1 = 0.0, t2 = 0.0;
  double deviation = 0.0;
};

struct C6Result {
  bool holds = false;
  std::optional<C6Witness> witness;
};

/// kappa coefficients entering the C5 integrand. kappa2/kappa3 are bounded
/// on the window only when the underlying full-line integrals (the C1 and
/// C1' integrands respectively) vanish; this is exactly the degenerate regime
/// in which C5 is meaningful.
struct KappaFunctions {
  double kappa1 = 0.0;
  double beta = 0.0;
  bool kappa1_degenerate = false;  // 0/0 resolved to kappa1 = 0
  std::function<double(double, int)> kappa2;  // (t, j in {0,1})
  std::function<double(double, int)> kappa3;
};

struct ConditionOptions {
  double beta = 0.0;
  ConditionThresholds thresholds;
  unsigned seed = 12345;
  /// C5 only: disable the empirical decay check and integrate on the fixed
  /// window below (diagnostic mode for integrands that do not decay).
  bool c5_enforce_decay = true;
  double c5_truncation_override = 0.0;
};

struct ConditionReport {
  std::string system_name;
  double beta = 0.0;
  ConditionThresholds thresholds;
  double delta0 = 0.0;

  CondScalar F1;        // C1
  CondScalar F1_prime;  // C1'
  C2Result C2;
  CondScalar F3;  // C3
  C4Result F4;    // C4
  C4Result F4_prime;
  CondScalar F5;  // C5
  C6Result C6;
  std::string kappa_note;
};

// ---- individual condition evaluators -----------------------------------

CondScalar cond_C1(const VariationalFrame& frame,
                   const ConditionThresholds& th = {});
CondScalar cond_C1p(const VariationalFrame& frame, double beta,
                    const ConditionThresholds& th = {});
C2Result cond_C2(const HomoclinicOrbit& orbit, const PlanarSystem& sys,
                 double threshold = 1e-6);
CondScalar cond_C3(const VariationalFrame& frame, double beta,
                   const ConditionThresholds& th = {});
C4Result cond_C4(const VariationalFrame& frame, double beta,
                 const ConditionThresholds& th = {});
C4Result cond_C4p(const VariationalFrame& frame, double beta,
                  const ConditionThresholds& th = {});
KappaFunctions compute_kappas(const VariationalFrame& frame, double beta,
                              const ConditionThresholds& th = {});
CondScalar cond_C5(const VariationalFrame& frame, double beta,
                   const ConditionOptions& opt = {});
C6Result cond_C6(const PlanarSystem& sys, const HomoclinicOrbit& orbit,
                 Vec2 box_lo, Vec2 box_hi, unsigned seed = 12345,
                 double tol = 1e-9);

/// Evaluates every condition; parts that cannot be evaluated (quadrature
/// refusal, kappa degeneracy) are reported with a non-"ok" status instead of
/// aborting the report.
ConditionReport evaluate_conditions(const VariationalFrame& frame,
                                    const ConditionOptions& opt = {});

/// F1' by the curve-integral route: int over the orbit of (g2 dx - g1 dy),
/// parameterized by x on the two branches with the branch time recovered by
/// numerically inverting gamma_1. Divides by delta0 so the result is
/// comparable with the time-integral route of cond_C1p.
double line_integral_F1p(const HomoclinicOrbit& orbit, const PlanarSystem& sys,
                         double beta, double delta0 = 1.0, double tol = 1e-9);

}  // namespace hgate
