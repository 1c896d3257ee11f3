#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "biqrm/spectral.hpp"

namespace biqrm {

struct ConstantShape {
  double value;
};

// c_0 + c_1 t + c_2 t^2 + ...
struct PolynomialShape {
  std::vector<double> coefficients;
};

// amplitude * cos(frequency * t + phase) on [from, to]; sine swaps cos->sin.
struct TrigSegment {
  double from;
  double to;
  double amplitude;
  double frequency = 1.0;
  double phase = 0.0;
  bool sine = false;
};

struct PiecewiseTrigShape {
  std::vector<TrigSegment> segments;
};

// Linear interpolation through (times[i], values[i]); times must start at 0,
// end at the horizon, and increase strictly.
struct TabulatedShape {
  std::vector<double> times;
  std::vector<double> values;
};

struct DerivativeBound {
  double value;
  bool analytic;  // claimed from the closed form rather than sampled
};

// Time factor on [0, horizon]. Piecewise shapes must match at their knots to
// 1e-12 relative; violations throw std::invalid_argument at construction.
class TemporalProfile {
 public:
  using Shape = std::variant<ConstantShape, PolynomialShape, PiecewiseTrigShape,
                             TabulatedShape>;

  TemporalProfile(double horizon, Shape shape,
                  std::optional<DerivativeBound> derivative_bound = std::nullopt);

  double horizon() const { return horizon_; }
  const Shape& shape() const { return shape_; }
  const std::optional<DerivativeBound>& derivative_bound() const {
    return derivative_bound_;
  }

  double operator()(double t) const;
  // One-sided at knots; tabulated shapes return the segment slope.
  double derivative(double t) const;

  // Interior breakpoints (segment joints, table knots), sorted.
  std::vector<double> knots() const;

  // Exact for constant / piecewise-trig / tabulated shapes; polynomial shapes
  // use a dense grid with local parabolic refinement. Cached at construction.
  double sup_norm() const { return sup_norm_; }

 private:
  double compute_sup_norm() const;

  double horizon_;
  Shape shape_;
  std::optional<DerivativeBound> derivative_bound_;
  double sup_norm_ = 0.0;
};

enum class AdmissibilityCase { fixed_sign, sign_changing, fails };

struct Interval {
  double from;
  double to;
};

// Raised when a certificate is missing, inconsistent, or yields a
// nonpositive lower-bound constant.
class CertificateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Certificate for the eigenvalue-weighted lower bound on the forward
// multipliers. `kappa1` bounds |psi| from below on [tau0, horizon]; the
// sign-changing case additionally certifies |psi| <= sign_change_bound on
// the sign-change set and records the last zero tau1.
struct AdmissibilityReport {
  AdmissibilityCase satisfied = AdmissibilityCase::fails;
  double horizon = 0.0;
  double tau0 = 0.0;
  double kappa1 = 0.0;
  double kappa2 = 0.0;                    // derivative bound (sign-changing)
  double tau1 = 0.0;                      // last zero of psi (sign-changing)
  std::vector<Interval> sign_change_set;  // {t : psi(t) psi(horizon) <= 0}
  double sign_change_bound = 0.0;         // M = (tau-tau0)^2 kappa1 / (4 tau tau0)
  double sign_change_max_abs = 0.0;       // max |psi| over the sign-change set
  double c_tilde = 0.0;                   // threshold constant
  double psi_at_0 = 0.0;
  double psi_at_horizon = 0.0;
  double sup_norm = 0.0;
  double integral_abs_tau1_tau0 = 0.0;    // int_{tau1}^{tau0} |psi|
  double lambda1_hint = 0.0;              // eigenvalue the certificate was tuned for
  double lower_bound_hint = 0.0;          // C evaluated at lambda1_hint
  std::string failure_reason;
};

// Classifies psi and searches the best certificate on a dense grid (1e4
// points plus knots) with bisection refinement: the feasible kappa1 is
// maximized, tau0 is the smallest point with |psi| >= kappa1 up to the
// horizon. `lambda1_hint` only tunes the fixed-sign trade-off between kappa1
// and tau0; pass the smallest eigenvalue of the target domain when known.
AdmissibilityReport check_assumption(const TemporalProfile& psi,
                                     double lambda1_hint = 9.869604401089358);

// mu(t) = int_0^t exp(-lambda (t-s)) (t-s) psi(s) ds to 1e-12 relative.
// Constant shapes use the closed form; everything else uses panel quadrature
// graded toward s = t, where the integrand mass concentrates for large
// lambda. Propagates QuadratureError when the tolerance is unreachable.
double mu_coefficient(const TemporalProfile& psi, double lambda, double t);

struct MuSequence {
  std::vector<double> values;  // mu_n at t = horizon, n = 1..N
  double max_abs;
};

// Multipliers for every mode of the domain, evaluated concurrently.
MuSequence mu_sequence(const TemporalProfile& psi, const SpectralDomain& domain);

// The constant C > 0 with lambda_n^2 |mu_n| >= C for all n.
//   fixed sign:    C = kappa1 [1 - (1 + lambda1 e) exp(-lambda1 e)], e = horizon - tau0
//   sign changing: C = min of the low-mode constant
//                      lambda1^2 exp(-c_tilde (tau - tau1)) (tau - tau0) int_{tau1}^{tau0} |psi|
//                  and the high-mode constant
//                      |psi(tau)| - (|psi(0)| + 2 tau kappa2) / (tau c_tilde).
// Throws CertificateError on failed certificates or nonpositive results.
double lower_bound_constant(const AdmissibilityReport& report, double lambda1);

}  // namespace biqrm
