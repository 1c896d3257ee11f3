#pragma once

#include <stdexcept>
#include <string>

#include "biqrm/operators.hpp"
#include "biqrm/spectral.hpp"

namespace biqrm {

// Morozov target lies outside (0, ||h||): no root exists.
class NoSolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ChoiceRule { manual, apriori, aposteriori };

std::string to_string(ChoiceRule rule);

struct RegularizerConfig {
  double order = 2.0;  // b >= 2
  double alpha = 0.0;  // > 0
  ChoiceRule rule = ChoiceRule::manual;
  // provenance of the choice
  double delta = 0.0;
  double rho = 0.0;
  double p = 0.0;
  double xi = 0.0;
  double sigma = 0.0;

  // b >= 2, alpha > 0; aposteriori additionally xi > 1 and, at b = 2,
  // sigma in (0,1). Throws std::invalid_argument.
  void validate() const;
};

struct Reconstruction {
  SpectralCoefficients coefficients;  // f_n = h_n / ((1 + alpha lambda_n^b) mu_n)
  RegularizerConfig config;
  double discrepancy_value;         // zeta(alpha) at the data solved for
  double stability_constant;        // C of the lower-bound certificate
  double noise_amplification_bound; // delta / (C alpha^(2/b)) when delta known, else 0
  double residual_norm;             // || T_alpha f - h ||, zero up to rounding
};

// Diagonal solve of the regularized normal equation. Well-posed:
// || invert(h1) - invert(h2) || <= ||h1 - h2|| / (C alpha^(2/b)).
// Refuses inadmissible profiles with CertificateError.
Reconstruction qrm_invert(const ForwardModel& model,
                          const SpectralCoefficients& h_delta,
                          const RegularizerConfig& config);

// alpha = (delta/rho)^(b/(p+2)) for p < b, (delta/rho)^(b/(b+2)) otherwise;
// proportionality constant fixed to 1.
double apriori_alpha(double delta, const SmoothnessClass& cls, double order);

// zeta(alpha) = || smoother(h) - h || =
//   ( sum_n (alpha lambda_n^b / (1 + alpha lambda_n^b))^2 h_n^2 )^(1/2).
// zeta(0) = 0; increases strictly toward ||h|| (truncated limit).
double discrepancy(const SpectralCoefficients& h_delta, double alpha, double order);

struct MorozovResult {
  RegularizerConfig config;
  double target;    // xi delta (b != 2) or xi delta^sigma (b = 2)
  double achieved;  // zeta at the selected alpha
  int iterations;
};

// Root of zeta(alpha) = target by bracketing plus bisection in log(alpha),
// to |zeta - target| <= 1e-10 * target; monotonicity makes the root unique.
// target <= 0 -> std::invalid_argument; target >= ||h|| -> NoSolutionError.
MorozovResult morozov_select(const SpectralCoefficients& h_delta, double delta,
                             double xi, double order, double sigma = 0.0);

// Theoretical one-parameter bounds asserted by the experiment harness:
//   bias:  C1 rho alpha^(p/b) for p < b with C1 = (p/b)((b-p)/p)^((b-p)/b),
//          C2 rho alpha for p >= b with C2 = lambda1^(b-p);
//   noise: delta / (C alpha^(2/b)).
double bias_bound(const SmoothnessClass& cls, double alpha, double order,
                  double lambda1);
double noise_bound(double delta, double alpha, double order,
                   double stability_constant);

}  // namespace biqrm
