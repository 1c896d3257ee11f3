#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "biqrm/modulus.hpp"
#include "biqrm/operators.hpp"
#include "biqrm/regularizer.hpp"
#include "biqrm/spectral.hpp"

namespace biqrm {

// h + delta * e with e a seeded unit-norm direction, so the perturbation
// saturates the noise model exactly: ||h^d - h|| = delta. The generator is
// hand-rolled (splitmix64 + Box-Muller), so streams are reproducible across
// standard libraries.
SpectralCoefficients add_noise(const SpectralCoefficients& h, double delta,
                               std::uint64_t seed);

// Random element of the closed smoothness ball, drawn from a seeded
// direction and scaled to `fill` times the radius.
SpectralCoefficients sample_source(std::shared_ptr<const SpectralDomain> domain,
                                   const SmoothnessClass& cls, double fill,
                                   std::uint64_t seed);

// Coefficients c_n = rho * lambda_n^(-p-q) / Z with Z chosen so the weighted
// norm equals rho (up to a 1e-12 safety factor keeping the element strictly
// inside the ball).
SpectralCoefficients make_decay_source(std::shared_ptr<const SpectralDomain> domain,
                                       const SmoothnessClass& cls, double q);

struct StabilityCheck {
  double lhs;    // ||f||
  double rhs;    // C^(-p/(p+2)) rho^(2/(p+2)) ||h||^(p/(p+2))
  double slack;  // rhs - lhs
  bool holds;
};

StabilityCheck conditional_stability_check(const SpectralCoefficients& f,
                                           const SpectralCoefficients& h,
                                           const SmoothnessClass& cls,
                                           double stability_constant);

struct SourceSpec {
  bool decay = true;                 // coefficient law vs explicit values
  double q = 0.5;                    // extra decay exponent of the law
  std::vector<double> coefficients;  // used when decay == false
};

// Declarative rate experiment: exact source, smoothness class, QRM order,
// noise grid and parameter rule.
struct ExperimentSpec {
  std::shared_ptr<const SpectralDomain> domain;
  std::optional<TemporalProfile> profile;
  SourceSpec source;
  SmoothnessClass smoothness{1.0, 1.0};
  double order_b = 2.0;
  ChoiceRule rule = ChoiceRule::apriori;
  double xi = 1.5;
  double sigma = 0.5;
  std::vector<double> deltas;  // strictly decreasing
  std::uint64_t seed = 1;
  int trials = 1;
  std::string label = "experiment";

  // Checks grid monotonicity, trials >= 1, and that the realized source
  // passes in_source_set for (p, rho). Throws std::invalid_argument.
  void validate() const;
  SpectralCoefficients realize_source() const;
};

struct RatePoint {
  double delta = 0.0;
  double alpha_mean = 0.0;
  double error_mean = 0.0;
  double error_max = 0.0;
  double bound = 0.0;          // per-delta theoretical bound
  double slope_partial = 0.0;  // pairwise log-log slope vs previous point (NaN first)
  double morozov_residual_rel = 0.0;
  bool skipped = false;        // aposteriori target left the existence window
};

struct RateReport {
  std::string label;
  ChoiceRule rule = ChoiceRule::apriori;
  double order_b = 2.0;
  double p = 0.0;
  double rho = 0.0;
  double xi = 0.0;
  double sigma = 0.0;
  double theoretical_exponent = 0.0;
  double fitted_slope = 0.0;
  double fit_residual = 0.0;
  int points_used = 0;
  std::vector<RatePoint> points;
  bool pass = false;
  std::string verdict_notes;
  double runtime_seconds = 0.0;
  double truncation_tail = 0.0;  // neglected-tail bound in observation norm
};

// delta_p/(p+2) for p < b, b/(b+2) otherwise (apriori); the aposteriori
// branch exponents per order and sigma.
double theoretical_exponent(ChoiceRule rule, double p, double order_b, double sigma);

// Least-squares slope of log(error) against log(delta). Requires at least
// 4 points; reports the fit residual when requested.
double fit_loglog_slope(std::span<const double> deltas,
                        std::span<const double> errors,
                        double* residual = nullptr);

// For each delta: saturating noise, parameter choice, reconstruction and
// error over `trials` seeds; errors aggregate by fixed tree reduction, so
// the report is bit-stable for a given seed. Verdict: fitted slope within
// 0.1 below the theoretical exponent, and (apriori) every per-delta mean
// error below the explicit bias+noise bound. Fewer than 4 usable points
// raises std::runtime_error.
RateReport run_rate_experiment(const ExperimentSpec& spec);

struct OptimalityPoint {
  double delta;
  double worst_error;   // max over sampled sources and noise directions
  double omega_lower;   // lower bracket of the single-element modulus
  double omega_upper;
  double ratio;         // worst_error / omega_lower
  double ratio_ceiling; // C1 rho^(2/(p+2)) delta^(p/(p+2)) / omega_lower
};

struct OptimalityReport {
  double r2 = 0.0;  // ||psi||_inf^(-p/2) rho, radius of the embedded set
  std::vector<OptimalityPoint> points;
  double ratio_min = 0.0;
  double ratio_max = 0.0;
  bool embedding_ok = false;  // every sampled element landed in the class
  bool pass = false;
  std::string convention =
      "omega in single-element normalization; paired modulus = 2*omega(delta/2)";
};

// Worst observed QRM error over randomized sources in the smoothness ball
// plus the extremal two-mode vertex directions, against the modulus lower
// bound on the embedded set M_{r2,p}. Pass: every ratio in [1/2, ceiling].
OptimalityReport optimality_check(const ExperimentSpec& spec, int directions = 64);

struct WeylReport {
  double e1 = 0.0;  // min lambda_n / n^(2/d)
  double e2 = 0.0;  // max lambda_n / n^(2/d)
  double min_consecutive_ratio = 0.0;  // min lambda_n / lambda_{n+1}
  double max_consecutive_ratio = 0.0;
  bool pass = false;
};

// lambda_n / n^(2/d) stays in a fixed band and consecutive eigenvalue ratios
// are bounded away from zero; d = 1 or 2.
WeylReport weyl_ratio_check(const SpectralDomain& domain);

}  // namespace biqrm
