#include "biqrm/regularizer.hpp"

#include <cmath>

namespace biqrm {

std::string to_string(ChoiceRule rule) {
  switch (rule) {
    case ChoiceRule::manual: return "manual";
    case ChoiceRule::apriori: return "apriori";
    case ChoiceRule::aposteriori: return "aposteriori";
  }
  return "unknown";
}

void RegularizerConfig::validate() const {
  if (!(order >= 2.0)) throw std::invalid_argument("order must be >= 2");
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (rule == ChoiceRule::aposteriori) {
    if (!(xi > 1.0)) throw std::invalid_argument("aposteriori rule needs xi > 1");
    if (order == 2.0 && !(sigma > 0.0 && sigma < 1.0))
      throw std::invalid_argument("order 2 aposteriori rule needs sigma in (0,1)");
  }
}

Reconstruction qrm_invert(const ForwardModel& model,
                          const SpectralCoefficients& h_delta,
                          const RegularizerConfig& config) {
  config.validate();
  if (!(h_delta.domain() == model.domain()))
    throw std::invalid_argument("domain mismatch");
  if (model.certificate().satisfied == AdmissibilityCase::fails)
    throw CertificateError("profile failed the admissibility certificate: " +
                           model.certificate().failure_reason);

  const auto& lambda = model.domain().eigenvalues();
  const auto mu = model.mu();
  std::vector<double> out(h_delta.values().begin(), h_delta.values().end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] /= (1.0 + config.alpha * std::pow(lambda[i], config.order)) * mu[i];
  }
  SpectralCoefficients f(h_delta.domain_ptr(), std::move(out),
                         FieldRole::reconstruction);

  Reconstruction rec{std::move(f), config, 0.0, 0.0, 0.0, 0.0};
  rec.discrepancy_value = discrepancy(h_delta, config.alpha, config.order);
  rec.stability_constant = model.stability_constant();
  if (config.delta > 0.0) {
    rec.noise_amplification_bound =
        noise_bound(config.delta, config.alpha, config.order, rec.stability_constant);
  }
  rec.residual_norm = distance(
      model.apply_forward_regularized(rec.coefficients, config.alpha, config.order),
      h_delta);
  return rec;
}

double apriori_alpha(double delta, const SmoothnessClass& cls, double order) {
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
  if (!(order >= 2.0)) throw std::invalid_argument("order must be >= 2");
  const double ratio = delta / cls.radius;
  const double exponent =
      cls.exponent < order ? order / (cls.exponent + 2.0) : order / (order + 2.0);
  return std::pow(ratio, exponent);
}

double discrepancy(const SpectralCoefficients& h_delta, double alpha, double order) {
  if (!(alpha >= 0.0)) throw std::invalid_argument("alpha must be nonnegative");
  if (!(order >= 2.0)) throw std::invalid_argument("order must be >= 2");
  if (alpha == 0.0) return 0.0;
  const auto& lambda = h_delta.domain().eigenvalues();
  long double sum = 0.0L;
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    const double a = alpha * std::pow(lambda[i], order);
    const double factor = a / (1.0 + a);
    const long double term =
        static_cast<long double>(factor) * h_delta.values()[i];
    sum += term * term;
  }
  return static_cast<double>(std::sqrt(sum));
}

MorozovResult morozov_select(const SpectralCoefficients& h_delta, double delta,
                             double xi, double order, double sigma) {
  if (!(xi > 1.0)) throw std::invalid_argument("xi must exceed 1");
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
  if (!(order >= 2.0)) throw std::invalid_argument("order must be >= 2");
  const bool order_two = order == 2.0;
  if (order_two && !(sigma > 0.0 && sigma < 1.0))
    throw std::invalid_argument("order 2 needs sigma in (0,1)");

  const double target = order_two ? xi * std::pow(delta, sigma) : xi * delta;
  if (!(target > 0.0)) throw std::invalid_argument("nonpositive discrepancy target");
  const double data_norm = h_delta.l2_norm();
  if (!(target < data_norm))
    throw NoSolutionError("discrepancy target reaches ||h||: data too noisy");

  auto zeta = [&](double a) { return discrepancy(h_delta, a, order); };

  double lo = 1.0, hi = 1.0;
  int iterations = 0;
  for (int i = 0; i < 200 && zeta(lo) > target; ++i, ++iterations) lo *= 0.5;
  for (int i = 0; i < 200 && zeta(hi) < target; ++i, ++iterations) hi *= 2.0;
  if (zeta(lo) > target || zeta(hi) < target)
    throw NoSolutionError("bracketing the discrepancy target failed");

  double alpha = std::sqrt(lo * hi);
  double achieved = zeta(alpha);
  for (int i = 0; i < 500; ++i, ++iterations) {
    if (std::abs(achieved - target) <= 1e-12 * target) break;
    if (achieved < target)
      lo = alpha;
    else
      hi = alpha;
    alpha = std::sqrt(lo * hi);
    achieved = zeta(alpha);
  }
  if (std::abs(achieved - target) > 1e-10 * target)
    throw NoSolutionError("discrepancy equation not solved to tolerance");

  MorozovResult result;
  result.config.order = order;
  result.config.alpha = alpha;
  result.config.rule = ChoiceRule::aposteriori;
  result.config.delta = delta;
  result.config.xi = xi;
  result.config.sigma = order_two ? sigma : 0.0;
  result.target = target;
  result.achieved = achieved;
  result.iterations = iterations;
  return result;
}

double bias_bound(const SmoothnessClass& cls, double alpha, double order,
                  double lambda1) {
  if (!(cls.exponent > 0.0)) throw std::invalid_argument("exponent must be positive");
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (!(order >= 2.0)) throw std::invalid_argument("order must be >= 2");
  const double p = cls.exponent;
  const double b = order;
  if (p < b) {
    const double c1 = (p / b) * std::pow((b - p) / p, (b - p) / b);
    return c1 * cls.radius * std::pow(alpha, p / b);
  }
  const double c2 = std::pow(lambda1, b - p);
  return c2 * cls.radius * alpha;
}

double noise_bound(double delta, double alpha, double order,
                   double stability_constant) {
  if (!(stability_constant > 0.0))
    throw std::invalid_argument("stability constant must be positive");
  return delta / (stability_constant * std::pow(alpha, 2.0 / order));
}

}  // namespace biqrm
