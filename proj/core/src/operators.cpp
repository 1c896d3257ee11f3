#include "biqrm/operators.hpp"

#include <cmath>
#include <limits>

#include "biqrm/parallel.hpp"

namespace biqrm {

SpectralCoefficients OperatorDiagonal::apply(const SpectralCoefficients& v) const {
  if (!(v.domain() == *domain)) throw std::invalid_argument("domain mismatch");
  std::vector<double> out(v.values().begin(), v.values().end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= multipliers[i];
  const FieldRole role =
      kind == DiagonalKind::forward || kind == DiagonalKind::forward_regularized
          ? FieldRole::observation
          : v.role();
  return SpectralCoefficients(v.domain_ptr(), std::move(out), role);
}

ForwardModel::ForwardModel(std::shared_ptr<const SpectralDomain> domain,
                           TemporalProfile psi)
    : domain_(std::move(domain)), profile_(std::move(psi)) {
  if (!domain_) throw std::invalid_argument("null domain");
  auto seq = mu_sequence(profile_, *domain_);
  mu_ = std::move(seq.values);
  mu_max_abs_ = seq.max_abs;
  psi_sup_ = profile_.sup_norm();
  certificate_ = check_assumption(profile_, domain_->eigenvalue(1));
}

double ForwardModel::stability_constant() const {
  return lower_bound_constant(certificate_, domain_->eigenvalue(1));
}

double ForwardModel::truncation_tail_bound(double source_l2_norm) const {
  const double lambda_last = domain_->eigenvalue(domain_->modes());
  return psi_sup_ * source_l2_norm / (lambda_last * lambda_last);
}

SpectralCoefficients ForwardModel::apply_forward(const SpectralCoefficients& f) const {
  return diagonal(DiagonalKind::forward).apply(f);
}

SpectralCoefficients ForwardModel::apply_forward_regularized(
    const SpectralCoefficients& f, double alpha, double order) const {
  return diagonal(DiagonalKind::forward_regularized, alpha, order).apply(f);
}

SpectralCoefficients ForwardModel::apply_smoother(const SpectralCoefficients& h,
                                                  double alpha, double order) const {
  return diagonal(DiagonalKind::smoother, alpha, order).apply(h);
}

SpectralCoefficients ForwardModel::exact_inverse(const SpectralCoefficients& h) const {
  if (!(h.domain() == *domain_)) throw std::invalid_argument("domain mismatch");
  const double floor = 1e3 * std::numeric_limits<double>::epsilon() * mu_max_abs_;
  std::vector<double> out(h.values().begin(), h.values().end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (std::abs(mu_[i]) < floor) {
      throw IllConditionedError(
          "forward multiplier below the conditioning floor at mode " +
              std::to_string(i + 1),
          i + 1);
    }
    out[i] /= mu_[i];
  }
  return SpectralCoefficients(domain_, std::move(out), FieldRole::reconstruction);
}

std::vector<SpectralCoefficients> ForwardModel::mild_solution(
    const SpectralCoefficients& f, std::span<const double> times, double alpha,
    double order) const {
  if (!(f.domain() == *domain_)) throw std::invalid_argument("domain mismatch");
  if (alpha < 0.0) throw std::invalid_argument("alpha must be nonnegative");
  if (alpha > 0.0) {
    if (!(order >= 2.0)) throw std::invalid_argument("order must be >= 2");
    hp_norm(f, order - 2.0);  // finite or it throws: the mild solution needs it
  }
  const auto& lambda = domain_->eigenvalues();
  std::vector<SpectralCoefficients> snapshots;
  snapshots.reserve(times.size());
  for (double t : times) {
    if (t < 0.0 || t > profile_.horizon() * (1.0 + 1e-12))
      throw std::invalid_argument("snapshot time outside [0, horizon]");
    std::vector<double> coeff(domain_->modes(), 0.0);
    parallel_for(domain_->modes(), [&](std::size_t i) {
      const double weight =
          alpha > 0.0 ? 1.0 + alpha * std::pow(lambda[i], order) : 1.0;
      coeff[i] = weight * mu_coefficient(profile_, lambda[i], t) * f.values()[i];
    });
    snapshots.emplace_back(domain_, std::move(coeff), FieldRole::observation);
  }
  return snapshots;
}

OperatorDiagonal ForwardModel::diagonal(DiagonalKind kind, double alpha,
                                        double order) const {
  if (kind != DiagonalKind::forward) {
    if (!(alpha >= 0.0)) throw std::invalid_argument("alpha must be nonnegative");
    if (!(order >= 2.0)) throw std::invalid_argument("order must be >= 2");
  }
  OperatorDiagonal diag;
  diag.domain = domain_;
  diag.kind = kind;
  diag.alpha = kind == DiagonalKind::forward ? 0.0 : alpha;
  diag.order = kind == DiagonalKind::forward ? 0.0 : order;
  diag.multipliers.resize(domain_->modes());
  const auto& lambda = domain_->eigenvalues();
  for (std::size_t i = 0; i < diag.multipliers.size(); ++i) {
    switch (kind) {
      case DiagonalKind::forward:
        diag.multipliers[i] = mu_[i];
        break;
      case DiagonalKind::forward_regularized:
        diag.multipliers[i] = (1.0 + alpha * std::pow(lambda[i], order)) * mu_[i];
        break;
      case DiagonalKind::smoother:
        diag.multipliers[i] = 1.0 / (1.0 + alpha * std::pow(lambda[i], order));
        break;
    }
  }
  return diag;
}

std::vector<IllPosednessRow> illposedness_demo(const ForwardModel& model,
                                               std::size_t k_max) {
  if (k_max > model.domain().modes())
    throw std::out_of_range("k_max exceeds the truncation level");
  std::vector<IllPosednessRow> rows;
  rows.reserve(k_max);
  for (std::size_t k = 1; k <= k_max; ++k) {
    const double lambda = model.domain().eigenvalue(k);
    const double mu = model.mu()[k - 1];
    IllPosednessRow row;
    row.k = k;
    row.lambda = lambda;
    row.observation_norm = 1.0 / lambda;
    row.source_norm = 1.0 / (lambda * std::abs(mu));
    row.ratio = row.source_norm * model.psi_sup() / lambda;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace biqrm
