#pragma once

#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "biqrm/profile.hpp"
#include "biqrm/spectral.hpp"

namespace biqrm {

class IllConditionedError : public std::runtime_error {
 public:
  IllConditionedError(const std::string& what, std::size_t mode)
      : std::runtime_error(what), mode_(mode) {}
  std::size_t mode() const { return mode_; }

 private:
  std::size_t mode_;
};

enum class DiagonalKind { forward, forward_regularized, smoother };

// Multiplier snapshot of one diagonal operator:
//   forward:             mu_n
//   forward_regularized: (1 + alpha lambda_n^b) mu_n
//   smoother:            1 / (1 + alpha lambda_n^b)
struct OperatorDiagonal {
  std::shared_ptr<const SpectralDomain> domain;
  DiagonalKind kind;
  double alpha;
  double order;
  std::vector<double> multipliers;

  SpectralCoefficients apply(const SpectralCoefficients& v) const;
};

// Forward map and its diagonal relatives for one (domain, psi) pair. All
// operators act mode-by-mode on the truncated basis; the neglected tail is
// bounded by truncation_tail_bound(). Construction computes the multiplier
// sequence and the admissibility certificate once.
class ForwardModel {
 public:
  ForwardModel(std::shared_ptr<const SpectralDomain> domain, TemporalProfile psi);

  const SpectralDomain& domain() const { return *domain_; }
  const std::shared_ptr<const SpectralDomain>& domain_ptr() const { return domain_; }
  const TemporalProfile& profile() const { return profile_; }
  std::span<const double> mu() const { return mu_; }
  double mu_max_abs() const { return mu_max_abs_; }
  double psi_sup() const { return psi_sup_; }
  const AdmissibilityReport& certificate() const { return certificate_; }
  // lower_bound_constant at this domain's lambda_1; throws CertificateError
  // when the profile is inadmissible.
  double stability_constant() const;

  // ||psi||_inf ||f|| / lambda_N^2, the observation-norm size of the
  // neglected spectral tail.
  double truncation_tail_bound(double source_l2_norm) const;

  SpectralCoefficients apply_forward(const SpectralCoefficients& f) const;
  SpectralCoefficients apply_forward_regularized(const SpectralCoefficients& f,
                                                 double alpha, double order) const;
  SpectralCoefficients apply_smoother(const SpectralCoefficients& h, double alpha,
                                      double order) const;

  // Truncated exact solve h_n / mu_n. Guards against multipliers below
  // 1e3 * eps * max|mu_k| with IllConditionedError naming the mode.
  SpectralCoefficients exact_inverse(const SpectralCoefficients& h) const;

  // Coefficient snapshots of the regularized evolution at the given times:
  // v_n(t) = (1 + alpha lambda_n^b) mu_n(t) f_n.  alpha = 0 reduces to the
  // unregularized evolution; requires f in the scale of exponent order-2
  // (finite hp_norm) when alpha > 0.
  std::vector<SpectralCoefficients> mild_solution(const SpectralCoefficients& f,
                                                  std::span<const double> times,
                                                  double alpha, double order) const;

  OperatorDiagonal diagonal(DiagonalKind kind, double alpha = 0.0,
                            double order = 2.0) const;

 private:
  std::shared_ptr<const SpectralDomain> domain_;
  TemporalProfile profile_;
  std::vector<double> mu_;
  double mu_max_abs_;
  double psi_sup_;
  AdmissibilityReport certificate_;
};

struct IllPosednessRow {
  std::size_t k;
  double lambda;
  double observation_norm;  // || (1/lambda_k) phi_k || = 1/lambda_k
  double source_norm;       // || phi_k / (lambda_k mu_k) ||
  double ratio;             // source_norm * ||psi||_inf / lambda_k, >= 1
};

// Observations (1/lambda_k) phi_k shrink while their exact sources blow up.
std::vector<IllPosednessRow> illposedness_demo(const ForwardModel& model,
                                               std::size_t k_max);

}  // namespace biqrm
