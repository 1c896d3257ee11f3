#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace biqrm {

// Dirichlet eigenstructure of -Laplace on the box (0,L_1) x ... x (0,L_d),
// truncated to the N smallest eigenvalues.
//
//   lambda_k = sum_i (k_i pi / L_i)^2
//   phi_k(x) = prod_i sqrt(2/L_i) sin(k_i pi x_i / L_i)
//
// Eigenvalues are sorted ascending; exact double ties are broken by the
// lexicographic order of the multi-index, so mode numbering is deterministic.
class SpectralDomain {
 public:
  SpectralDomain(std::vector<double> lengths, std::size_t modes);

  static std::shared_ptr<const SpectralDomain> make(std::vector<double> lengths,
                                                    std::size_t modes);

  std::size_t dimension() const { return lengths_.size(); }
  std::size_t modes() const { return modes_; }
  const std::vector<double>& lengths() const { return lengths_; }

  // 1-based mode index; throws std::out_of_range outside [1, modes()].
  double eigenvalue(std::size_t n) const;
  const std::vector<double>& eigenvalues() const { return eigenvalues_; }
  const std::vector<std::vector<int>>& multi_indices() const { return indices_; }

  // phi_n(x); throws std::domain_error when x leaves the closed box.
  double eigenfunction(std::size_t n, std::span<const double> x) const;

  bool operator==(const SpectralDomain& other) const;

 private:
  std::vector<double> lengths_;
  std::size_t modes_;
  std::vector<double> eigenvalues_;
  std::vector<std::vector<int>> indices_;
};

enum class FieldRole { source, observation, reconstruction };

// A spatial field stored as its first N coefficients against {phi_n}.
// The basis is orthonormal, so the L2 norm is the Euclidean norm of the
// coefficients.
class SpectralCoefficients {
 public:
  SpectralCoefficients(std::shared_ptr<const SpectralDomain> domain,
                       std::vector<double> values, FieldRole role);

  static SpectralCoefficients zero(std::shared_ptr<const SpectralDomain> domain,
                                   FieldRole role);
  // Unit coefficient on mode n (1-based).
  static SpectralCoefficients unit(std::shared_ptr<const SpectralDomain> domain,
                                   std::size_t n, FieldRole role);

  const std::shared_ptr<const SpectralDomain>& domain_ptr() const { return domain_; }
  const SpectralDomain& domain() const { return *domain_; }
  std::span<const double> values() const { return values_; }
  std::vector<double>& mutable_values() { return values_; }
  FieldRole role() const { return role_; }

  double l2_norm() const;
  SpectralCoefficients with_role(FieldRole role) const;

 private:
  std::shared_ptr<const SpectralDomain> domain_;
  std::vector<double> values_;
  FieldRole role_;
};

SpectralCoefficients operator+(const SpectralCoefficients& a, const SpectralCoefficients& b);
SpectralCoefficients operator-(const SpectralCoefficients& a, const SpectralCoefficients& b);
SpectralCoefficients operator*(double s, const SpectralCoefficients& v);
double distance(const SpectralCoefficients& a, const SpectralCoefficients& b);

// Ball of radius `radius` in the spectrally weighted scale of exponent
// `exponent`.
struct SmoothnessClass {
  SmoothnessClass(double exponent, double radius);
  double exponent;
  double radius;
};

// (sum_n lambda_n^(2p) c_n^2)^(1/2); equals the L2 norm at p = 0.
// Overflow is reported as std::range_error.
double hp_norm(const SpectralCoefficients& v, double p);

// hp_norm(v, cls.exponent) <= cls.radius, with relative slack 1e-12 so that
// boundary elements count as inside.
bool in_source_set(const SpectralCoefficients& v, const SmoothnessClass& cls);

// sum_n c_n phi_n(x); vanishes on the box boundary.
double evaluate_pointwise(const SpectralCoefficients& v, std::span<const double> x);

}  // namespace biqrm
