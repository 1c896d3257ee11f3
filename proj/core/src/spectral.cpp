#include "biqrm/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace biqrm {

namespace {

constexpr double kPi = std::numbers::pi;

double index_eigenvalue(const std::vector<int>& k, const std::vector<double>& lengths) {
  double lambda = 0.0;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    const double w = static_cast<double>(k[i]) * kPi / lengths[i];
    lambda += w * w;
  }
  return lambda;
}

void enumerate(const std::vector<double>& lengths, double cap, std::size_t dim,
               std::vector<int>& k,
               std::vector<std::pair<double, std::vector<int>>>& out) {
  if (dim == lengths.size()) {
    const double lambda = index_eigenvalue(k, lengths);
    if (lambda <= cap) out.emplace_back(lambda, k);
    return;
  }
  const int k_max =
      static_cast<int>(std::floor(lengths[dim] * std::sqrt(cap) / kPi)) + 1;
  for (int ki = 1; ki <= k_max; ++ki) {
    k[dim] = ki;
    // prune: partial sum already above cap
    double partial = 0.0;
    for (std::size_t i = 0; i <= dim; ++i) {
      const double w = static_cast<double>(k[i]) * kPi / lengths[i];
      partial += w * w;
    }
    if (partial > cap) break;
    enumerate(lengths, cap, dim + 1, k, out);
  }
}

}  // namespace

SpectralDomain::SpectralDomain(std::vector<double> lengths, std::size_t modes)
    : lengths_(std::move(lengths)), modes_(modes) {
  if (lengths_.empty()) throw std::invalid_argument("domain needs at least one side length");
  if (modes_ == 0) throw std::invalid_argument("truncation level must be positive");
  for (double L : lengths_) {
    if (!(L > 0.0)) throw std::invalid_argument("side lengths must be positive");
  }

  // smallest cap guess: the one-dimensional count would need lambda up to
  // (N pi / L_min)^2; doubling from there terminates quickly in any d.
  const double l_min = *std::min_element(lengths_.begin(), lengths_.end());
  double cap = std::pow(static_cast<double>(modes_) * kPi / l_min, 2) /
               static_cast<double>(lengths_.size());
  std::vector<std::pair<double, std::vector<int>>> found;
  while (true) {
    found.clear();
    std::vector<int> k(lengths_.size(), 1);
    enumerate(lengths_, cap, 0, k, found);
    if (found.size() >= modes_) break;
    cap *= 2.0;
  }
  std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second < b.second;  // lexicographic tie break
  });
  eigenvalues_.reserve(modes_);
  indices_.reserve(modes_);
  for (std::size_t n = 0; n < modes_; ++n) {
    eigenvalues_.push_back(found[n].first);
    indices_.push_back(found[n].second);
  }
}

std::shared_ptr<const SpectralDomain> SpectralDomain::make(std::vector<double> lengths,
                                                           std::size_t modes) {
  return std::make_shared<const SpectralDomain>(std::move(lengths), modes);
}

double SpectralDomain::eigenvalue(std::size_t n) const {
  if (n < 1 || n > modes_) throw std::out_of_range("mode index outside [1, N]");
  return eigenvalues_[n - 1];
}

double SpectralDomain::eigenfunction(std::size_t n, std::span<const double> x) const {
  if (n < 1 || n > modes_) throw std::out_of_range("mode index outside [1, N]");
  if (x.size() != lengths_.size()) throw std::domain_error("point dimension mismatch");
  double phi = 1.0;
  const auto& k = indices_[n - 1];
  for (std::size_t i = 0; i < lengths_.size(); ++i) {
    if (x[i] < 0.0 || x[i] > lengths_[i]) throw std::domain_error("point outside the box");
    if (x[i] == 0.0 || x[i] == lengths_[i]) return 0.0;  // exact Dirichlet zero
    phi *= std::sqrt(2.0 / lengths_[i]) *
           std::sin(static_cast<double>(k[i]) * kPi * x[i] / lengths_[i]);
  }
  return phi;
}

bool SpectralDomain::operator==(const SpectralDomain& other) const {
  return lengths_ == other.lengths_ && modes_ == other.modes_;
}

SpectralCoefficients::SpectralCoefficients(std::shared_ptr<const SpectralDomain> domain,
                                           std::vector<double> values, FieldRole role)
    : domain_(std::move(domain)), values_(std::move(values)), role_(role) {
  if (!domain_) throw std::invalid_argument("null domain");
  if (values_.size() != domain_->modes())
    throw std::invalid_argument("coefficient count must equal the truncation level");
}

SpectralCoefficients SpectralCoefficients::zero(
    std::shared_ptr<const SpectralDomain> domain, FieldRole role) {
  std::vector<double> v(domain->modes(), 0.0);
  return SpectralCoefficients(std::move(domain), std::move(v), role);
}

SpectralCoefficients SpectralCoefficients::unit(
    std::shared_ptr<const SpectralDomain> domain, std::size_t n, FieldRole role) {
  if (n < 1 || n > domain->modes()) throw std::out_of_range("mode index outside [1, N]");
  std::vector<double> v(domain->modes(), 0.0);
  v[n - 1] = 1.0;
  return SpectralCoefficients(std::move(domain), std::move(v), role);
}

double SpectralCoefficients::l2_norm() const {
  double s = 0.0;
  for (double c : values_) s += c * c;
  return std::sqrt(s);
}

SpectralCoefficients SpectralCoefficients::with_role(FieldRole role) const {
  return SpectralCoefficients(domain_, values_, role);
}

namespace {

void require_same_domain(const SpectralCoefficients& a, const SpectralCoefficients& b) {
  if (!(a.domain() == b.domain())) throw std::invalid_argument("domain mismatch");
}

}  // namespace

SpectralCoefficients operator+(const SpectralCoefficients& a, const SpectralCoefficients& b) {
  require_same_domain(a, b);
  std::vector<double> v(a.values().begin(), a.values().end());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += b.values()[i];
  return SpectralCoefficients(a.domain_ptr(), std::move(v), a.role());
}

SpectralCoefficients operator-(const SpectralCoefficients& a, const SpectralCoefficients& b) {
  require_same_domain(a, b);
  std::vector<double> v(a.values().begin(), a.values().end());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] -= b.values()[i];
  return SpectralCoefficients(a.domain_ptr(), std::move(v), a.role());
}

SpectralCoefficients operator*(double s, const SpectralCoefficients& v) {
  std::vector<double> w(v.values().begin(), v.values().end());
  for (double& x : w) x *= s;
  return SpectralCoefficients(v.domain_ptr(), std::move(w), v.role());
}

double distance(const SpectralCoefficients& a, const SpectralCoefficients& b) {
  require_same_domain(a, b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i) {
    const double d = a.values()[i] - b.values()[i];
    s += d * d;
  }
  return std::sqrt(s);
}

SmoothnessClass::SmoothnessClass(double exponent_, double radius_)
    : exponent(exponent_), radius(radius_) {
  if (!(exponent >= 0.0)) throw std::invalid_argument("smoothness exponent must be >= 0");
  if (!(radius > 0.0)) throw std::invalid_argument("smoothness radius must be > 0");
}

double hp_norm(const SpectralCoefficients& v, double p) {
  if (!(p >= 0.0)) throw std::invalid_argument("scale exponent must be >= 0");
  const auto& lambda = v.domain().eigenvalues();
  double s = 0.0;
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    const double c = v.values()[i];
    s += std::pow(lambda[i], 2.0 * p) * c * c;
  }
  const double norm = std::sqrt(s);
  if (!std::isfinite(norm)) throw std::range_error("weighted norm overflowed");
  return norm;
}

bool in_source_set(const SpectralCoefficients& v, const SmoothnessClass& cls) {
  return hp_norm(v, cls.exponent) <= cls.radius * (1.0 + 1e-12);
}

double evaluate_pointwise(const SpectralCoefficients& v, std::span<const double> x) {
  const auto& lengths = v.domain().lengths();
  if (x.size() != lengths.size()) throw std::domain_error("point dimension mismatch");
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    if (x[i] < 0.0 || x[i] > lengths[i]) throw std::domain_error("point outside the box");
  }
  double s = 0.0;
  for (std::size_t n = 1; n <= v.domain().modes(); ++n) {
    const double c = v.values()[n - 1];
    if (c != 0.0) s += c * v.domain().eigenfunction(n, x);
  }
  return s;
}

}  // namespace biqrm
