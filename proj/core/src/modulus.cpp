#include "biqrm/modulus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace biqrm {

namespace {

void validate_query(const ModulusQuery& q) {
  if (q.mu.empty()) throw std::invalid_argument("empty multiplier sequence");
  if (!(q.p > 0.0)) throw std::invalid_argument("p must be positive");
  if (!(q.r > 0.0)) throw std::invalid_argument("r must be positive");
  if (!(q.delta >= 0.0)) throw std::invalid_argument("delta must be nonnegative");
  for (double m : q.mu) {
    if (m == 0.0) throw std::invalid_argument("multipliers must be nonzero");
  }
}

}  // namespace

bool ModulusQuery::spectrum_member(double rel_tol) const {
  const double x = delta * delta / (r * r);
  for (double m : mu) {
    const double s = std::pow(std::abs(m), p + 2.0);
    if (std::abs(x - s) <= rel_tol * s) return true;
  }
  return false;
}

double ModulusQuery::delta0() const {
  double m = 0.0;
  for (double v : mu) m = std::max(m, std::abs(v));
  return r * std::pow(m, (p + 2.0) / 2.0);
}

double modulus_closed_form(const ModulusQuery& q) {
  validate_query(q);
  if (!q.spectrum_member())
    throw std::domain_error(
        "delta^2/r^2 is not a spectrum point; use modulus_bounds instead");
  return std::pow(q.r, 2.0 / (q.p + 2.0)) * std::pow(q.delta, q.p / (q.p + 2.0));
}

ModulusBounds modulus_bounds(const ModulusQuery& q) {
  validate_query(q);
  if (q.delta > q.delta0())
    throw std::out_of_range("delta above the covered range (delta0)");
  if (q.spectrum_member())
    throw std::invalid_argument("delta^2/r^2 sits on the spectrum; use the closed form");

  const double x = q.delta * q.delta / (q.r * q.r);
  std::vector<double> s(q.mu.size());
  for (std::size_t i = 0; i < q.mu.size(); ++i)
    s[i] = std::pow(std::abs(q.mu[i]), q.p + 2.0);

  std::size_t bracket = 0;
  bool descending = false;
  bool found = false;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    if (s[i] <= x && x <= s[i + 1]) {
      bracket = i + 1;
      descending = false;
      found = true;
      break;
    }
    if (s[i + 1] <= x && x <= s[i]) {
      bracket = i + 1;
      descending = true;
      found = true;
      break;
    }
  }
  if (!found)
    throw std::out_of_range(
        "delta^2/r^2 below the truncated spectrum floor: no consecutive bracket");

  // extreme consecutive-multiplier ratios, p/2 power
  double inf_down = std::numeric_limits<double>::infinity();  // |mu_{n+1}|/|mu_n|
  double sup_down = 0.0;
  double inf_up = std::numeric_limits<double>::infinity();    // |mu_n|/|mu_{n+1}|
  double sup_up = 0.0;
  for (std::size_t i = 0; i + 1 < q.mu.size(); ++i) {
    const double down = std::abs(q.mu[i + 1]) / std::abs(q.mu[i]);
    const double up = std::abs(q.mu[i]) / std::abs(q.mu[i + 1]);
    inf_down = std::min(inf_down, down);
    sup_down = std::max(sup_down, down);
    inf_up = std::min(inf_up, up);
    sup_up = std::max(sup_up, up);
  }
  const double half_p = q.p / 2.0;
  const double scale =
      std::pow(q.r, 2.0 / (q.p + 2.0)) * std::pow(q.delta, q.p / (q.p + 2.0));

  ModulusBounds bounds;
  bounds.bracket_index = bracket;
  bounds.descending_pair = descending;
  if (descending) {
    bounds.lower = std::pow(inf_down, half_p) * scale;
    bounds.upper = std::pow(sup_up, half_p) * scale;
  } else {
    bounds.lower = std::pow(inf_up, half_p) * scale;
    bounds.upper = std::pow(sup_down, half_p) * scale;
  }
  return bounds;
}

ModulusVertex modulus_extremal_vertex(const ModulusQuery& q, double eps) {
  validate_query(q);
  const std::size_t n = q.mu.size();
  const double source_budget = q.r * q.r;
  const double noise_budget = eps * eps;

  // max sum x s.t. sum a_i x_i <= A, sum c_i x_i <= B, x >= 0 with
  // a_i = |mu_i|^-p, c_i = mu_i^2
  std::vector<double> a(n), c(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = std::pow(std::abs(q.mu[i]), -q.p);
    c[i] = q.mu[i] * q.mu[i];
  }

  ModulusVertex best;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::min(source_budget / a[i], noise_budget / c[i]);
    if (x > best.value) {
      best.value = x;
      best.support = {static_cast<int>(i), -1};
      best.squared_coeff = {x, 0.0};
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double det = a[i] * c[j] - a[j] * c[i];
      if (det == 0.0) continue;
      const double xi = (source_budget * c[j] - noise_budget * a[j]) / det;
      const double xj = (noise_budget * a[i] - source_budget * c[i]) / det;
      if (xi < 0.0 || xj < 0.0) continue;
      const double value = xi + xj;
      if (value > best.value) {
        best.value = value;
        best.support = {static_cast<int>(i), static_cast<int>(j)};
        best.squared_coeff = {xi, xj};
      }
    }
  }
  return best;
}

double modulus_oracle_single(const ModulusQuery& q) {
  validate_query(q);
  if (q.mu.size() > 16)
    throw std::invalid_argument("oracle is for verification only: at most 16 modes");
  if (q.delta == 0.0) return 0.0;
  return std::sqrt(modulus_extremal_vertex(q, q.delta).value);
}

double modulus_oracle(const ModulusQuery& q) {
  ModulusQuery half = q;
  half.delta = 0.5 * q.delta;
  return 2.0 * modulus_oracle_single(half);
}

}  // namespace biqrm
