#include "biqrm/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>

#include "biqrm/parallel.hpp"

namespace biqrm {

namespace {

// Hand-rolled generator: splitmix64 stream plus Box-Muller, so noise
// realizations do not depend on the standard library's distributions.
struct SeededStream {
  std::uint64_t state;

  explicit SeededStream(std::uint64_t seed) : state(seed) {
    next();
    next();  // decorrelate small seeds
  }

  std::uint64_t next() {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  void gaussians(std::vector<double>& out) {
    const double two_pi = 2.0 * std::numbers::pi;
    for (std::size_t i = 0; i < out.size(); i += 2) {
      const double u1 = 1.0 - uniform();  // (0, 1]
      const double u2 = uniform();
      const double radius = std::sqrt(-2.0 * std::log(u1));
      out[i] = radius * std::cos(two_pi * u2);
      if (i + 1 < out.size()) out[i + 1] = radius * std::sin(two_pi * u2);
    }
  }
};

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  SeededStream s(seed ^ (a + 1) * 0xd1342543de82ef95ULL ^ (b + 1) * 0xaf251af3b0f025b5ULL);
  return s.next();
}

std::vector<double> unit_direction(std::size_t n, std::uint64_t seed) {
  std::vector<double> e(n, 0.0);
  SeededStream stream(seed);
  stream.gaussians(e);
  double norm = 0.0;
  for (double x : e) norm += x * x;
  norm = std::sqrt(norm);
  if (norm == 0.0) {
    e.assign(n, 0.0);
    e[0] = 1.0;
    return e;
  }
  for (double& x : e) x /= norm;
  return e;
}

}  // namespace

SpectralCoefficients add_noise(const SpectralCoefficients& h, double delta,
                               std::uint64_t seed) {
  if (!(delta >= 0.0)) throw std::invalid_argument("delta must be nonnegative");
  if (delta == 0.0) return h.with_role(FieldRole::observation);
  const auto e = unit_direction(h.domain().modes(), seed);
  std::vector<double> out(h.values().begin(), h.values().end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += delta * e[i];
  return SpectralCoefficients(h.domain_ptr(), std::move(out), FieldRole::observation);
}

SpectralCoefficients sample_source(std::shared_ptr<const SpectralDomain> domain,
                                   const SmoothnessClass& cls, double fill,
                                   std::uint64_t seed) {
  if (!(fill > 0.0 && fill <= 1.0))
    throw std::invalid_argument("fill must lie in (0, 1]");
  auto g = unit_direction(domain->modes(), seed);
  SpectralCoefficients f(domain, std::move(g), FieldRole::source);
  const double norm = hp_norm(f, cls.exponent);
  const double scale = fill * cls.radius / norm;
  return scale * f;
}

SpectralCoefficients make_decay_source(std::shared_ptr<const SpectralDomain> domain,
                                       const SmoothnessClass& cls, double q) {
  const auto& lambda = domain->eigenvalues();
  std::vector<double> raw(lambda.size());
  for (std::size_t i = 0; i < raw.size(); ++i)
    raw[i] = std::pow(lambda[i], -(cls.exponent + q));
  SpectralCoefficients f(domain, std::move(raw), FieldRole::source);
  const double norm = hp_norm(f, cls.exponent);
  if (!(norm > 0.0)) throw std::range_error("decay law underflowed to zero");
  const double scale = cls.radius * (1.0 - 1e-12) / norm;
  return scale * f;
}

StabilityCheck conditional_stability_check(const SpectralCoefficients& f,
                                           const SpectralCoefficients& h,
                                           const SmoothnessClass& cls,
                                           double stability_constant) {
  if (!(stability_constant > 0.0))
    throw std::invalid_argument("stability constant must be positive");
  const double p = cls.exponent;
  StabilityCheck check;
  check.lhs = f.l2_norm();
  check.rhs = std::pow(stability_constant, -p / (p + 2.0)) *
              std::pow(cls.radius, 2.0 / (p + 2.0)) *
              std::pow(h.l2_norm(), p / (p + 2.0));
  check.slack = check.rhs - check.lhs;
  check.holds = check.lhs <= check.rhs * (1.0 + 1e-12);
  return check;
}

void ExperimentSpec::validate() const {
  if (!domain) throw std::invalid_argument("experiment needs a domain");
  if (!profile) throw std::invalid_argument("experiment needs a profile");
  if (deltas.empty()) throw std::invalid_argument("experiment needs a noise grid");
  for (std::size_t i = 0; i + 1 < deltas.size(); ++i) {
    if (!(deltas[i] > deltas[i + 1]))
      throw std::invalid_argument("noise grid must decrease strictly");
  }
  if (!(deltas.back() > 0.0)) throw std::invalid_argument("noise levels must be positive");
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (!(order_b >= 2.0)) throw std::invalid_argument("order must be >= 2");
  if (rule == ChoiceRule::manual)
    throw std::invalid_argument("rate experiments need apriori or aposteriori rule");
  if (rule == ChoiceRule::aposteriori) {
    if (!(xi > 1.0)) throw std::invalid_argument("aposteriori rule needs xi > 1");
    if (order_b == 2.0 && !(sigma > 0.0 && sigma < 1.0))
      throw std::invalid_argument("order 2 aposteriori rule needs sigma in (0,1)");
  }
  const auto f = realize_source();
  if (!in_source_set(f, smoothness))
    throw std::invalid_argument("exact source leaves the smoothness ball");
}

SpectralCoefficients ExperimentSpec::realize_source() const {
  if (source.decay) return make_decay_source(domain, smoothness, source.q);
  return SpectralCoefficients(domain, source.coefficients, FieldRole::source);
}

double theoretical_exponent(ChoiceRule rule, double p, double order_b, double sigma) {
  if (rule == ChoiceRule::apriori) {
    return p < order_b ? p / (p + 2.0) : order_b / (order_b + 2.0);
  }
  if (order_b == 2.0) return std::min(p * sigma / (p + 2.0), 1.0 - sigma);
  if (p < order_b - 2.0) return p / (p + 2.0);
  return std::min(p / (p + 2.0), (order_b - 2.0) / order_b);
}

double fit_loglog_slope(std::span<const double> deltas, std::span<const double> errors,
                        double* residual) {
  if (deltas.size() != errors.size() || deltas.size() < 2)
    throw std::invalid_argument("slope fit needs matching grids of >= 2 points");
  const std::size_t n = deltas.size();
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = std::log(deltas[i]);
    y[i] = std::log(errors[i]);
  }
  const double xb = mean(x);
  const double yb = mean(y);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - xb) * (x[i] - xb);
    sxy += (x[i] - xb) * (y[i] - yb);
  }
  const double slope = sxy / sxx;
  if (residual) {
    const double intercept = yb - slope * xb;
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y[i] - (intercept + slope * x[i]);
      rss += r * r;
    }
    *residual = std::sqrt(rss / static_cast<double>(n));
  }
  return slope;
}

namespace {

double aposteriori_bound(double delta, const SmoothnessClass& cls, double b,
                         double xi, double sigma, double c_stability,
                         double psi_sup, double lambda1) {
  const double p = cls.exponent;
  const double rho = cls.radius;
  const double c_apost = std::pow((xi + 2.0) / c_stability, p / (p + 2.0));
  if (b == 2.0) {
    const double c5 = psi_sup / (c_stability * (xi - 1.0) * std::pow(lambda1, p));
    return c_apost * std::pow(rho, 2.0 / (p + 2.0)) *
               std::pow(delta, sigma * p / (p + 2.0)) +
           c5 * rho * std::pow(delta, 1.0 - sigma);
  }
  const double stable_term =
      c_apost * std::pow(rho, 2.0 / (p + 2.0)) * std::pow(delta, p / (p + 2.0));
  if (p < b - 2.0) {
    const double c3 = std::pow(psi_sup, 2.0 / (p + 2.0)) /
                      (c_stability * std::pow(xi - 1.0, 2.0 / (p + 2.0)));
    return stable_term +
           c3 * std::pow(rho, 2.0 / (p + 2.0)) * std::pow(delta, p / (p + 2.0));
  }
  const double c4 =
      std::pow(psi_sup / ((xi - 1.0) * std::pow(lambda1, p - b + 2.0)), 2.0 / b) /
      c_stability;
  return stable_term +
         c4 * std::pow(rho, 2.0 / b) * std::pow(delta, (b - 2.0) / b);
}

}  // namespace

RateReport run_rate_experiment(const ExperimentSpec& spec) {
  const auto start = std::chrono::steady_clock::now();
  spec.validate();

  const SpectralCoefficients f = spec.realize_source();
  const ForwardModel model(spec.domain, *spec.profile);
  const double c_stability = model.stability_constant();
  const double lambda1 = spec.domain->eigenvalue(1);
  const SpectralCoefficients h = model.apply_forward(f);

  const std::size_t nd = spec.deltas.size();
  const std::size_t nt = static_cast<std::size_t>(spec.trials);

  struct Cell {
    double error = 0.0;
    double alpha = 0.0;
    double morozov_rel = 0.0;
    bool skipped = false;
  };
  std::vector<Cell> cells(nd * nt);

  parallel_for(nd * nt, [&](std::size_t idx) {
    const std::size_t i = idx / nt;
    const std::size_t k = idx % nt;
    const double delta = spec.deltas[i];
    Cell& cell = cells[idx];
    const auto h_delta = add_noise(h, delta, mix_seed(spec.seed, i, k));

    RegularizerConfig cfg;
    cfg.order = spec.order_b;
    cfg.delta = delta;
    cfg.rho = spec.smoothness.radius;
    cfg.p = spec.smoothness.exponent;
    if (spec.rule == ChoiceRule::apriori) {
      cfg.rule = ChoiceRule::apriori;
      cfg.alpha = apriori_alpha(delta, spec.smoothness, spec.order_b);
    } else {
      const double target = spec.order_b == 2.0
                                ? spec.xi * std::pow(delta, spec.sigma)
                                : spec.xi * delta;
      if (!(target < h_delta.l2_norm())) {
        cell.skipped = true;
        return;
      }
      const auto sel =
          morozov_select(h_delta, delta, spec.xi, spec.order_b, spec.sigma);
      cfg = sel.config;
      cfg.rho = spec.smoothness.radius;
      cfg.p = spec.smoothness.exponent;
      cell.morozov_rel = std::abs(sel.achieved - sel.target) / sel.target;
    }
    const auto rec = qrm_invert(model, h_delta, cfg);
    cell.error = distance(f, rec.coefficients);
    cell.alpha = cfg.alpha;
  });

  RateReport report;
  report.label = spec.label;
  report.rule = spec.rule;
  report.order_b = spec.order_b;
  report.p = spec.smoothness.exponent;
  report.rho = spec.smoothness.radius;
  report.xi = spec.rule == ChoiceRule::aposteriori ? spec.xi : 0.0;
  report.sigma =
      spec.rule == ChoiceRule::aposteriori && spec.order_b == 2.0 ? spec.sigma : 0.0;
  report.theoretical_exponent = theoretical_exponent(
      spec.rule, spec.smoothness.exponent, spec.order_b, spec.sigma);
  report.truncation_tail = model.truncation_tail_bound(f.l2_norm());

  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> fit_deltas, fit_errors;
  for (std::size_t i = 0; i < nd; ++i) {
    RatePoint point;
    point.delta = spec.deltas[i];
    std::vector<double> errs, alphas;
    double emax = 0.0, mrel = 0.0;
    bool skipped = false;
    for (std::size_t k = 0; k < nt; ++k) {
      const Cell& cell = cells[i * nt + k];
      if (cell.skipped) {
        skipped = true;
        break;
      }
      errs.push_back(cell.error);
      alphas.push_back(cell.alpha);
      emax = std::max(emax, cell.error);
      mrel = std::max(mrel, cell.morozov_rel);
    }
    point.skipped = skipped;
    if (!skipped) {
      point.error_mean = mean(errs);
      point.error_max = emax;
      point.alpha_mean = mean(alphas);
      point.morozov_residual_rel = mrel;
      if (spec.rule == ChoiceRule::apriori) {
        point.bound = bias_bound(spec.smoothness, point.alpha_mean, spec.order_b,
                                 lambda1) +
                      noise_bound(point.delta, point.alpha_mean, spec.order_b,
                                  c_stability);
      } else {
        point.bound =
            aposteriori_bound(point.delta, spec.smoothness, spec.order_b, spec.xi,
                              spec.sigma, c_stability, model.psi_sup(), lambda1);
      }
      point.slope_partial =
          fit_errors.empty()
              ? nan
              : std::log(point.error_mean / fit_errors.back()) /
                    std::log(point.delta / fit_deltas.back());
      fit_deltas.push_back(point.delta);
      fit_errors.push_back(point.error_mean);
    } else {
      point.bound = nan;
      point.slope_partial = nan;
    }
    report.points.push_back(point);
  }

  if (fit_deltas.size() < 4)
    throw std::runtime_error("degenerate rate fit: fewer than 4 usable grid points");
  report.points_used = static_cast<int>(fit_deltas.size());
  report.fitted_slope =
      fit_loglog_slope(fit_deltas, fit_errors, &report.fit_residual);

  bool bound_ok = true;
  if (spec.rule == ChoiceRule::apriori) {
    for (const auto& point : report.points) {
      if (!point.skipped && point.error_max > point.bound * (1.0 + 1e-9))
        bound_ok = false;
    }
  }
  const bool slope_ok =
      report.fitted_slope >= report.theoretical_exponent - 0.1;
  report.pass = slope_ok && bound_ok;
  report.verdict_notes =
      std::string(slope_ok ? "slope ok" : "slope below theory-0.1") +
      (spec.rule == ChoiceRule::apriori
           ? (bound_ok ? "; per-delta bound ok" : "; per-delta bound violated")
           : "");
  report.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

OptimalityReport optimality_check(const ExperimentSpec& spec, int directions) {
  spec.validate();
  if (spec.rule != ChoiceRule::apriori)
    throw std::invalid_argument("optimality check covers the apriori branch");
  const double p = spec.smoothness.exponent;
  const double b = spec.order_b;
  const double rho = spec.smoothness.radius;
  if (!(p > 0.0 && p < b))
    throw std::invalid_argument("optimality check needs 0 < p < order");

  const ForwardModel model(spec.domain, *spec.profile);
  const double c_stability = model.stability_constant();
  const double psi_sup = model.psi_sup();

  OptimalityReport report;
  report.r2 = std::pow(psi_sup, -p / 2.0) * rho;

  ModulusQuery query;
  query.mu.assign(model.mu().begin(), model.mu().end());
  query.p = p;
  query.r = report.r2;

  // embedding: elements of M_{r2,p} drawn at the boundary must land in the
  // smoothness ball
  report.embedding_ok = true;
  for (int k = 0; k < 32; ++k) {
    auto tilde = unit_direction(spec.domain->modes(), mix_seed(spec.seed, 7717, k));
    std::vector<double> g(tilde.size());
    for (std::size_t i = 0; i < g.size(); ++i)
      g[i] = std::pow(std::abs(query.mu[i]), p / 2.0) * report.r2 * tilde[i];
    SpectralCoefficients gf(spec.domain, std::move(g), FieldRole::source);
    if (!in_source_set(gf, spec.smoothness)) report.embedding_ok = false;
  }

  const double c_apri1 = (p / b) * std::pow((b - p) / p, (b - p) / b);
  const double c1 = c_apri1 + 1.0 / c_stability;

  bool ratios_ok = true;
  for (std::size_t i = 0; i < spec.deltas.size(); ++i) {
    const double delta = spec.deltas[i];
    query.delta = delta;

    double omega_lower, omega_upper;
    if (query.spectrum_member()) {
      omega_lower = omega_upper = modulus_closed_form(query);
    } else {
      const auto bounds = modulus_bounds(query);
      omega_lower = bounds.lower;
      omega_upper = bounds.upper;
    }

    RegularizerConfig cfg;
    cfg.order = b;
    cfg.rule = ChoiceRule::apriori;
    cfg.alpha = apriori_alpha(delta, spec.smoothness, b);
    cfg.delta = delta;
    cfg.rho = rho;
    cfg.p = p;

    double worst = 0.0;
    auto consider = [&](const SpectralCoefficients& f_true,
                        const SpectralCoefficients& h_delta) {
      const auto rec = qrm_invert(model, h_delta, cfg);
      worst = std::max(worst, distance(f_true, rec.coefficients));
    };

    // extremal vertex of the modulus program: data indistinguishable from 0
    const auto vertex = modulus_extremal_vertex(query, delta);
    std::vector<double> gstar(spec.domain->modes(), 0.0);
    for (int s = 0; s < 2; ++s) {
      if (vertex.support[s] >= 0)
        gstar[vertex.support[s]] = std::sqrt(vertex.squared_coeff[s]);
    }
    SpectralCoefficients g(spec.domain, std::move(gstar), FieldRole::source);
    if (!in_source_set(g, spec.smoothness)) report.embedding_ok = false;
    consider(g, SpectralCoefficients::zero(spec.domain, FieldRole::observation));
    {
      const auto hg = model.apply_forward(g);
      const double hn = hg.l2_norm();
      if (hn > 0.0) consider(g, hg + (delta / hn) * hg);
    }
    for (int k = 0; k < directions; ++k) {
      const auto f_rand = sample_source(spec.domain, spec.smoothness, 1.0,
                                        mix_seed(spec.seed, i, 1000 + k));
      const auto h_rand = add_noise(model.apply_forward(f_rand), delta,
                                    mix_seed(spec.seed, i, 2000 + k));
      consider(f_rand, h_rand);
    }

    OptimalityPoint point;
    point.delta = delta;
    point.worst_error = worst;
    point.omega_lower = omega_lower;
    point.omega_upper = omega_upper;
    point.ratio = worst / omega_lower;
    point.ratio_ceiling = c1 * std::pow(rho, 2.0 / (p + 2.0)) *
                          std::pow(delta, p / (p + 2.0)) / omega_lower;
    if (!(point.ratio >= 0.5 * (1.0 - 1e-9)) ||
        !(point.ratio <= point.ratio_ceiling * (1.0 + 1e-9)))
      ratios_ok = false;
    report.points.push_back(point);
  }

  report.ratio_min = std::numeric_limits<double>::infinity();
  report.ratio_max = 0.0;
  for (const auto& point : report.points) {
    report.ratio_min = std::min(report.ratio_min, point.ratio);
    report.ratio_max = std::max(report.ratio_max, point.ratio);
  }
  report.pass = ratios_ok && report.embedding_ok;
  return report;
}

WeylReport weyl_ratio_check(const SpectralDomain& domain) {
  const std::size_t d = domain.dimension();
  if (d > 2) throw std::invalid_argument("Weyl band check covers d = 1 and 2");
  const auto& lambda = domain.eigenvalues();
  WeylReport report;
  report.e1 = std::numeric_limits<double>::infinity();
  report.e2 = 0.0;
  for (std::size_t n = 1; n <= lambda.size(); ++n) {
    const double ratio =
        lambda[n - 1] / std::pow(static_cast<double>(n), 2.0 / static_cast<double>(d));
    report.e1 = std::min(report.e1, ratio);
    report.e2 = std::max(report.e2, ratio);
  }
  report.min_consecutive_ratio = std::numeric_limits<double>::infinity();
  report.max_consecutive_ratio = 0.0;
  for (std::size_t n = 0; n + 1 < lambda.size(); ++n) {
    const double ratio = lambda[n] / lambda[n + 1];
    report.min_consecutive_ratio = std::min(report.min_consecutive_ratio, ratio);
    report.max_consecutive_ratio = std::max(report.max_consecutive_ratio, ratio);
  }
  const double floor =
      report.e1 / report.e2 * std::pow(0.5, 2.0 / static_cast<double>(d));
  report.pass = report.e1 > 0.0 && std::isfinite(report.e2) &&
                report.min_consecutive_ratio >= floor * (1.0 - 1e-12) &&
                report.max_consecutive_ratio <= 1.0 + 1e-12;
  return report;
}

}  // namespace biqrm
