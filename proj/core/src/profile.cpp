#include "biqrm/profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "biqrm/parallel.hpp"
#include "biqrm/quadrature.hpp"

namespace biqrm {

namespace {

// 1 - (1 + x) exp(-x), stable near 0 via the series
// sum_{k>=2} (-1)^k (k-1)/k! x^k.
double one_minus_one_plus_x_exp(double x) {
  if (x >= 0.5) return 1.0 - (1.0 + x) * std::exp(-x);
  double term = 0.5 * x * x;  // k = 2
  double sum = term;
  double fact = 2.0;
  double power = x * x;
  for (int k = 3; k < 40; ++k) {
    fact *= k;
    power *= -x;
    term = (k - 1) / fact * power;
    sum += term;
    if (std::abs(term) <= std::numeric_limits<double>::epsilon() * std::abs(sum)) break;
  }
  return sum;
}

double horner(const std::vector<double>& c, double t) {
  double v = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * t + *it;
  return v;
}

double trig_value(const TrigSegment& s, double t) {
  const double arg = s.frequency * t + s.phase;
  return s.amplitude * (s.sine ? std::sin(arg) : std::cos(arg));
}

double trig_derivative(const TrigSegment& s, double t) {
  const double arg = s.frequency * t + s.phase;
  return s.amplitude * s.frequency * (s.sine ? std::cos(arg) : -std::sin(arg));
}

}  // namespace

TemporalProfile::TemporalProfile(double horizon, Shape shape,
                                 std::optional<DerivativeBound> derivative_bound)
    : horizon_(horizon), shape_(std::move(shape)),
      derivative_bound_(derivative_bound) {
  if (!(horizon_ > 0.0)) throw std::invalid_argument("horizon must be positive");
  if (derivative_bound_ && !(derivative_bound_->value >= 0.0))
    throw std::invalid_argument("derivative bound must be nonnegative");

  const double knot_tol = 1e-12;
  if (const auto* pw = std::get_if<PiecewiseTrigShape>(&shape_)) {
    if (pw->segments.empty())
      throw std::invalid_argument("piecewise shape needs at least one segment");
    if (std::abs(pw->segments.front().from) > knot_tol * std::max(1.0, horizon_))
      throw std::invalid_argument("first segment must start at 0");
    if (std::abs(pw->segments.back().to - horizon_) > knot_tol * std::max(1.0, horizon_))
      throw std::invalid_argument("last segment must end at the horizon");
    for (std::size_t i = 0; i < pw->segments.size(); ++i) {
      const auto& s = pw->segments[i];
      if (!(s.to > s.from)) throw std::invalid_argument("segment interval degenerate");
      if (i + 1 < pw->segments.size()) {
        const auto& nxt = pw->segments[i + 1];
        if (std::abs(nxt.from - s.to) > knot_tol * std::max(1.0, horizon_))
          throw std::invalid_argument("segments must tile the horizon");
        const double left = trig_value(s, s.to);
        const double right = trig_value(nxt, s.to);
        const double scale = std::max({std::abs(left), std::abs(right), 1.0});
        if (std::abs(left - right) > knot_tol * scale)
          throw std::invalid_argument("piecewise values must match at knots");
      }
    }
  } else if (const auto* tab = std::get_if<TabulatedShape>(&shape_)) {
    if (tab->times.size() != tab->values.size() || tab->times.size() < 2)
      throw std::invalid_argument("tabulated shape needs matching times/values, >= 2 samples");
    if (std::abs(tab->times.front()) > knot_tol * std::max(1.0, horizon_))
      throw std::invalid_argument("tabulated times must start at 0");
    if (std::abs(tab->times.back() - horizon_) > knot_tol * std::max(1.0, horizon_))
      throw std::invalid_argument("tabulated times must end at the horizon");
    for (std::size_t i = 0; i + 1 < tab->times.size(); ++i) {
      if (!(tab->times[i + 1] > tab->times[i]))
        throw std::invalid_argument("tabulated times must increase strictly");
    }
  }
  sup_norm_ = compute_sup_norm();
}

double TemporalProfile::operator()(double t) const {
  t = std::clamp(t, 0.0, horizon_);
  if (const auto* c = std::get_if<ConstantShape>(&shape_)) return c->value;
  if (const auto* p = std::get_if<PolynomialShape>(&shape_)) return horner(p->coefficients, t);
  if (const auto* pw = std::get_if<PiecewiseTrigShape>(&shape_)) {
    const auto& segs = pw->segments;
    auto it = std::upper_bound(segs.begin(), segs.end(), t,
                               [](double x, const TrigSegment& s) { return x < s.to; });
    if (it == segs.end()) --it;
    return trig_value(*it, t);
  }
  const auto& tab = std::get<TabulatedShape>(shape_);
  auto it = std::upper_bound(tab.times.begin(), tab.times.end(), t);
  std::size_t hi = std::min<std::size_t>(tab.times.size() - 1,
                                         static_cast<std::size_t>(it - tab.times.begin()));
  if (hi == 0) hi = 1;
  const std::size_t lo = hi - 1;
  const double w = (t - tab.times[lo]) / (tab.times[hi] - tab.times[lo]);
  return tab.values[lo] + w * (tab.values[hi] - tab.values[lo]);
}

double TemporalProfile::derivative(double t) const {
  t = std::clamp(t, 0.0, horizon_);
  if (std::holds_alternative<ConstantShape>(shape_)) return 0.0;
  if (const auto* p = std::get_if<PolynomialShape>(&shape_)) {
    std::vector<double> d;
    for (std::size_t k = 1; k < p->coefficients.size(); ++k)
      d.push_back(static_cast<double>(k) * p->coefficients[k]);
    return horner(d, t);
  }
  if (const auto* pw = std::get_if<PiecewiseTrigShape>(&shape_)) {
    const auto& segs = pw->segments;
    auto it = std::upper_bound(segs.begin(), segs.end(), t,
                               [](double x, const TrigSegment& s) { return x < s.to; });
    if (it == segs.end()) --it;
    return trig_derivative(*it, t);
  }
  const auto& tab = std::get<TabulatedShape>(shape_);
  auto it = std::upper_bound(tab.times.begin(), tab.times.end(), t);
  std::size_t hi = std::min<std::size_t>(tab.times.size() - 1,
                                         static_cast<std::size_t>(it - tab.times.begin()));
  if (hi == 0) hi = 1;
  const std::size_t lo = hi - 1;
  return (tab.values[hi] - tab.values[lo]) / (tab.times[hi] - tab.times[lo]);
}

std::vector<double> TemporalProfile::knots() const {
  std::vector<double> k;
  if (const auto* pw = std::get_if<PiecewiseTrigShape>(&shape_)) {
    for (std::size_t i = 0; i + 1 < pw->segments.size(); ++i)
      k.push_back(pw->segments[i].to);
  } else if (const auto* tab = std::get_if<TabulatedShape>(&shape_)) {
    for (std::size_t i = 1; i + 1 < tab->times.size(); ++i) k.push_back(tab->times[i]);
  }
  return k;
}

double TemporalProfile::compute_sup_norm() const {
  if (const auto* c = std::get_if<ConstantShape>(&shape_)) return std::abs(c->value);
  if (const auto* tab = std::get_if<TabulatedShape>(&shape_)) {
    double m = 0.0;
    for (double v : tab->values) m = std::max(m, std::abs(v));
    return m;  // piecewise-linear attains its sup at a knot
  }
  if (const auto* pw = std::get_if<PiecewiseTrigShape>(&shape_)) {
    double m = 0.0;
    for (const auto& s : pw->segments) {
      m = std::max({m, std::abs(trig_value(s, s.from)), std::abs(trig_value(s, s.to))});
      // stationary points: frequency*t + phase = k*pi (cos) or k*pi + pi/2 (sin)
      if (s.frequency != 0.0) {
        const double pi = std::numbers::pi;
        const double offset = s.sine ? 0.5 * pi : 0.0;
        const double a = s.frequency * s.from + s.phase - offset;
        const double b = s.frequency * s.to + s.phase - offset;
        const double lo = std::min(a, b) / pi;
        const double hi = std::max(a, b) / pi;
        if (std::floor(hi) >= std::ceil(lo)) m = std::max(m, std::abs(s.amplitude));
      } else {
        m = std::max(m, std::abs(trig_value(s, s.from)));
      }
    }
    return m;
  }
  // polynomial: dense grid with parabolic refinement of interior maxima
  const auto& self = *this;
  const int n = 200000;
  double best = std::max(std::abs(self(0.0)), std::abs(self(horizon_)));
  double prev = std::abs(self(0.0));
  double curr = std::abs(self(horizon_ / n));
  for (int i = 1; i < n; ++i) {
    const double next = std::abs(self(horizon_ * (i + 1) / n));
    if (curr >= prev && curr >= next) {
      // vertex of the parabola through the three samples
      const double denom = prev - 2.0 * curr + next;
      double t_star = horizon_ * i / n;
      if (denom < 0.0) t_star += 0.5 * (prev - next) / denom * (horizon_ / n);
      best = std::max(best, std::abs(self(t_star)));
    }
    best = std::max(best, curr);
    prev = curr;
    curr = next;
  }
  return best;
}

// ---------------------------------------------------------------------------
// mu(t) = int_0^t exp(-lambda(t-s)) (t-s) psi(s) ds
// ---------------------------------------------------------------------------

double mu_coefficient(const TemporalProfile& psi, double lambda, double t) {
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  if (t < 0.0 || t > psi.horizon() * (1.0 + 1e-12))
    throw std::invalid_argument("time outside [0, horizon]");
  if (t == 0.0) return 0.0;

  if (const auto* c = std::get_if<ConstantShape>(&psi.shape())) {
    return c->value * one_minus_one_plus_x_exp(lambda * t) / (lambda * lambda);
  }

  // integrate in u = t - s; the mass sits near u = 0 for large lambda, so
  // panel edges grow dyadically away from it
  auto integrand = [&psi, lambda, t](double u) {
    return std::exp(-lambda * u) * u * psi(t - u);
  };
  std::vector<double> edges;
  double w = std::min(t, 1.0 / lambda);
  while (w < t) {
    edges.push_back(w);
    w *= 2.0;
  }
  for (double knot : psi.knots()) {
    const double u = t - knot;
    if (u > 0.0 && u < t) edges.push_back(u);
  }
  const double envelope =
      psi.sup_norm() * one_minus_one_plus_x_exp(lambda * t) / (lambda * lambda);
  const auto result =
      integrate_adaptive(integrand, 0.0, t, edges, 5e-13, 1e-15 * envelope);
  return result.value;
}

MuSequence mu_sequence(const TemporalProfile& psi, const SpectralDomain& domain) {
  MuSequence seq;
  seq.values.assign(domain.modes(), 0.0);
  const double tau = psi.horizon();
  parallel_for(domain.modes(), [&](std::size_t i) {
    seq.values[i] = mu_coefficient(psi, domain.eigenvalues()[i], tau);
  });
  seq.max_abs = 0.0;
  for (double m : seq.values) seq.max_abs = std::max(seq.max_abs, std::abs(m));
  return seq;
}

// ---------------------------------------------------------------------------
// Assumption certificate
// ---------------------------------------------------------------------------

namespace {

struct DenseGrid {
  std::vector<double> t;
  std::vector<double> psi;
  std::vector<double> suffix_min_abs;  // min |psi| over [t_i, horizon]
};

DenseGrid build_grid(const TemporalProfile& psi, int intervals) {
  DenseGrid g;
  const double tau = psi.horizon();
  g.t.reserve(intervals + 16);
  for (int i = 0; i <= intervals; ++i)
    g.t.push_back(tau * static_cast<double>(i) / intervals);
  for (double k : psi.knots()) g.t.push_back(k);
  std::sort(g.t.begin(), g.t.end());
  g.t.erase(std::unique(g.t.begin(), g.t.end()), g.t.end());
  g.psi.resize(g.t.size());
  for (std::size_t i = 0; i < g.t.size(); ++i) g.psi[i] = psi(g.t[i]);
  g.suffix_min_abs.resize(g.t.size());
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = g.t.size(); i-- > 0;) {
    m = std::min(m, std::abs(g.psi[i]));
    g.suffix_min_abs[i] = m;
  }
  return g;
}

// smallest tau0 with |psi| >= kappa on [tau0, horizon]; grid bracket plus
// bisection on |psi(t)| - kappa
double tau0_for_kappa(const TemporalProfile& psi, const DenseGrid& g, double kappa) {
  auto it = std::lower_bound(g.suffix_min_abs.begin(), g.suffix_min_abs.end(), kappa);
  if (it == g.suffix_min_abs.end()) return psi.horizon();
  std::size_t idx = static_cast<std::size_t>(it - g.suffix_min_abs.begin());
  if (idx == 0) return 0.0;
  double lo = g.t[idx - 1];  // |psi| < kappa somewhere in [lo, hi]
  double hi = g.t[idx];
  for (int iter = 0; iter < 80 && hi - lo > 1e-13 * std::max(1.0, psi.horizon()); ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (std::abs(psi(mid)) >= kappa)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

double refine_zero(const TemporalProfile& psi, double lo, double hi) {
  double flo = psi(lo);
  for (int iter = 0; iter < 100 && hi - lo > 1e-13 * std::max(1.0, psi.horizon()); ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double fm = psi(mid);
    if ((flo <= 0.0 && fm <= 0.0) || (flo >= 0.0 && fm >= 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double integral_abs(const TemporalProfile& psi, double a, double b) {
  if (b <= a) return 0.0;
  auto f = [&psi](double t) { return std::abs(psi(t)); };
  const auto res = integrate_adaptive(f, a, b, psi.knots(), 1e-12,
                                      1e-15 * psi.sup_norm() * (b - a));
  return res.value;
}

}  // namespace

AdmissibilityReport check_assumption(const TemporalProfile& psi, double lambda1_hint) {
  AdmissibilityReport rep;
  const double tau = psi.horizon();
  rep.horizon = tau;
  rep.psi_at_0 = psi(0.0);
  rep.psi_at_horizon = psi(tau);
  rep.sup_norm = psi.sup_norm();
  rep.lambda1_hint = lambda1_hint;

  const DenseGrid grid = build_grid(psi, 10000);

  if (rep.sup_norm == 0.0) {
    rep.failure_reason = "profile vanishes identically";
    return rep;
  }

  double min_psi = grid.psi[0], max_psi = grid.psi[0];
  for (double v : grid.psi) {
    min_psi = std::min(min_psi, v);
    max_psi = std::max(max_psi, v);
  }
  const double sign_tol = 1e-12 * rep.sup_norm;
  const bool changes_sign = (min_psi < -sign_tol) && (max_psi > sign_tol);

  const double kappa_max = std::abs(rep.psi_at_horizon);
  if (kappa_max <= sign_tol) {
    rep.failure_reason = "psi vanishes at the horizon: no kappa1 certificate";
    return rep;
  }

  if (!changes_sign) {
    // maximize kappa1 * [1 - (1 + lambda e) exp(-lambda e)] over a kappa grid
    rep.satisfied = AdmissibilityCase::fixed_sign;
    const int kappa_steps = 512;
    double best_c = -1.0, best_kappa = 0.0, best_tau0 = 0.0;
    for (int j = kappa_steps; j >= 1; --j) {
      const double kappa = kappa_max * static_cast<double>(j) / kappa_steps;
      const double tau0 = tau0_for_kappa(psi, grid, kappa);
      if (tau0 >= tau) continue;
      const double c =
          kappa * one_minus_one_plus_x_exp(lambda1_hint * (tau - tau0));
      if (c > best_c) {
        best_c = c;
        best_kappa = kappa;
        best_tau0 = tau0;
      }
    }
    if (best_c <= 0.0) {
      rep.satisfied = AdmissibilityCase::fails;
      rep.failure_reason = "no positive kappa1 certificate on any tail interval";
      return rep;
    }
    rep.kappa1 = best_kappa;
    rep.tau0 = best_tau0;
    if (psi.derivative_bound()) rep.kappa2 = psi.derivative_bound()->value;
    rep.lower_bound_hint = lower_bound_constant(rep, lambda1_hint);
    return rep;
  }

  // --- sign-changing case ---
  if (!psi.derivative_bound()) {
    rep.failure_reason = "sign-changing profile requires a derivative bound";
    return rep;
  }
  rep.kappa2 = psi.derivative_bound()->value;
  // verify the claimed bound on the dense grid
  for (std::size_t i = 0; i < grid.t.size(); ++i) {
    if (std::abs(psi.derivative(grid.t[i])) > rep.kappa2 * (1.0 + 1e-9)) {
      rep.failure_reason = "claimed derivative bound violated on the check grid";
      return rep;
    }
  }

  // sign-change set I_sc = { t : psi(t) psi(tau) <= 0 }, grid runs with
  // bisected zero-crossing endpoints
  const double sgn = rep.psi_at_horizon > 0.0 ? 1.0 : -1.0;
  std::vector<Interval> runs;
  double max_abs_isc = 0.0;
  {
    bool inside = false;
    double run_start = 0.0;
    for (std::size_t i = 0; i < grid.t.size(); ++i) {
      const bool in = sgn * grid.psi[i] <= 0.0;
      if (in) max_abs_isc = std::max(max_abs_isc, std::abs(grid.psi[i]));
      if (in && !inside) {
        run_start = (i == 0) ? grid.t[0] : refine_zero(psi, grid.t[i - 1], grid.t[i]);
        inside = true;
      } else if (!in && inside) {
        runs.push_back({run_start, refine_zero(psi, grid.t[i - 1], grid.t[i])});
        inside = false;
      }
    }
    if (inside) runs.push_back({run_start, tau});
  }
  rep.sign_change_set = runs;
  rep.sign_change_max_abs = max_abs_isc;

  // tau1: last zero, from the last sign change of psi on the grid
  double tau1 = -1.0;
  for (std::size_t i = grid.t.size(); i-- > 1;) {
    if (grid.psi[i] == 0.0) {
      tau1 = grid.t[i];
      break;
    }
    if (grid.psi[i] * grid.psi[i - 1] < 0.0) {
      tau1 = refine_zero(psi, grid.t[i - 1], grid.t[i]);
      break;
    }
  }
  if (tau1 <= 0.0 || tau1 >= tau) {
    rep.failure_reason = "could not locate the last zero of psi";
    return rep;
  }
  rep.tau1 = tau1;

  // largest kappa1 whose magnitude bound M admits |psi| on I_sc
  auto feasible = [&](double kappa, double* tau0_out, double* m_out) {
    const double tau0 = tau0_for_kappa(psi, grid, kappa);
    if (tau0 >= tau || tau0 <= 0.0) return false;
    const double m = (tau - tau0) * (tau - tau0) * kappa / (4.0 * tau * tau0);
    if (tau0_out) *tau0_out = tau0;
    if (m_out) *m_out = m;
    return max_abs_isc <= m * (1.0 + 1e-12);
  };

  const int kappa_steps = 1024;
  int best_j = -1;
  double best_m_seen = 0.0;
  for (int j = kappa_steps; j >= 1; --j) {
    double m = 0.0;
    if (feasible(kappa_max * j / kappa_steps, nullptr, &m)) {
      best_j = j;
      break;
    }
    best_m_seen = std::max(best_m_seen, m);
  }
  if (best_j < 0) {
    rep.failure_reason =
        "sign-change magnitude bound violated: max |psi| on I_sc exceeds every "
        "available M";
    rep.sign_change_bound = best_m_seen;
    return rep;
  }
  double kappa_lo = kappa_max * best_j / kappa_steps;
  double kappa_hi = std::min(kappa_max, kappa_max * (best_j + 1.0) / kappa_steps);
  for (int iter = 0; iter < 200 && kappa_hi - kappa_lo > 1e-14 * kappa_max; ++iter) {
    const double mid = 0.5 * (kappa_lo + kappa_hi);
    if (feasible(mid, nullptr, nullptr))
      kappa_lo = mid;
    else
      kappa_hi = mid;
  }
  double tau0 = 0.0, m_bound = 0.0;
  feasible(kappa_lo, &tau0, &m_bound);
  rep.satisfied = AdmissibilityCase::sign_changing;
  rep.kappa1 = kappa_lo;
  rep.tau0 = tau0;
  rep.sign_change_bound = m_bound;
  rep.c_tilde = 2.0 * (std::abs(rep.psi_at_0) + 2.0 * tau * rep.kappa2) /
                (tau * std::abs(rep.psi_at_horizon));
  rep.integral_abs_tau1_tau0 = integral_abs(psi, rep.tau1, rep.tau0);
  rep.lower_bound_hint = lower_bound_constant(rep, lambda1_hint);
  return rep;
}

double lower_bound_constant(const AdmissibilityReport& report, double lambda1) {
  if (!(lambda1 > 0.0)) throw std::invalid_argument("lambda1 must be positive");
  if (report.satisfied == AdmissibilityCase::fails)
    throw CertificateError("profile failed the admissibility certificate: " +
                           report.failure_reason);
  const double tau = report.horizon;
  if (report.satisfied == AdmissibilityCase::fixed_sign) {
    const double c = report.kappa1 *
                     one_minus_one_plus_x_exp(lambda1 * (tau - report.tau0));
    if (!(c > 0.0)) throw CertificateError("nonpositive fixed-sign constant");
    return c;
  }
  // sign-changing: low modes via the integral term, high modes via c_tilde
  const double low = lambda1 * lambda1 *
                     std::exp(-report.c_tilde * (tau - report.tau1)) *
                     (tau - report.tau0) * report.integral_abs_tau1_tau0;
  const double high =
      std::abs(report.psi_at_horizon) -
      (std::abs(report.psi_at_0) + 2.0 * tau * report.kappa2) / (tau * report.c_tilde);
  const double c = std::min(low, high);
  if (!(c > 0.0))
    throw CertificateError("nonpositive sign-changing constant (c_tilde too small?)");
  return c;
}

}  // namespace biqrm
