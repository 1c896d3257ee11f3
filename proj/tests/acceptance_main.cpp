// Acceptance suite: every criterion prints one [PASS]/[FAIL] line and the
// binary exits nonzero if any fail. Checks are always on; nothing is
// compiled out in Release.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "biqrm/config.hpp"
#include "biqrm/harness.hpp"
#include "biqrm/io.hpp"
#include "biqrm/modulus.hpp"

using namespace biqrm;

namespace {

constexpr double kPi = std::numbers::pi;
const double kPi2 = kPi * kPi;

int g_failures = 0;

struct Criterion {
  explicit Criterion(std::string name) : name_(std::move(name)) {}

  void expect(bool ok, const std::string& detail) {
    if (!ok) {
      ok_ = false;
      if (!detail.empty()) notes_.push_back(detail);
    }
  }

  void finish() const {
    std::cout << (ok_ ? "[PASS] " : "[FAIL] ") << name_;
    for (const auto& note : notes_) std::cout << " | " << note;
    std::cout << "\n";
    if (!ok_) ++g_failures;
  }

  std::string name_;
  bool ok_ = true;
  std::vector<std::string> notes_;
};

void run(const std::string& name, const std::function<void(Criterion&)>& body) {
  Criterion criterion(name);
  try {
    body(criterion);
  } catch (const std::exception& e) {
    criterion.expect(false, std::string("exception: ") + e.what());
  }
  criterion.finish();
}

TemporalProfile piecewise_cos_profile() {
  const double amp = 1.0 / (48.0 * std::sqrt(2.0));
  PiecewiseTrigShape shape;
  shape.segments.push_back({0.0, kPi / 2.0, amp, 1.0, 0.0, false});
  shape.segments.push_back({kPi / 2.0, kPi, 1.0, 1.0, 0.0, false});
  return TemporalProfile(kPi, std::move(shape), DerivativeBound{1.0, true});
}

ExperimentSpec rate_spec(double p, double b, double rho, ChoiceRule rule, double xi,
                         double sigma, const std::string& label) {
  ExperimentSpec spec;
  spec.domain = SpectralDomain::make({kPi}, 256);
  spec.profile = TemporalProfile(1.0, ConstantShape{1.0});
  spec.smoothness = SmoothnessClass(p, rho);
  spec.order_b = b;
  spec.rule = rule;
  spec.xi = xi;
  spec.sigma = sigma;
  spec.deltas = {1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7};
  spec.seed = 20250808;
  spec.trials = 10;
  spec.label = label;
  return spec;
}

std::string fmt(double x) { return format_double(x); }

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// ---------------------------------------------------------------------------

void criterion_mu_bounds(Criterion& c) {
  const auto start = std::chrono::steady_clock::now();
  struct Case {
    TemporalProfile psi;
    const char* tag;
  };
  const std::vector<Case> cases = {
      {TemporalProfile(1.0, ConstantShape{1.0}), "constant"},
      {piecewise_cos_profile(), "piecewise-cos"},
  };
  const auto domain = SpectralDomain::make({1.0}, 256);
  for (const auto& item : cases) {
    const auto report = check_assumption(item.psi, domain->eigenvalue(1));
    c.expect(report.satisfied != AdmissibilityCase::fails,
             std::string(item.tag) + ": certificate failed");
    if (report.satisfied == AdmissibilityCase::fails) continue;
    const double lower = lower_bound_constant(report, domain->eigenvalue(1));
    const double sup = item.psi.sup_norm();
    const auto seq = mu_sequence(item.psi, *domain);
    double worst_lower = 1e300, worst_upper = -1e300;
    for (std::size_t n = 1; n <= 256; ++n) {
      const double lambda = domain->eigenvalue(n);
      const double weighted = lambda * lambda * std::abs(seq.values[n - 1]);
      worst_lower = std::min(worst_lower, weighted - lower);
      worst_upper = std::max(worst_upper, weighted - sup);
    }
    c.expect(worst_lower >= -1e-12 * lower,
             std::string(item.tag) + ": lower bound violated by " + fmt(-worst_lower));
    c.expect(worst_upper <= 1e-12 * sup,
             std::string(item.tag) + ": upper bound violated by " + fmt(worst_upper));
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  c.expect(seconds < 5.0, "runtime " + fmt(seconds) + "s >= 5s");
}

void criterion_closed_form_vs_quadrature(Criterion& c) {
  const auto domain = SpectralDomain::make({1.0}, 256);
  const TemporalProfile closed_path(1.0, ConstantShape{1.0});
  const TemporalProfile quadrature_path(1.0, PolynomialShape{{1.0}});
  double worst = 0.0;
  for (std::size_t n = 1; n <= 256; ++n) {
    const double lambda = domain->eigenvalue(n);
    const double closed = mu_coefficient(closed_path, lambda, 1.0);
    const double quad = mu_coefficient(quadrature_path, lambda, 1.0);
    worst = std::max(worst, std::abs(closed - quad) / std::abs(closed));
  }
  c.expect(worst <= 1e-12, "max relative difference " + fmt(worst));
}

void criterion_apriori_rates(Criterion& c) {
  const auto start = std::chrono::steady_clock::now();
  struct Case {
    double p, b, expected;
  };
  const std::vector<Case> cases = {
      {1.0, 2.0, 1.0 / 3.0}, {2.0, 4.0, 0.5}, {6.0, 4.0, 2.0 / 3.0}};
  for (const auto& item : cases) {
    const auto spec = rate_spec(item.p, item.b, 1.0, ChoiceRule::apriori, 0.0, 0.0,
                                "acc_apriori");
    const auto report = run_rate_experiment(spec);
    const std::string tag =
        "(p=" + fmt(item.p) + ",b=" + fmt(item.b) + ")";
    c.expect(std::abs(report.fitted_slope - item.expected) <= 0.1,
             tag + " slope " + fmt(report.fitted_slope) + " vs " + fmt(item.expected));
    for (const auto& point : report.points) {
      c.expect(!point.skipped, tag + " skipped point at delta " + fmt(point.delta));
      if (!point.skipped) {
        c.expect(point.error_max <= point.bound * (1.0 + 1e-9),
                 tag + " error " + fmt(point.error_max) + " above bound " +
                     fmt(point.bound) + " at delta " + fmt(point.delta));
      }
    }
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  c.expect(seconds < 60.0, "runtime " + fmt(seconds) + "s >= 60s");
}

void criterion_aposteriori_rates(Criterion& c) {
  {
    const auto spec =
        rate_spec(1.0, 4.0, 1.0, ChoiceRule::aposteriori, 1.5, 0.0, "acc_apost_b4");
    const auto report = run_rate_experiment(spec);
    c.expect(report.fitted_slope >= 1.0 / 3.0 - 0.1,
             "(b=4,p=1) slope " + fmt(report.fitted_slope));
    for (const auto& point : report.points) {
      c.expect(!point.skipped && point.morozov_residual_rel <= 1e-10,
               "(b=4,p=1) residual " + fmt(point.morozov_residual_rel) + " at delta " +
                   fmt(point.delta));
    }
  }
  {
    const auto spec =
        rate_spec(2.0, 2.0, 2.0, ChoiceRule::aposteriori, 1.5, 0.5, "acc_apost_b2");
    const auto report = run_rate_experiment(spec);
    const double expected = std::min(2.0 * 0.5 / 4.0, 1.0 - 0.5);
    c.expect(report.fitted_slope >= expected - 0.1,
             "(b=2,p=2,sigma=0.5) slope " + fmt(report.fitted_slope));
    for (const auto& point : report.points) {
      c.expect(!point.skipped && point.morozov_residual_rel <= 1e-10,
               "(b=2) residual " + fmt(point.morozov_residual_rel) + " at delta " +
                   fmt(point.delta));
    }
  }
}

void criterion_conditional_stability(Criterion& c) {
  const auto domain = SpectralDomain::make({1.0}, 256);
  const ForwardModel model(domain, TemporalProfile(1.0, ConstantShape{1.0}));
  const double c_stability = model.stability_constant();
  const SmoothnessClass cls(1.5, 3.0);
  int violations = 0;
  for (std::uint64_t draw = 0; draw < 100; ++draw) {
    const double fill = 0.05 + 0.0095 * static_cast<double>(draw);
    const auto f = sample_source(domain, cls, fill, 0xACC5 + draw);
    const auto check =
        conditional_stability_check(f, model.apply_forward(f), cls, c_stability);
    if (!check.holds) ++violations;
  }
  c.expect(violations == 0, std::to_string(violations) + " violations out of 100");
}

void criterion_zeta_properties(Criterion& c) {
  const auto domain = SpectralDomain::make({1.0}, 256);
  const ForwardModel model(domain, TemporalProfile(1.0, ConstantShape{1.0}));
  // scaled so ||h|| dominates the 1e-3 noise: the alpha-dependence at the
  // top of the grid lives in the low modes and must stay resolvable
  const auto f = make_decay_source(domain, SmoothnessClass(2.0, 100.0), 0.5);
  const auto h = model.apply_forward(f);  // exact data: delta = 0
  const auto h_noisy = add_noise(h, 1e-3, 777);

  for (const auto* data : {&h, &h_noisy}) {
    double previous = -1.0;
    bool increasing = true;
    for (int i = 0; i < 50; ++i) {
      const double alpha = std::pow(10.0, -12.0 + 24.0 * i / 49.0);
      const double zeta = discrepancy(*data, alpha, 2.0);
      if (!(zeta > previous)) increasing = false;
      previous = zeta;
    }
    c.expect(increasing, data == &h ? "not strictly increasing (exact data)"
                                    : "not strictly increasing (noisy data)");
  }

  const double at_zero = discrepancy(h, 1e-12, 2.0);
  const double at_infinity = discrepancy(h, 1e12, 2.0);
  c.expect(at_zero <= 1e-8, "zeta(1e-12) = " + fmt(at_zero));
  c.expect(std::abs(at_infinity - h.l2_norm()) <= 1e-8,
           "zeta(1e12) off ||h|| by " + fmt(std::abs(at_infinity - h.l2_norm())));
}

void criterion_modulus_optimality(Criterion& c) {
  const auto domain = SpectralDomain::make({1.0}, 8);
  const ForwardModel model(domain, TemporalProfile(1.0, ConstantShape{1.0}));
  ModulusQuery query;
  query.mu.assign(model.mu().begin(), model.mu().end());
  query.p = 1.0;
  query.r = 1.0;

  // spectrum points: paired oracle at 2*delta, halved, against the closed form
  double worst_member = 0.0;
  for (std::size_t k = 1; k <= 8; ++k) {
    query.delta = std::pow(std::abs(query.mu[k - 1]), (query.p + 2.0) / 2.0);
    const double closed = modulus_closed_form(query);
    ModulusQuery paired = query;
    paired.delta = 2.0 * query.delta;
    worst_member = std::max(
        worst_member, std::abs(0.5 * modulus_oracle(paired) - closed) / closed);
  }
  c.expect(worst_member <= 1e-9,
           "closed form vs oracle rel diff " + fmt(worst_member));

  // twenty off-spectrum levels bracketed by the two-sided bounds
  const double lo = std::pow(std::abs(query.mu[7]), 1.5) * 1.05;
  const double hi = std::pow(std::abs(query.mu[0]), 1.5) * 0.95;
  int outside = 0;
  int checked = 0;
  for (int i = 0; i < 20; ++i) {
    query.delta = lo * std::pow(hi / lo, (i + 0.5) / 20.0);
    if (query.spectrum_member()) continue;
    const auto bounds = modulus_bounds(query);
    const double omega = modulus_oracle_single(query);
    if (omega < bounds.lower * (1.0 - 1e-9) || omega > bounds.upper * (1.0 + 1e-9))
      ++outside;
    ++checked;
  }
  c.expect(outside == 0, std::to_string(outside) + " oracle values left the bracket");
  c.expect(checked == 20, "only " + std::to_string(checked) + " off-spectrum levels");

  // QRM worst error against the modulus lower bound over the delta grid
  ExperimentSpec spec;
  spec.domain = domain;
  spec.profile = TemporalProfile(1.0, ConstantShape{1.0});
  spec.smoothness = SmoothnessClass(1.0, 1.0);
  spec.order_b = 2.0;
  spec.rule = ChoiceRule::apriori;
  spec.deltas = {1e-4, 1e-5, 1e-6, 1e-7, 1e-8};
  spec.seed = 2025;
  spec.trials = 1;
  spec.label = "acc_optimality";
  const auto report = optimality_check(spec, 64);
  c.expect(report.embedding_ok, "embedded sources left the smoothness ball");
  c.expect(report.pass, "ratio band [" + fmt(report.ratio_min) + ", " +
                            fmt(report.ratio_max) + "] violated a ceiling");
  c.expect(report.ratio_min >= 0.5, "ratio " + fmt(report.ratio_min) + " < 1/2");
  std::cout << "       modulus band: ratios in [" << report.ratio_min << ", "
            << report.ratio_max << "]; " << report.convention << "\n";
}

void criterion_illposedness(Criterion& c) {
  const auto domain = SpectralDomain::make({1.0}, 64);
  const ForwardModel model(domain, TemporalProfile(1.0, ConstantShape{1.0}));
  const auto rows = illposedness_demo(model, 64);
  for (const auto& row : rows) {
    c.expect(row.ratio >= 1.0 - 1e-12,
             "k=" + std::to_string(row.k) + " ratio " + fmt(row.ratio));
    const double expected_obs = 1.0 / model.domain().eigenvalue(row.k);
    c.expect(row.observation_norm == expected_obs,
             "k=" + std::to_string(row.k) + " observation norm mismatch");
  }
  c.expect(rows.back().observation_norm < rows.front().observation_norm / 1000.0,
           "observation norms do not vanish");
  c.expect(rows.back().source_norm > rows.front().source_norm * 1000.0,
           "source norms do not blow up");
}

void criterion_determinism(Criterion& c) {
  const std::string configs = BIQRM_CONFIG_DIR;
  const auto base = std::filesystem::temp_directory_path() / "biqrm_acceptance";
  std::filesystem::remove_all(base);
  const auto out1 = base / "run1";
  const auto out2 = base / "run2";
  for (const auto& out : {out1, out2}) {
    const std::string cmd = std::string(BIQRM_CLI_PATH) + " rate " + configs +
                            "/rate_apriori_p1_b2.json --out " + out.string() +
                            " >/dev/null 2>&1";
    c.expect(WEXITSTATUS(std::system(cmd.c_str())) == 0, "rate run failed");
  }
  const auto csv1 = slurp(out1 / "apriori_p1_b2_rate.csv");
  const auto csv2 = slurp(out2 / "apriori_p1_b2_rate.csv");
  c.expect(!csv1.empty() && csv1 == csv2, "rate CSVs differ between runs");
  const auto dat1 = slurp(out1 / "apriori_p1_b2_loglog.dat");
  const auto dat2 = slurp(out2 / "apriori_p1_b2_loglog.dat");
  c.expect(!dat1.empty() && dat1 == dat2, "plot files differ between runs");
}

}  // namespace

int main() {
  run("criterion 1: multiplier bounds C <= lambda_n^2 |mu_n| <= ||psi||_inf (N=256)",
      criterion_mu_bounds);
  run("criterion 2: closed form vs quadrature to 1e-12 (n <= 256)",
      criterion_closed_form_vs_quadrature);
  run("criterion 3: apriori rates and per-delta bounds", criterion_apriori_rates);
  run("criterion 4: aposteriori rates and discrepancy residuals",
      criterion_aposteriori_rates);
  run("criterion 5: conditional stability on 100 random sources",
      criterion_conditional_stability);
  run("criterion 6: discrepancy function limits and strict growth",
      criterion_zeta_properties);
  run("criterion 7: modulus closed form, brackets, and QRM optimality band",
      criterion_modulus_optimality);
  run("criterion 8: ill-posedness amplification table (k <= 64)",
      criterion_illposedness);
  run("criterion 9: byte-identical outputs for identical config and seed",
      criterion_determinism);

  if (g_failures) {
    std::cout << g_failures << " criterion(s) failed\n";
    return 1;
  }
  std::cout << "all acceptance criteria passed\n";
  return 0;
}
