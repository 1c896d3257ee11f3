#include <doctest.h>

#include <cmath>
#include <numbers>

#include "biqrm/profile.hpp"
#include "biqrm/quadrature.hpp"
#include "biqrm/spectral.hpp"
#include "test_oracles.hpp"

using namespace biqrm;

namespace {

constexpr double kPi = std::numbers::pi;
const double kPi2 = kPi * kPi;

TemporalProfile constant_one() { return TemporalProfile(1.0, ConstantShape{1.0}); }

// scaled-cosine drop followed by a full cosine: changes sign once at pi/2
// and stays small on the positive part
TemporalProfile piecewise_cos_example() {
  const double amp = 1.0 / (48.0 * std::sqrt(2.0));
  PiecewiseTrigShape shape;
  shape.segments.push_back({0.0, kPi / 2.0, amp, 1.0, 0.0, false});
  shape.segments.push_back({kPi / 2.0, kPi, 1.0, 1.0, 0.0, false});
  return TemporalProfile(kPi, std::move(shape), DerivativeBound{1.0, true});
}

TemporalProfile small_amplitude_sign_change() {
  PiecewiseTrigShape shape;
  shape.segments.push_back({0.0, kPi / 2.0, 0.01, 1.0, 0.0, false});
  shape.segments.push_back({kPi / 2.0, kPi, 1.0, 1.0, 0.0, false});
  return TemporalProfile(kPi, std::move(shape), DerivativeBound{1.0, true});
}

}  // namespace

TEST_CASE("profile construction validates its shape") {
  CHECK_THROWS_AS(TemporalProfile(0.0, ConstantShape{1.0}), std::invalid_argument);

  PiecewiseTrigShape jump;
  jump.segments.push_back({0.0, 0.5, 1.0, 1.0, 0.0, false});
  jump.segments.push_back({0.5, 1.0, 2.0, 1.0, 0.0, false});  // 2 cos(0.5) != cos(0.5)
  CHECK_THROWS_AS(TemporalProfile(1.0, jump), std::invalid_argument);

  TabulatedShape bad;
  bad.times = {0.0, 0.7, 0.4, 1.0};
  bad.values = {0.0, 1.0, 1.0, 0.0};
  CHECK_THROWS_AS(TemporalProfile(1.0, bad), std::invalid_argument);

  TabulatedShape good;
  good.times = {0.0, 0.5, 1.0};
  good.values = {1.0, 2.0, 1.5};
  const TemporalProfile tab(1.0, good);
  CHECK(tab(0.25) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(tab.sup_norm() == 2.0);
  CHECK(tab.derivative(0.25) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("sup norm is exact for closed-form shapes") {
  CHECK(piecewise_cos_example().sup_norm() == doctest::Approx(1.0).epsilon(1e-15));
  // 1 + t(1-t) peaks at 1.25
  const TemporalProfile poly(1.0, PolynomialShape{{1.0, 1.0, -1.0}});
  CHECK(poly.sup_norm() == doctest::Approx(1.25).epsilon(1e-10));
}

TEST_CASE("constant profile certificate") {
  const auto report = check_assumption(constant_one(), kPi2);
  CHECK(report.satisfied == AdmissibilityCase::fixed_sign);
  CHECK(report.kappa1 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(report.tau0 == 0.0);
  const double expected_c = 1.0 - (1.0 + kPi2) * std::exp(-kPi2);
  CHECK(report.lower_bound_hint == doctest::Approx(expected_c).epsilon(1e-12));
  CHECK(lower_bound_constant(report, kPi2) ==
        doctest::Approx(expected_c).epsilon(1e-12));
}

TEST_CASE("piecewise-cosine certificate lands on the known constants") {
  const auto report = check_assumption(piecewise_cos_example(), kPi2);
  REQUIRE(report.satisfied == AdmissibilityCase::sign_changing);
  CHECK(report.kappa1 == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-9));
  CHECK(report.tau0 == doctest::Approx(3.0 * kPi / 4.0).epsilon(1e-9));
  CHECK(report.tau1 == doctest::Approx(kPi / 2.0).epsilon(1e-9));
  CHECK(report.sign_change_bound ==
        doctest::Approx(1.0 / (48.0 * std::sqrt(2.0))).epsilon(1e-9));
  CHECK(report.sign_change_max_abs ==
        doctest::Approx(1.0 / (48.0 * std::sqrt(2.0))).epsilon(1e-12));
  REQUIRE(report.sign_change_set.size() == 1);
  CHECK(report.sign_change_set[0].from == 0.0);
  CHECK(report.sign_change_set[0].to == doctest::Approx(kPi / 2.0).epsilon(1e-9));
  // threshold doubles the minimum admissible value, so the high-mode
  // constant is |psi(tau)|/2
  const double threshold =
      (std::abs(report.psi_at_0) + 2.0 * kPi * report.kappa2) /
      (kPi * std::abs(report.psi_at_horizon));
  CHECK(report.c_tilde == doctest::Approx(2.0 * threshold).epsilon(1e-12));
  CHECK(report.lower_bound_hint > 0.0);
}

TEST_CASE("linear ramp fails the magnitude bound") {
  const TemporalProfile ramp(1.0, PolynomialShape{{-0.5, 1.0}},
                             DerivativeBound{1.0, true});
  const auto report = check_assumption(ramp);
  CHECK(report.satisfied == AdmissibilityCase::fails);
  CHECK(report.failure_reason.find("magnitude bound") != std::string::npos);
  CHECK_THROWS_AS((void)lower_bound_constant(report, kPi2), CertificateError);
}

TEST_CASE("sign change without a derivative bound fails") {
  PiecewiseTrigShape shape;
  shape.segments.push_back({0.0, kPi / 2.0, 0.01, 1.0, 0.0, false});
  shape.segments.push_back({kPi / 2.0, kPi, 1.0, 1.0, 0.0, false});
  const TemporalProfile psi(kPi, std::move(shape));  // no bound supplied
  const auto report = check_assumption(psi);
  CHECK(report.satisfied == AdmissibilityCase::fails);
  CHECK(report.failure_reason.find("derivative bound") != std::string::npos);
}

TEST_CASE("mu vanishes at t = 0 and matches the closed form") {
  CHECK(mu_coefficient(constant_one(), kPi2, 0.0) == 0.0);

  const double mu1 = mu_coefficient(constant_one(), kPi2, 1.0);
  const double closed = (1.0 - (1.0 + kPi2) * std::exp(-kPi2)) / (kPi2 * kPi2);
  CHECK(mu1 == doctest::Approx(closed).epsilon(1e-14));
  CHECK(mu1 == doctest::Approx(1.0259e-2).epsilon(1e-3));

  // independent adaptive-Simpson oracle
  auto psi_fn = [](double) { return 1.0; };
  const double oracle = oracles::mu_by_simpson(psi_fn, kPi2, 1.0, 1e-17);
  CHECK(mu1 == doctest::Approx(oracle).epsilon(1e-12));
}

TEST_CASE("quadrature path agrees with the closed form across the spectrum") {
  // a degree-0 polynomial takes the quadrature route
  const TemporalProfile quad_one(1.0, PolynomialShape{{1.0}});
  const auto domain = SpectralDomain::make({1.0}, 64);
  for (std::size_t n = 1; n <= 64; n += 7) {
    const double lambda = domain->eigenvalue(n);
    const double closed = (1.0 - (1.0 + lambda) * std::exp(-lambda)) / (lambda * lambda);
    CHECK(mu_coefficient(quad_one, lambda, 1.0) ==
          doctest::Approx(closed).epsilon(1e-12));
  }
}

TEST_CASE("piecewise profile multipliers agree with the Simpson oracle") {
  const auto psi = piecewise_cos_example();
  auto psi_fn = [&psi](double s) { return psi(s); };
  for (double lambda : {kPi2, 25.0 * kPi2, 400.0 * kPi2}) {
    const double mu = mu_coefficient(psi, lambda, kPi);
    const double envelope = 1.0 / (lambda * lambda);
    const double oracle =
        oracles::mu_by_simpson(psi_fn, lambda, kPi, 1e-16 * envelope);
    CHECK(mu == doctest::Approx(oracle).epsilon(1e-11));
  }
}

TEST_CASE("multiplier sequence carries its maximum and obeys the cap") {
  const auto domain = SpectralDomain::make({1.0}, 64);
  const auto psi = piecewise_cos_example();
  const auto seq = mu_sequence(psi, *domain);
  REQUIRE(seq.values.size() == 64);
  double max_abs = 0.0;
  for (std::size_t n = 1; n <= 64; ++n) {
    const double lambda = domain->eigenvalue(n);
    const double mu = seq.values[n - 1];
    CHECK(mu == doctest::Approx(mu_coefficient(psi, lambda, kPi)).epsilon(1e-13));
    CHECK(std::abs(mu) <= psi.sup_norm() / (lambda * lambda) * (1.0 + 1e-12));
    CHECK(mu != 0.0);
    max_abs = std::max(max_abs, std::abs(mu));
  }
  CHECK(seq.max_abs == max_abs);
}

TEST_CASE("lower-bound constant certifies every admissible gallery profile") {
  const auto domain = SpectralDomain::make({1.0}, 64);
  const double lambda1 = domain->eigenvalue(1);

  std::vector<TemporalProfile> gallery;
  gallery.push_back(constant_one());
  gallery.push_back(TemporalProfile(1.0, ConstantShape{-0.75}));
  gallery.push_back(TemporalProfile(1.0, PolynomialShape{{1.0, 1.0, -1.0}}));
  gallery.push_back(piecewise_cos_example());
  gallery.push_back(small_amplitude_sign_change());
  {
    TabulatedShape tab;
    for (int i = 0; i <= 40; ++i) {
      const double t = static_cast<double>(i) / 40.0;
      tab.times.push_back(t);
      tab.values.push_back(1.0 + 0.5 * t);
    }
    gallery.push_back(TemporalProfile(1.0, std::move(tab)));
  }

  for (const auto& psi : gallery) {
    const auto report = check_assumption(psi, lambda1);
    REQUIRE(report.satisfied != AdmissibilityCase::fails);
    const double c = lower_bound_constant(report, lambda1);
    REQUIRE(c > 0.0);
    const auto seq = mu_sequence(psi, *domain);
    for (std::size_t n = 1; n <= 64; ++n) {
      const double lambda = domain->eigenvalue(n);
      const double weighted = lambda * lambda * std::abs(seq.values[n - 1]);
      CHECK(weighted >= c * (1.0 - 1e-12));
      CHECK(weighted <= psi.sup_norm() * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("multiplier evaluation rejects bad arguments") {
  const auto psi = constant_one();
  CHECK_THROWS_AS((void)mu_coefficient(psi, 0.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS((void)mu_coefficient(psi, -1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS((void)mu_coefficient(psi, 1.0, 1.5), std::invalid_argument);
  CHECK_THROWS_AS((void)mu_coefficient(psi, 1.0, -0.1), std::invalid_argument);
}

TEST_CASE("an exhausted panel budget reports the achieved error") {
  auto needle = [](double t) { return 1.0 / (1e-12 + (t - 0.31830988618) * (t - 0.31830988618)); };
  try {
    (void)integrate_adaptive(needle, 0.0, 1.0, {}, 1e-14, 0.0, 8);
    FAIL("expected QuadratureError");
  } catch (const QuadratureError& e) {
    CHECK(e.error_estimate() > 0.0);
    CHECK(e.value() > 0.0);
  }
}

TEST_CASE("fixed-sign constant scales linearly in kappa1") {
  for (double eps : {1e-3, 1e-6}) {
    const TemporalProfile psi(1.0, ConstantShape{eps});
    const auto report = check_assumption(psi, kPi2);
    CHECK(report.kappa1 == doctest::Approx(eps).epsilon(1e-12));
    const double expected = eps * (1.0 - (1.0 + kPi2) * std::exp(-kPi2));
    CHECK(lower_bound_constant(report, kPi2) ==
          doctest::Approx(expected).epsilon(1e-12));
  }
}
