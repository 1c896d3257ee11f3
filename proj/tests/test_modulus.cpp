#include <doctest.h>

#include <cmath>
#include <numbers>

#include "biqrm/harness.hpp"
#include "biqrm/modulus.hpp"
#include "biqrm/operators.hpp"
#include "test_oracles.hpp"

using namespace biqrm;

namespace {

const double kPi2 = std::numbers::pi * std::numbers::pi;

ModulusQuery eight_mode_query(double p = 1.0, double r = 1.0) {
  const ForwardModel model(SpectralDomain::make({1.0}, 8),
                           TemporalProfile(1.0, ConstantShape{1.0}));
  ModulusQuery q;
  q.mu.assign(model.mu().begin(), model.mu().end());
  q.p = p;
  q.r = r;
  q.delta = 0.0;
  return q;
}

double membership_delta(const ModulusQuery& q, std::size_t k) {
  return q.r * std::pow(std::abs(q.mu[k - 1]), (q.p + 2.0) / 2.0);
}

}  // namespace

TEST_CASE("two-mode convention reconciliation") {
  // The closed form is the single-element modulus; the paired oracle at
  // 2*delta, halved, must reproduce it exactly on the spectrum.
  ModulusQuery q;
  q.mu = {0.5, 0.125};
  q.p = 1.0;
  q.r = 1.0;
  for (std::size_t k = 1; k <= 2; ++k) {
    q.delta = membership_delta(q, k);
    const double closed = modulus_closed_form(q);
    ModulusQuery paired = q;
    paired.delta = 2.0 * q.delta;
    CHECK(0.5 * modulus_oracle(paired) == doctest::Approx(closed).epsilon(1e-12));
    CHECK(modulus_oracle_single(q) == doctest::Approx(closed).epsilon(1e-12));
  }
  // away from the spectrum floor the paired value at delta itself sits
  // strictly above the closed form: the conventions genuinely differ
  q.delta = membership_delta(q, 1);
  CHECK(modulus_oracle(q) > modulus_closed_form(q) * 1.05);
}

TEST_CASE("closed form requires spectrum membership") {
  auto q = eight_mode_query();
  q.delta = membership_delta(q, 3);
  CHECK(q.spectrum_member());
  CHECK(modulus_closed_form(q) ==
        doctest::Approx(std::pow(q.delta, q.p / (q.p + 2.0))).epsilon(1e-13));
  q.delta *= 1.01;
  CHECK_FALSE(q.spectrum_member());
  CHECK_THROWS_AS((void)modulus_closed_form(q), std::domain_error);
}

TEST_CASE("oracle equals the closed form at every spectrum point") {
  for (double p : {0.5, 1.0, 2.0}) {
    auto q = eight_mode_query(p, 1.3);
    for (std::size_t k = 1; k <= q.mu.size(); ++k) {
      q.delta = membership_delta(q, k);
      const double closed = modulus_closed_form(q);
      CHECK(modulus_oracle_single(q) == doctest::Approx(closed).epsilon(1e-9));
    }
  }

  // largest instance the oracle accepts
  const ForwardModel model(SpectralDomain::make({1.0}, 16),
                           TemporalProfile(1.0, ConstantShape{1.0}));
  ModulusQuery q;
  q.mu.assign(model.mu().begin(), model.mu().end());
  q.p = 1.5;
  q.r = 0.9;
  for (std::size_t k = 1; k <= 16; k += 3) {
    q.delta = membership_delta(q, k);
    CHECK(modulus_oracle_single(q) ==
          doctest::Approx(modulus_closed_form(q)).epsilon(1e-9));
  }
}

TEST_CASE("bounds bracket the oracle off the spectrum") {
  auto q = eight_mode_query();
  const double lo = membership_delta(q, 8) * 1.05;
  const double hi = membership_delta(q, 1) * 0.95;
  int checked = 0;
  for (int i = 0; i < 20; ++i) {
    q.delta = lo * std::pow(hi / lo, (i + 0.5) / 20.0);
    if (q.spectrum_member()) continue;
    const auto bounds = modulus_bounds(q);
    CHECK(bounds.lower <= bounds.upper);
    const double omega = modulus_oracle_single(q);
    CHECK(omega >= bounds.lower * (1.0 - 1e-9));
    CHECK(omega <= bounds.upper * (1.0 + 1e-9));
    ++checked;
  }
  CHECK(checked >= 18);
}

TEST_CASE("bounds are fixed multiples of the rate factor") {
  auto q = eight_mode_query();
  const double d1 = membership_delta(q, 4) * 1.13;
  const double d2 = membership_delta(q, 6) * 1.17;
  const double rate = q.p / (q.p + 2.0);

  q.delta = d1;
  const auto b1 = modulus_bounds(q);
  q.delta = d2;
  const auto b2 = modulus_bounds(q);
  CHECK(b1.lower / std::pow(d1, rate) ==
        doctest::Approx(b2.lower / std::pow(d2, rate)).epsilon(1e-12));
  CHECK(b1.upper / std::pow(d1, rate) ==
        doctest::Approx(b2.upper / std::pow(d2, rate)).epsilon(1e-12));
}

TEST_CASE("non-monotone multipliers exercise the ascending bracket") {
  // sign-changing time factors can reorder |mu|; the bracket logic must not
  // assume a decreasing sequence
  ModulusQuery q;
  q.mu = {0.1, 0.5, 0.01};
  q.p = 1.0;
  q.r = 1.0;
  q.delta = 0.1;  // delta^2 sits between |mu_1|^3 and |mu_2|^3
  const auto bounds = modulus_bounds(q);
  CHECK_FALSE(bounds.descending_pair);
  CHECK(bounds.bracket_index == 1);
  const double omega = modulus_oracle_single(q);
  CHECK(omega >= bounds.lower * (1.0 - 1e-12));
  CHECK(omega <= bounds.upper * (1.0 + 1e-12));
}

TEST_CASE("modulus is monotone in delta and in the set radius") {
  auto q = eight_mode_query();
  const double lo = membership_delta(q, 8) * 1.02;
  const double hi = membership_delta(q, 1);
  double previous = 0.0;
  for (int i = 0; i <= 12; ++i) {
    q.delta = lo * std::pow(hi / lo, i / 12.0);
    const double omega = modulus_oracle_single(q);
    CHECK(omega >= previous * (1.0 - 1e-12));
    previous = omega;
  }

  auto small = eight_mode_query(1.0, 0.8);
  auto large = eight_mode_query(1.0, 1.6);
  small.delta = large.delta = membership_delta(small, 4) * 1.07;
  CHECK(modulus_oracle_single(small) <= modulus_oracle_single(large) * (1.0 + 1e-12));
}

TEST_CASE("degenerate and out-of-range queries") {
  auto q = eight_mode_query();
  q.delta = 0.0;
  CHECK(modulus_oracle_single(q) == 0.0);
  CHECK(modulus_oracle(q) == 0.0);

  q.delta = q.delta0() * 1.5;
  CHECK_THROWS_AS((void)modulus_bounds(q), std::out_of_range);
  q.delta = membership_delta(q, 8) * 0.5;  // below the truncated floor
  CHECK_THROWS_AS((void)modulus_bounds(q), std::out_of_range);

  ModulusQuery big;
  big.mu.assign(32, 0.5);
  big.p = 1.0;
  big.r = 1.0;
  big.delta = 0.1;
  CHECK_THROWS_AS((void)modulus_oracle_single(big), std::invalid_argument);
}

TEST_CASE("single-mode instances have the clipped closed form") {
  ModulusQuery q;
  q.mu = {0.2};
  q.p = 1.5;
  q.r = 0.7;
  for (double delta : {1e-4, 1e-2, 0.2}) {
    q.delta = delta;
    const double expected =
        2.0 * std::min(q.r * std::pow(0.2, q.p / 2.0), delta / (2.0 * 0.2));
    CHECK(modulus_oracle(q) == doctest::Approx(expected).epsilon(1e-13));
  }
}

TEST_CASE("weyl band: interval and square") {
  const auto line = SpectralDomain::make({1.0}, 128);
  const auto report = weyl_ratio_check(*line);
  CHECK(report.pass);
  CHECK(report.e1 == doctest::Approx(kPi2).epsilon(1e-13));
  CHECK(report.e2 == doctest::Approx(kPi2).epsilon(1e-13));
  CHECK(report.min_consecutive_ratio >= 0.25 * (1.0 - 1e-12));

  const auto square = SpectralDomain::make({1.0, 1.3}, 128);
  const auto report2 = weyl_ratio_check(*square);
  CHECK(report2.pass);
  CHECK(report2.e1 > 0.0);
  CHECK(report2.e2 / report2.e1 < 10.0);

  const auto cube = SpectralDomain::make({1.0, 1.0, 1.0}, 8);
  CHECK_THROWS_AS((void)weyl_ratio_check(*cube), std::invalid_argument);
}
