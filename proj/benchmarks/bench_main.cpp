#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "biqrm/harness.hpp"
#include "biqrm/modulus.hpp"
#include "biqrm/operators.hpp"
#include "biqrm/regularizer.hpp"

namespace {

using namespace biqrm;

constexpr double kPi = std::numbers::pi;

TemporalProfile piecewise_cos_profile() {
  const double amp = 1.0 / (48.0 * std::sqrt(2.0));
  PiecewiseTrigShape shape;
  shape.segments.push_back({0.0, kPi / 2.0, amp, 1.0, 0.0, false});
  shape.segments.push_back({kPi / 2.0, kPi, 1.0, 1.0, 0.0, false});
  return TemporalProfile(kPi, std::move(shape), DerivativeBound{1.0, true});
}

void BM_mu_sequence_closed_form(benchmark::State& state) {
  const auto domain = SpectralDomain::make({1.0}, state.range(0));
  const TemporalProfile psi(1.0, ConstantShape{1.0});
  for (auto _ : state) {
    benchmark::DoNotOptimize(mu_sequence(psi, *domain));
  }
}
BENCHMARK(BM_mu_sequence_closed_form)->Arg(64)->Arg(256);

void BM_mu_sequence_quadrature(benchmark::State& state) {
  const auto domain = SpectralDomain::make({1.0}, state.range(0));
  const auto psi = piecewise_cos_profile();
  for (auto _ : state) {
    benchmark::DoNotOptimize(mu_sequence(psi, *domain));
  }
}
BENCHMARK(BM_mu_sequence_quadrature)->Arg(64)->Arg(256);

void BM_check_assumption(benchmark::State& state) {
  const auto psi = piecewise_cos_profile();
  for (auto _ : state) {
    benchmark::DoNotOptimize(check_assumption(psi));
  }
}
BENCHMARK(BM_check_assumption);

void BM_qrm_invert(benchmark::State& state) {
  const ForwardModel model(SpectralDomain::make({kPi}, state.range(0)),
                           TemporalProfile(1.0, ConstantShape{1.0}));
  const auto f = make_decay_source(model.domain_ptr(), SmoothnessClass(1.0, 1.0), 0.5);
  const auto h_delta = add_noise(model.apply_forward(f), 1e-4, 99);
  RegularizerConfig cfg;
  cfg.order = 2.0;
  cfg.alpha = apriori_alpha(1e-4, SmoothnessClass(1.0, 1.0), 2.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(qrm_invert(model, h_delta, cfg));
  }
}
BENCHMARK(BM_qrm_invert)->Arg(256)->Arg(1024);

void BM_morozov_select(benchmark::State& state) {
  const ForwardModel model(SpectralDomain::make({kPi}, state.range(0)),
                           TemporalProfile(1.0, ConstantShape{1.0}));
  const auto f = make_decay_source(model.domain_ptr(), SmoothnessClass(1.0, 1.0), 0.5);
  const auto h_delta = add_noise(model.apply_forward(f), 1e-4, 99);
  for (auto _ : state) {
    benchmark::DoNotOptimize(morozov_select(h_delta, 1e-4, 1.5, 4.0));
  }
}
BENCHMARK(BM_morozov_select)->Arg(256)->Arg(1024);

void BM_modulus_oracle(benchmark::State& state) {
  const ForwardModel model(SpectralDomain::make({1.0}, state.range(0)),
                           TemporalProfile(1.0, ConstantShape{1.0}));
  ModulusQuery query;
  query.mu.assign(model.mu().begin(), model.mu().end());
  query.p = 1.0;
  query.r = 1.0;
  query.delta = 0.5 * query.delta0();
  for (auto _ : state) {
    benchmark::DoNotOptimize(modulus_oracle(query));
  }
}
BENCHMARK(BM_modulus_oracle)->Arg(8)->Arg(16);

void BM_rate_experiment(benchmark::State& state) {
  ExperimentSpec spec;
  spec.domain = SpectralDomain::make({kPi}, 256);
  spec.profile = TemporalProfile(1.0, ConstantShape{1.0});
  spec.smoothness = SmoothnessClass(1.0, 1.0);
  spec.order_b = 2.0;
  spec.rule = ChoiceRule::apriori;
  spec.deltas = {1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7};
  spec.seed = 1;
  spec.trials = 10;
  spec.label = "bench";
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_rate_experiment(spec));
  }
}
BENCHMARK(BM_rate_experiment);

}  // namespace

BENCHMARK_MAIN();
