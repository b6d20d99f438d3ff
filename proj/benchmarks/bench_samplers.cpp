// Copyright 2026 The lcc Authors
// SPDX-License-Identifier: Apache-2.0

#include <random>

#include <benchmark/benchmark.h>

#include "lcc/densities.hpp"
#include "lcc/greedy_bayes.hpp"
#include "lcc/samplers.hpp"

namespace {

using namespace lcc;

DensitySpec make_spec(int n, int d, PriorSpec prior) {
  std::mt19937_64 eng(42);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix X(n, d);
  Vector r(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) X(i, j) = u(eng);
    r(i) = u(eng);
  }
  return DensitySpec(X, r, Activation(ActivationKind::tanh), 1.0 / std::sqrt(n), prior);
}

PriorSpec prior_of(int64_t gaussian) {
  return gaussian ? PriorSpec::gaussian(1.0) : PriorSpec::uniform_l1();
}

void BM_ReverseConditionalValueGradient(benchmark::State& state) {
  const auto spec = make_spec(static_cast<int>(state.range(0)), 5, PriorSpec::gaussian(1.0));
  ReverseConditional rc(spec, Vector::Ones(spec.rows()));
  Vector w = Vector::Constant(5, 0.1), grad(5);
  for (auto _ : state) benchmark::DoNotOptimize(rc.value_and_gradient(w, grad));
}
BENCHMARK(BM_ReverseConditionalValueGradient)->Arg(10)->Arg(50)->Arg(200);

void BM_InnerChain(benchmark::State& state) {
  const auto spec = make_spec(50, 5, prior_of(state.range(0)));
  ChainConfig c;
  c.burn_in = 0;
  c.thinning = 1;
  c.n_steps = 1000;
  const Vector xi = Vector::Zero(spec.rows());
  for (auto _ : state) {
    c.seed++;
    benchmark::DoNotOptimize(sample_reverse_conditional(spec, xi, c));
  }
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_InnerChain)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

void BM_XiChain(benchmark::State& state) {
  const auto spec = make_spec(50, 5, prior_of(state.range(0)));
  ChainConfig c;
  c.burn_in = 100;
  c.n_steps = 1;
  c.thinning = 1;
  c.inner_budget = 5;
  c.inner_burn_in = 10;
  c.inner_thinning = 1;
  c.warm_start = true;
  for (auto _ : state) {
    c.seed++;
    benchmark::DoNotOptimize(run_xi_chain(spec, c));
  }
}
BENCHMARK(BM_XiChain)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_PipelineDraw(benchmark::State& state) {
  const auto spec = make_spec(static_cast<int>(state.range(0)), 5, PriorSpec::gaussian(4.0));
  ChainConfig c;
  c.step_size = 1.0;
  c.burn_in = 300;
  c.inner_budget = 2;
  c.inner_burn_in = 3;
  c.inner_thinning = 1;
  c.warm_start = true;
  for (auto _ : state) {
    c.seed++;
    benchmark::DoNotOptimize(draw_posterior_weight(spec, c));
  }
}
BENCHMARK(BM_PipelineDraw)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_PredictFromStore(benchmark::State& state) {
  Dataset ds;
  std::mt19937_64 eng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ds.X.resize(20, 3);
  ds.y.resize(20);
  for (int i = 0; i < 20; ++i) {
    for (int j = 0; j < 3; ++j) ds.X(i, j) = u(eng);
    ds.y(i) = std::tanh(ds.X(i, 0));
  }
  HyperParams hp;
  hp.alpha = HyperParams::default_alpha(20);
  hp.K = 2;
  hp.L = 20;
  ChainConfig c;
  c.burn_in = 20;
  c.inner_budget = 2;
  c.inner_burn_in = 5;
  const auto model = fit(ds, hp, Activation(ActivationKind::tanh), PriorSpec::uniform_l1(), c);
  const Vector x = ds.X.row(0).transpose();
  for (auto _ : state) benchmark::DoNotOptimize(predict(model, x));
}
BENCHMARK(BM_PredictFromStore);

}  // namespace

BENCHMARK_MAIN();
