// Copyright 2026 The lcc Authors
// SPDX-License-Identifier: Apache-2.0

// Two-stage sampler for p(w):
//
//   1. xi ~ p(xi) by unadjusted Langevin, the score estimated from inner
//      draws of the log-concave reverse conditional p(w | xi);
//   2. w ~ p(w | xi).
//
// The reverse conditional is sampled by MALA under the gaussian prior and by
// hit-and-run with exact slice sampling along each chord of the l1 ball under
// the uniform prior.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "lcc/densities.hpp"
#include "lcc/rng.hpp"

namespace lcc {

// Step sizes of 0 select the defaults: 0.5 / (1 + alpha c n ||r||_inf) for
// the outer chain and 1 / (d (1/sigma0^2 + 2 alpha c lambda_max(X^T|R|X)))
// for inner MALA. A chain runs burn_in + n_steps * thinning iterations and
// retains n_steps states.
struct ChainConfig {
  double step_size = 0.0;
  std::size_t burn_in = 1000;
  std::size_t thinning = 5;
  std::size_t n_steps = 1;
  // Inner draws of w | xi per score evaluation (M).
  std::size_t inner_budget = 100;
  std::uint64_t seed = 0;

  double inner_step_size = 0.0;
  std::size_t inner_burn_in = 500;
  std::size_t inner_thinning = 5;
  // Start each inner chain at the last state of the previous one instead of
  // a fresh prior draw.
  bool warm_start = false;

  // Throws ConfigError naming the first invalid field.
  void validate() const;

  // Configuration for a chain on w | xi with `retained` kept samples.
  ChainConfig inner(std::size_t retained) const;
};

struct SamplerDiagnostics {
  double acceptance_rate = 0.0;
  std::vector<double> effective_sample_size;  // per coordinate
  std::uint64_t n_evals = 0;
};

double default_outer_step(const DensitySpec& spec);
double default_inner_step(const DensitySpec& spec);

// i.i.d. prior draws. The l1 ball is sampled as the first d coordinates of a
// Dirichlet(1, ..., 1) vector of length d + 1 (the last coordinate is the
// radial slack) with independent random signs.
std::vector<Vector> sample_prior(const PriorSpec& prior, int d,
                                 std::size_t count, std::uint64_t seed);
Vector sample_prior_one(const PriorSpec& prior, int d, RandomStream& rng);

struct ChainResult {
  std::vector<Vector> samples;
  SamplerDiagnostics diagnostics;
};

// Retained states of a chain targeting p(w | xi). `start` defaults to a prior
// draw. Throws StepSizeError after 1000 consecutive MALA rejections and
// SamplerError on a non-finite gradient.
ChainResult sample_reverse_conditional(const DensitySpec& spec, const Vector& xi,
                                       const ChainConfig& cfg,
                                       std::optional<Vector> start = std::nullopt);

struct XiChainResult {
  Vector xi;                  // final state
  std::vector<Vector> trace;  // retained states
  SamplerDiagnostics diagnostics;
  Vector last_inner_w;        // final inner state, reusable as a warm start
};

// Unadjusted Langevin on xi:
//   xi <- xi + (h/2) s_hat(xi) + sqrt(h) N(0, I),
// s_hat = xi_score over inner_budget fresh reverse-conditional draws.
// Initialised by forward coupling: xi_0 = S w_0 + Z with w_0 ~ p0.
// Throws DivergenceError when ||xi|| exceeds 1e6.
XiChainResult run_xi_chain(const DensitySpec& spec, const ChainConfig& cfg);

struct PosteriorDraw {
  Vector w;
  SamplerDiagnostics diagnostics;
};

// One draw of w approximately from p(w): run_xi_chain then a reverse
// conditional chain at the resulting xi. Specs without rows are sampled
// exactly from the prior.
PosteriorDraw draw_posterior_weight(const DensitySpec& spec, const ChainConfig& cfg);

// `count` independent pipelines; replicate j uses seed stream_seed(cfg.seed,
// {j}), so output does not depend on `threads`. threads = 0 uses the
// hardware concurrency.
std::vector<Vector> draw_posterior_weights(const DensitySpec& spec,
                                           const ChainConfig& cfg,
                                           std::size_t count,
                                           SamplerDiagnostics* diagnostics = nullptr,
                                           unsigned threads = 1);

// Per-coordinate effective sample size from the initial positive sequence
// estimator of the integrated autocorrelation time; at most samples.size().
std::vector<double> effective_sample_size(const std::vector<Vector>& samples);

}  // namespace lcc
