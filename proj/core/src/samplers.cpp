// Copyright 2026 The lcc Authors
// SPDX-License-Identifier: Apache-2.0

#include "lcc/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>

#include "lcc/error.hpp"

namespace lcc {
namespace {

constexpr std::size_t kMaxConsecutiveRejections = 1000;
constexpr int kMaxSliceShrinks = 200;
constexpr double kDivergenceRadius = 1e6;

// Largest t >= 0 with ||w + t v||_1 <= 1, exact for the piecewise linear norm.
double chord_end(const Vector& w, const Vector& v) {
  const Eigen::Index d = w.size();
  double breakpoints[64];
  std::vector<double> heap_breakpoints;
  double* bp = breakpoints;
  if (d > 64) {
    heap_breakpoints.resize(static_cast<std::size_t>(d));
    bp = heap_breakpoints.data();
  }
  int count = 0;
  for (Eigen::Index j = 0; j < d; ++j) {
    if (v(j) != 0.0) {
      const double t = -w(j) / v(j);
      if (t > 0.0) bp[count++] = t;
    }
  }
  std::sort(bp, bp + count);

  auto norm_at = [&](double t) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < d; ++j) s += std::abs(w(j) + t * v(j));
    return s;
  };

  double prev_t = 0.0;
  double prev_f = norm_at(0.0);
  if (prev_f >= 1.0) return 0.0;
  for (int k = 0; k < count; ++k) {
    const double f = norm_at(bp[k]);
    if (f >= 1.0) {
      return prev_t + (1.0 - prev_f) * (bp[k] - prev_t) / (f - prev_f);
    }
    prev_t = bp[k];
    prev_f = f;
  }
  const double slope = v.lpNorm<1>();
  if (!(slope > 0.0)) return 0.0;
  return prev_t + (1.0 - prev_f) / slope;
}

// Markov chain on w | xi. Holds scratch buffers; not thread-safe.
class InnerChain {
 public:
  InnerChain(const DensitySpec& spec, const Vector& xi, double step,
             RandomStream& rng)
      : target_(spec, xi),
        rng_(rng),
        gaussian_(spec.prior().is_gaussian()),
        step_(step),
        w_(Vector::Zero(spec.dim())),
        grad_(spec.dim()),
        prop_(spec.dim()),
        prop_grad_(spec.dim()),
        dir_(spec.dim()) {
    if (gaussian_ && !(step_ > 0.0)) {
      throw ConfigError("inner MALA step size must be positive");
    }
  }

  void reset(const Vector& start) {
    if (!gaussian_ && start.lpNorm<1>() > 1.0) {
      throw InputError("inner chain start lies outside the l1 ball");
    }
    w_ = start;
    if (gaussian_) {
      logp_ = target_.value_and_gradient(w_, grad_);
      ++evals_;
      check_finite(logp_, grad_);
    }
    consecutive_rejects_ = 0;
  }

  void step() {
    if (gaussian_) {
      mala_step();
    } else {
      hit_and_run_step();
    }
  }

  const Vector& state() const noexcept { return w_; }
  std::uint64_t evals() const noexcept { return evals_; }
  std::uint64_t proposals() const noexcept { return proposals_; }
  std::uint64_t accepted() const noexcept { return accepted_; }

 private:
  void check_finite(double logp, const Vector& grad) const {
    if (!std::isfinite(logp) || !grad.allFinite()) {
      throw SamplerError("non-finite log-density or gradient in reverse conditional");
    }
  }

  void mala_step() {
    const double half = 0.5 * step_;
    const double sd = std::sqrt(step_);
    double z2 = 0.0;
    for (Eigen::Index j = 0; j < w_.size(); ++j) {
      const double z = rng_.normal();
      z2 += z * z;
      prop_(j) = w_(j) + half * grad_(j) + sd * z;
    }
    const double logp_prop = target_.value_and_gradient(prop_, prop_grad_);
    ++evals_;
    ++proposals_;
    check_finite(logp_prop, prop_grad_);

    // log q(w | prop) - log q(prop | w)
    double back = 0.0;
    for (Eigen::Index j = 0; j < w_.size(); ++j) {
      const double diff = w_(j) - prop_(j) - half * prop_grad_(j);
      back += diff * diff;
    }
    const double log_ratio = logp_prop - logp_ + (-back / (2.0 * step_)) + 0.5 * z2;
    if (std::log(rng_.uniform()) < log_ratio) {
      w_.swap(prop_);
      grad_.swap(prop_grad_);
      logp_ = logp_prop;
      ++accepted_;
      consecutive_rejects_ = 0;
    } else if (++consecutive_rejects_ >= kMaxConsecutiveRejections) {
      throw StepSizeError("MALA rejected " +
                          std::to_string(kMaxConsecutiveRejections) +
                          " consecutive proposals at step size " +
                          std::to_string(step_));
    }
  }

  void hit_and_run_step() {
    double norm2 = 0.0;
    do {
      norm2 = 0.0;
      for (Eigen::Index j = 0; j < dir_.size(); ++j) {
        dir_(j) = rng_.normal();
        norm2 += dir_(j) * dir_(j);
      }
    } while (!(norm2 > 0.0));
    dir_ /= std::sqrt(norm2);

    const double hi = chord_end(w_, dir_);
    const double lo = -chord_end(w_, -dir_);
    target_.set_line(w_, dir_);
    const double level = target_.line_value(0.0) - rng_.exponential();
    ++evals_;

    double left = lo;
    double right = hi;
    for (int it = 0; it < kMaxSliceShrinks; ++it) {
      const double t = left + rng_.uniform() * (right - left);
      ++proposals_;
      ++evals_;
      prop_ = w_ + t * dir_;
      if (prop_.lpNorm<1>() <= 1.0 && target_.line_value(t) > level) {
        w_.swap(prop_);
        ++accepted_;
        return;
      }
      if (t < 0.0) {
        left = t;
      } else {
        right = t;
      }
    }
  }

  ReverseConditional target_;
  RandomStream& rng_;
  bool gaussian_;
  double step_;
  Vector w_;
  Vector grad_;
  Vector prop_;
  Vector prop_grad_;
  Vector dir_;
  double logp_ = 0.0;
  std::uint64_t evals_ = 0;
  std::uint64_t proposals_ = 0;
  std::uint64_t accepted_ = 0;
  std::size_t consecutive_rejects_ = 0;
};

double inner_step_for(const DensitySpec& spec, double requested) {
  return requested > 0.0 ? requested : default_inner_step(spec);
}

struct InnerRun {
  Vector mean;
  Vector last;
  std::uint64_t evals = 0;
  std::uint64_t proposals = 0;
  std::uint64_t accepted = 0;
};

// Runs burn_in + retained * thinning steps and averages the retained states.
InnerRun run_inner_mean(const DensitySpec& spec, const Vector& xi,
                        const Vector& start, double step, std::size_t burn_in,
                        std::size_t retained, std::size_t thinning,
                        RandomStream& rng) {
  InnerChain chain(spec, xi, step, rng);
  chain.reset(start);
  InnerRun out;
  out.mean = Vector::Zero(spec.dim());
  for (std::size_t t = 0; t < burn_in; ++t) chain.step();
  for (std::size_t m = 0; m < retained; ++m) {
    for (std::size_t t = 0; t < thinning; ++t) chain.step();
    out.mean += chain.state();
  }
  if (retained > 0) out.mean /= static_cast<double>(retained);
  out.last = chain.state();
  out.evals = chain.evals();
  out.proposals = chain.proposals();
  out.accepted = chain.accepted();
  return out;
}

struct XiChainState {
  XiChainResult result;
  std::uint64_t proposals = 0;
  std::uint64_t accepted = 0;
};

XiChainState run_xi_chain_impl(const DensitySpec& spec, const ChainConfig& cfg,
                               RandomStream& rng) {
  cfg.validate();
  const int n = spec.rows();
  const int d = spec.dim();
  const double h = cfg.step_size > 0.0 ? cfg.step_size : default_outer_step(spec);
  const double sd = std::sqrt(h);
  const double inner_step =
      spec.prior().is_gaussian() ? inner_step_for(spec, cfg.inner_step_size) : 0.0;
  const Matrix& S = spec.scaled_design();

  XiChainState st;
  Vector w0 = sample_prior_one(spec.prior(), d, rng);
  Vector xi = S * w0;
  for (int i = 0; i < n; ++i) xi(i) += rng.normal();
  Vector last_w = w0;

  const std::size_t total = cfg.burn_in + cfg.n_steps * cfg.thinning;
  st.result.trace.reserve(cfg.n_steps);
  Vector score(n);
  for (std::size_t t = 0; t < total; ++t) {
    const Vector start = cfg.warm_start ? last_w : sample_prior_one(spec.prior(), d, rng);
    InnerRun inner = run_inner_mean(spec, xi, start, inner_step, cfg.inner_burn_in,
                                    cfg.inner_budget, cfg.inner_thinning, rng);
    st.result.diagnostics.n_evals += inner.evals;
    st.proposals += inner.proposals;
    st.accepted += inner.accepted;
    last_w = std::move(inner.last);

    score.noalias() = S * inner.mean;
    score -= xi;
    for (int i = 0; i < n; ++i) xi(i) += 0.5 * h * score(i) + sd * rng.normal();
    if (!xi.allFinite() || xi.norm() > kDivergenceRadius) {
      throw DivergenceError("xi chain diverged (||xi|| > 1e6) at step " +
                            std::to_string(t) + " with step size " +
                            std::to_string(h));
    }
    if (t >= cfg.burn_in && (t - cfg.burn_in + 1) % cfg.thinning == 0) {
      st.result.trace.push_back(xi);
    }
  }
  st.result.xi = xi;
  st.result.last_inner_w = last_w;
  st.result.diagnostics.acceptance_rate =
      st.proposals > 0 ? static_cast<double>(st.accepted) / static_cast<double>(st.proposals)
                       : 1.0;
  st.result.diagnostics.effective_sample_size = effective_sample_size(st.result.trace);
  return st;
}

}  // namespace

void ChainConfig::validate() const {
  if (!(step_size >= 0.0) || !std::isfinite(step_size)) {
    throw ConfigError("chain.step_size must be positive (or 0 for the default)");
  }
  if (!(inner_step_size >= 0.0) || !std::isfinite(inner_step_size)) {
    throw ConfigError("chain.inner_step_size must be positive (or 0 for the default)");
  }
  if (thinning < 1) throw ConfigError("chain.thinning must be >= 1");
  if (inner_thinning < 1) throw ConfigError("chain.inner_thinning must be >= 1");
  if (n_steps < 1) throw ConfigError("chain.n_steps must be >= 1");
  if (inner_budget < 1) throw ConfigError("chain.inner_budget must be >= 1");
}

ChainConfig ChainConfig::inner(std::size_t retained) const {
  ChainConfig c = *this;
  c.step_size = inner_step_size;
  c.burn_in = inner_burn_in;
  c.thinning = inner_thinning;
  c.n_steps = retained;
  return c;
}

double default_outer_step(const DensitySpec& spec) {
  return 0.5 / (1.0 + spec.alpha() * spec.activation().curvature() * spec.rows() *
                          spec.residual_sup());
}

double default_inner_step(const DensitySpec& spec) {
  if (!spec.prior().is_gaussian()) return 0.0;
  const double curvature = 1.0 / spec.prior().sigma0_sq +
                           2.0 * spec.alpha() * spec.activation().curvature() *
                               spec.weighted_lambda_max();
  return 1.0 / (spec.dim() * curvature);
}

Vector sample_prior_one(const PriorSpec& prior, int d, RandomStream& rng) {
  Vector w(d);
  if (prior.is_gaussian()) {
    const double sd = std::sqrt(prior.sigma0_sq);
    for (int j = 0; j < d; ++j) w(j) = sd * rng.normal();
    return w;
  }
  double total = 0.0;
  for (int j = 0; j < d; ++j) {
    w(j) = rng.exponential();
    total += w(j);
  }
  total += rng.exponential();  // radial slack coordinate
  for (int j = 0; j < d; ++j) {
    w(j) /= total;
    if (rng.coin()) w(j) = -w(j);
  }
  return w;
}

std::vector<Vector> sample_prior(const PriorSpec& prior, int d, std::size_t count,
                                 std::uint64_t seed) {
  if (d < 1) throw InputError("sample_prior: dimension must be >= 1");
  RandomStream rng(seed);
  std::vector<Vector> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) out.push_back(sample_prior_one(prior, d, rng));
  return out;
}

ChainResult sample_reverse_conditional(const DensitySpec& spec, const Vector& xi,
                                       const ChainConfig& cfg,
                                       std::optional<Vector> start) {
  if (xi.size() != spec.rows()) {
    throw InputError("sample_reverse_conditional: xi has length " +
                     std::to_string(xi.size()) + ", expected " +
                     std::to_string(spec.rows()));
  }
  if (cfg.thinning < 1) throw ConfigError("chain.thinning must be >= 1");
  RandomStream rng(cfg.seed);
  const double step =
      spec.prior().is_gaussian() ? inner_step_for(spec, cfg.step_size) : 0.0;
  InnerChain chain(spec, xi, step, rng);
  if (start) {
    if (start->size() != spec.dim()) {
      throw InputError("sample_reverse_conditional: start has wrong dimension");
    }
    chain.reset(*start);
  } else {
    chain.reset(sample_prior_one(spec.prior(), spec.dim(), rng));
  }

  ChainResult out;
  out.samples.reserve(cfg.n_steps);
  for (std::size_t t = 0; t < cfg.burn_in; ++t) chain.step();
  for (std::size_t m = 0; m < cfg.n_steps; ++m) {
    for (std::size_t t = 0; t < cfg.thinning; ++t) chain.step();
    out.samples.push_back(chain.state());
  }
  out.diagnostics.n_evals = chain.evals();
  out.diagnostics.acceptance_rate =
      chain.proposals() > 0
          ? static_cast<double>(chain.accepted()) / static_cast<double>(chain.proposals())
          : 1.0;
  out.diagnostics.effective_sample_size = effective_sample_size(out.samples);
  return out;
}

XiChainResult run_xi_chain(const DensitySpec& spec, const ChainConfig& cfg) {
  RandomStream rng(cfg.seed);
  return run_xi_chain_impl(spec, cfg, rng).result;
}

PosteriorDraw draw_posterior_weight(const DensitySpec& spec, const ChainConfig& cfg) {
  cfg.validate();
  RandomStream rng(cfg.seed);
  PosteriorDraw out;
  if (spec.rows() == 0) {
    out.w = sample_prior_one(spec.prior(), spec.dim(), rng);
    out.diagnostics.acceptance_rate = 1.0;
    return out;
  }
  XiChainState st = run_xi_chain_impl(spec, cfg, rng);
  const Vector start = cfg.warm_start ? st.result.last_inner_w
                                      : sample_prior_one(spec.prior(), spec.dim(), rng);
  const double step =
      spec.prior().is_gaussian() ? inner_step_for(spec, cfg.inner_step_size) : 0.0;
  InnerRun final_run = run_inner_mean(spec, st.result.xi, start, step,
                                      cfg.inner_burn_in, 1, cfg.inner_thinning, rng);
  out.w = std::move(final_run.last);
  out.diagnostics = st.result.diagnostics;
  out.diagnostics.n_evals += final_run.evals;
  const std::uint64_t proposals = st.proposals + final_run.proposals;
  const std::uint64_t accepted = st.accepted + final_run.accepted;
  out.diagnostics.acceptance_rate =
      proposals > 0 ? static_cast<double>(accepted) / static_cast<double>(proposals) : 1.0;
  return out;
}

std::vector<Vector> draw_posterior_weights(const DensitySpec& spec,
                                           const ChainConfig& cfg, std::size_t count,
                                           SamplerDiagnostics* diagnostics,
                                           unsigned threads) {
  cfg.validate();
  std::vector<Vector> out(count);
  std::vector<PosteriorDraw> draws(count);
  auto work = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t j = begin; j < count; j += stride) {
      ChainConfig c = cfg;
      c.seed = stream_seed(cfg.seed, {j});
      draws[j] = draw_posterior_weight(spec, c);
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
  if (threads <= 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          work(t, threads);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  double acc = 0.0;
  std::uint64_t evals = 0;
  for (std::size_t j = 0; j < count; ++j) {
    out[j] = std::move(draws[j].w);
    acc += draws[j].diagnostics.acceptance_rate;
    evals += draws[j].diagnostics.n_evals;
  }
  if (diagnostics) {
    diagnostics->acceptance_rate = count > 0 ? acc / static_cast<double>(count) : 1.0;
    diagnostics->n_evals = evals;
    diagnostics->effective_sample_size = effective_sample_size(out);
  }
  return out;
}

std::vector<double> effective_sample_size(const std::vector<Vector>& samples) {
  if (samples.empty()) return {};
  const std::size_t N = samples.size();
  const Eigen::Index d = samples.front().size();
  std::vector<double> ess(static_cast<std::size_t>(d), static_cast<double>(N));
  if (N < 4) return ess;

  std::vector<double> x(N);
  for (Eigen::Index j = 0; j < d; ++j) {
    double mean = 0.0;
    for (std::size_t t = 0; t < N; ++t) {
      x[t] = samples[t](j);
      mean += x[t];
    }
    mean /= static_cast<double>(N);
    for (auto& v : x) v -= mean;

    auto autocov = [&](std::size_t lag) {
      double s = 0.0;
      for (std::size_t t = 0; t + lag < N; ++t) s += x[t] * x[t + lag];
      return s / static_cast<double>(N);
    };
    const double gamma0 = autocov(0);
    if (!(gamma0 > 0.0)) continue;

    // Geyer's initial positive sequence: sum pairs until one turns negative.
    double tau = -1.0;
    for (std::size_t m = 0; 2 * m + 1 < N; ++m) {
      const double pair = (autocov(2 * m) + autocov(2 * m + 1)) / gamma0;
      if (pair <= 0.0) break;
      tau += 2.0 * pair;
    }
    tau = std::max(tau, 1.0 / static_cast<double>(N));
    ess[static_cast<std::size_t>(j)] = std::min(static_cast<double>(N), static_cast<double>(N) / tau);
  }
  return ess;
}

}  // namespace lcc
