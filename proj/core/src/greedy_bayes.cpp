// Copyright 2026 The lcc Authors
// SPDX-License-Identifier: Apache-2.0

#include "lcc/greedy_bayes.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>
#include <thread>

#include "lcc/error.hpp"

namespace lcc {
namespace {

std::string key_name(int i, int k) {
  return "(" + std::to_string(i) + "," + std::to_string(k) + ")";
}

void require_complete(const GreedyBayesModel& model) {
  if (!model.store.complete()) {
    throw StateError("model store is incomplete: " + std::to_string(model.store.size()) +
                     " of " + std::to_string(model.store.n() * model.store.K()) +
                     " sample lists present");
  }
}

// table(i, j) = meanpsi_{i+1,k}(x_j) over every index i and data row j.
Matrix stage_activation_table(const GreedyBayesModel& model, int k, const Dataset& ds) {
  const int n = model.store.n();
  Matrix table(n, ds.n());
  for (int i = 1; i <= n; ++i) {
    const auto& draws = model.store.at(i, k);
    for (int j = 0; j < ds.n(); ++j) {
      double s = 0.0;
      for (const auto& w : draws) s += model.act.value(ds.X.row(j).dot(w));
      table(i - 1, j) = s / static_cast<double>(draws.size());
    }
  }
  return table;
}

double mse_of_average(const Matrix& fits, const Dataset& ds) {
  // fits(i, j) = f_{i,k}(x_j); the estimator averages over i.
  double s = 0.0;
  for (int j = 0; j < ds.n(); ++j) {
    const double pred = fits.rows() > 0 ? fits.col(j).mean() : 0.0;
    const double e = ds.y(j) - pred;
    s += e * e;
  }
  return s / static_cast<double>(ds.n());
}

}  // namespace

SampleStore::SampleStore(int n, int K, int L, int d)
    : n_(n), K_(K), L_(L), d_(d), per_stage_(static_cast<std::size_t>(std::max(K, 0)) + 1, 0) {
  if (n < 1 || K < 1 || L < 1 || d < 1) {
    throw InputError("SampleStore: n, K, L and d must be positive");
  }
}

void SampleStore::put(int i, int k, std::vector<Vector> draws) {
  if (i < 1 || i > n_ || k < 1 || k > K_) {
    throw StateError("SampleStore: index " + key_name(i, k) + " out of range");
  }
  if (static_cast<int>(draws.size()) != L_) {
    throw InputError("SampleStore: " + key_name(i, k) + " has " +
                     std::to_string(draws.size()) + " draws, expected " +
                     std::to_string(L_));
  }
  for (const auto& w : draws) {
    if (w.size() != d_) throw InputError("SampleStore: draw of wrong dimension at " + key_name(i, k));
  }
  if (k > 1 && !stage_complete(k - 1)) {
    throw StateError("SampleStore: stage " + std::to_string(k - 1) +
                     " incomplete before inserting " + key_name(i, k));
  }
  if (!lists_.emplace(std::make_pair(i, k), std::move(draws)).second) {
    throw StateError("SampleStore: " + key_name(i, k) + " already present");
  }
  ++per_stage_[static_cast<std::size_t>(k)];
}

bool SampleStore::contains(int i, int k) const { return lists_.count({i, k}) > 0; }

const std::vector<Vector>& SampleStore::at(int i, int k) const {
  const auto it = lists_.find({i, k});
  if (it == lists_.end()) throw StateError("SampleStore: no samples for " + key_name(i, k));
  return it->second;
}

bool SampleStore::stage_complete(int k) const {
  if (k < 1 || k > K_) return false;
  return per_stage_[static_cast<std::size_t>(k)] == n_;
}

bool SampleStore::complete() const {
  return K_ > 0 && static_cast<int>(lists_.size()) == n_ * K_;
}

DensitySpec stage_posterior_spec(const Dataset& ds, const Vector& residuals_prev,
                                 int i, int k, const HyperParams& hyper,
                                 const Activation& act, const PriorSpec& prior) {
  if (i < 1 || i > ds.n()) {
    throw InputError("stage_posterior_spec: index " + std::to_string(i) + " outside 1.." +
                     std::to_string(ds.n()));
  }
  if (k < 1) throw InputError("stage_posterior_spec: stage must be >= 1");
  if (residuals_prev.size() != ds.n()) {
    throw InputError("stage_posterior_spec: residual vector has wrong length");
  }
  const Eigen::Index rows = i - 1;
  return DensitySpec(ds.X.topRows(rows), residuals_prev.head(rows), act, hyper.alpha, prior);
}

GreedyBayesModel fit(const Dataset& ds, const HyperParams& hyper, const Activation& act,
                     const PriorSpec& prior, const ChainConfig& cfg,
                     const FitOptions& options) {
  hyper.validate();
  cfg.validate();
  const int n = ds.n();
  const int d = ds.d();
  const int L = hyper.L;

  GreedyBayesModel model;
  model.store = SampleStore(n, hyper.K, L, d);
  model.hyper = hyper;
  model.act = act;
  model.prior = prior;
  model.dataset = std::make_shared<const Dataset>(ds);

  Vector residuals = ds.y;  // r_{., k-1}
  Matrix fits = Matrix::Zero(n, n);  // fits(i, j) = f_{i,k}(x_j)

  for (int k = 1; k <= hyper.K; ++k) {
    std::vector<std::vector<Vector>> draws(static_cast<std::size_t>(n));
    std::vector<DensitySpec> specs;
    specs.reserve(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i) {
      specs.push_back(stage_posterior_spec(ds, residuals, i, k, hyper, act, prior));
      draws[static_cast<std::size_t>(i - 1)].resize(static_cast<std::size_t>(L));
    }

    // Posteriors within a stage only read stage k-1 residuals, so (i, l)
    // jobs are independent.
    const std::size_t jobs = static_cast<std::size_t>(n) * static_cast<std::size_t>(L);
    auto work = [&](std::size_t begin, std::size_t stride) {
      for (std::size_t job = begin; job < jobs; job += stride) {
        const int i = static_cast<int>(job / static_cast<std::size_t>(L)) + 1;
        const int l = static_cast<int>(job % static_cast<std::size_t>(L));
        ChainConfig c = cfg;
        c.seed = stream_seed(cfg.seed, {static_cast<std::uint64_t>(i),
                                        static_cast<std::uint64_t>(k),
                                        static_cast<std::uint64_t>(l)});
        try {
          draws[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(l)] =
              draw_posterior_weight(specs[static_cast<std::size_t>(i - 1)], c).w;
        } catch (const SamplerError& e) {
          throw StageError(i, k, e.what());
        }
      }
    };
    unsigned threads = options.threads == 0
                           ? std::max(1u, std::thread::hardware_concurrency())
                           : options.threads;
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

    for (int i = 1; i <= n; ++i) {
      model.store.put(i, k, std::move(draws[static_cast<std::size_t>(i - 1)]));
    }

    const Matrix table = stage_activation_table(model, k, ds);
    fits = (1.0 - hyper.beta) * fits + hyper.beta * table;
    for (int i = 0; i < n; ++i) residuals(i) = ds.y(i) - (1.0 - hyper.beta) * fits(i, i);

    if (options.on_stage) options.on_stage(k, mse_of_average(fits, ds));
  }
  return model;
}

double stage_mean_activation(const GreedyBayesModel& model, int i, int k, const Vector& x) {
  const auto& draws = model.store.at(i, k);
  if (x.size() != model.store.d()) throw InputError("input x has wrong dimension");
  double s = 0.0;
  for (const auto& w : draws) s += model.act.value(x.dot(w));
  return s / static_cast<double>(draws.size());
}

double index_fit(const GreedyBayesModel& model, int i, int k, const Vector& x) {
  const double beta = model.hyper.beta;
  double s = 0.0;
  for (int stage = 1; stage <= k; ++stage) {
    s += beta * std::pow(1.0 - beta, k - stage) * stage_mean_activation(model, i, stage, x);
  }
  return s;
}

double index_fit_recursive(const GreedyBayesModel& model, int i, int k, const Vector& x) {
  const double beta = model.hyper.beta;
  double f = 0.0;
  for (int stage = 1; stage <= k; ++stage) {
    f = (1.0 - beta) * f + beta * stage_mean_activation(model, i, stage, x);
  }
  return f;
}

double predict_at_stage(const GreedyBayesModel& model, int k, const Vector& x) {
  if (k < 0 || k > model.store.K()) throw InputError("stage out of range");
  if (x.size() != model.store.d()) {
    throw InputError("predict: x has length " + std::to_string(x.size()) + ", expected " +
                     std::to_string(model.store.d()));
  }
  if (k == 0) return 0.0;
  double s = 0.0;
  for (int i = 1; i <= model.store.n(); ++i) s += index_fit(model, i, k, x);
  return s / static_cast<double>(model.store.n());
}

double predict(const GreedyBayesModel& model, const Vector& x) {
  require_complete(model);
  return predict_at_stage(model, model.store.K(), x);
}

std::vector<double> training_curve(const GreedyBayesModel& model, const Dataset& ds) {
  require_complete(model);
  if (ds.d() != model.store.d()) throw InputError("training_curve: dataset dimension mismatch");
  std::vector<double> curve;
  curve.reserve(static_cast<std::size_t>(model.store.K()) + 1);
  Matrix fits = Matrix::Zero(model.store.n(), ds.n());
  curve.push_back(mse_of_average(fits, ds));
  for (int k = 1; k <= model.store.K(); ++k) {
    fits = (1.0 - model.hyper.beta) * fits +
           model.hyper.beta * stage_activation_table(model, k, ds);
    curve.push_back(mse_of_average(fits, ds));
  }
  return curve;
}

std::vector<Vector> residual_history(const GreedyBayesModel& model, const Dataset& ds) {
  require_complete(model);
  if (ds.n() != model.store.n()) throw InputError("residual_history: dataset size mismatch");
  std::vector<Vector> out;
  out.push_back(ds.y);
  Vector own_fit = Vector::Zero(ds.n());
  for (int k = 1; k <= model.store.K(); ++k) {
    for (int i = 1; i <= ds.n(); ++i) {
      own_fit(i - 1) = (1.0 - model.hyper.beta) * own_fit(i - 1) +
                       model.hyper.beta *
                           stage_mean_activation(model, i, k, ds.X.row(i - 1).transpose());
    }
    out.push_back(ds.y - (1.0 - model.hyper.beta) * own_fit);
  }
  return out;
}

}  // namespace lcc
