// Copyright 2026 The lcc Authors
// SPDX-License-Identifier: Apache-2.0

// Greedy Bayes: for k = 1..K and i = 1..n
//
//   p_{i,k}(w)  ∝  exp( alpha sum_{j<i} r_{j,k-1} psi(x_j . w) ) p0(w)
//   f_{i,k}(x)  =  (1 - beta) f_{i,k-1}(x) + beta E_{p_{i,k}}[psi(x . w)]
//   r_{i,k}     =  y_i - (1 - beta) f_{i,k}(x_i)
//
// with f_{i,0} = 0 and r_{i,0} = y_i. The estimator is the average
// f_K(x) = (1/n) sum_i f_{i,K}(x). Expectations are replaced by means over L
// stored draws, so every fit is reconstructed exactly from the sample store.

#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <utility>
#include <vector>

#include "lcc/densities.hpp"
#include "lcc/samplers.hpp"

namespace lcc {

// Draws of p_{i,k}, keyed by 1-based (i, k).
class SampleStore {
 public:
  SampleStore() = default;
  SampleStore(int n, int K, int L, int d);

  // Throws InputError when the list does not hold exactly L vectors of
  // dimension d, StateError when stage k - 1 is incomplete or (i, k) is out
  // of range or already present.
  void put(int i, int k, std::vector<Vector> draws);

  bool contains(int i, int k) const;
  // Throws StateError when absent.
  const std::vector<Vector>& at(int i, int k) const;

  bool stage_complete(int k) const;
  bool complete() const;  // every (i, k) for k <= K present
  std::size_t size() const noexcept { return lists_.size(); }

  int n() const noexcept { return n_; }
  int K() const noexcept { return K_; }
  int L() const noexcept { return L_; }
  int d() const noexcept { return d_; }

  const std::map<std::pair<int, int>, std::vector<Vector>>& lists() const noexcept {
    return lists_;
  }

 private:
  int n_ = 0;
  int K_ = 0;
  int L_ = 0;
  int d_ = 0;
  std::map<std::pair<int, int>, std::vector<Vector>> lists_;
  std::vector<int> per_stage_;
};

struct GreedyBayesModel {
  SampleStore store;
  HyperParams hyper;
  Activation act{ActivationKind::tanh};
  PriorSpec prior;
  // Training data; absent for models loaded from an archive.
  std::shared_ptr<const Dataset> dataset;
};

// Spec of p_{i,k}: rows 1..i-1 of X with residuals r_{j,k-1}.
// `residuals_prev` has length n. i = 1 yields a spec with no rows.
DensitySpec stage_posterior_spec(const Dataset& ds, const Vector& residuals_prev,
                                 int i, int k, const HyperParams& hyper,
                                 const Activation& act, const PriorSpec& prior);

struct FitOptions {
  // Called after each completed stage k with the training MSE of f_K at k.
  std::function<void(int k, double mse)> on_stage;
  unsigned threads = 1;
};

// Runs the recursion. Draw l of p_{i,k} uses seed stream_seed(cfg.seed,
// {i, k, l}). Throws StageError naming (i, k) on sampler failure.
GreedyBayesModel fit(const Dataset& ds, const HyperParams& hyper,
                     const Activation& act, const PriorSpec& prior,
                     const ChainConfig& cfg, const FitOptions& options = {});

// (1/L) sum_l psi(x . w_l) over store(i, k).
double stage_mean_activation(const GreedyBayesModel& model, int i, int k,
                             const Vector& x);

// f_{i,k}(x) = sum_{s<=k} beta (1-beta)^{k-s} meanpsi_{i,s}(x).
double index_fit(const GreedyBayesModel& model, int i, int k, const Vector& x);

// f_{i,k}(x) computed by iterating the update from f_{i,0} = 0.
double index_fit_recursive(const GreedyBayesModel& model, int i, int k,
                           const Vector& x);

// (1/n) sum_i f_{i,k}(x); k = 0 gives 0.
double predict_at_stage(const GreedyBayesModel& model, int k, const Vector& x);

// f_K(x). Throws StateError on an incomplete store, InputError on a
// dimension mismatch.
double predict(const GreedyBayesModel& model, const Vector& x);

// Training MSE (1/n) sum_i (y_i - f_K at stage k (x_i))^2 for k = 0..K.
std::vector<double> training_curve(const GreedyBayesModel& model, const Dataset& ds);

// r_{i,k} = y_i - (1 - beta) f_{i,k}(x_i) for every i, k = 0..K; entry
// [k](i) is 0-based in i.
std::vector<Vector> residual_history(const GreedyBayesModel& model, const Dataset& ds);

// Versioned text archive: a header line, a JSON metadata line, then the
// table `i,k,l,w1,...,wd` with round-trip exact decimals.
void write_model(std::ostream& out, const GreedyBayesModel& model);
GreedyBayesModel read_model(std::istream& in);
void save_model(const std::filesystem::path& path, const GreedyBayesModel& model);
GreedyBayesModel load_model(const std::filesystem::path& path);

}  // namespace lcc
