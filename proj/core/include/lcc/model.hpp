// Copyright 2026 The lcc Authors
// SPDX-License-Identifier: Apache-2.0

// Data, activations, priors, hyperparameters and residual bookkeeping for
// the Greedy Bayes posterior
//
//   p(w)  ∝  exp( alpha * sum_i r_i psi(x_i . w) ) p0(w).

#pragma once

#include <cmath>
#include <string_view>

#include <Eigen/Dense>

#include "lcc/check_report.hpp"

namespace lcc {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class ActivationKind { tanh, squared_relu };

std::string_view to_string(ActivationKind kind) noexcept;
// Throws ConfigError on unknown names.
ActivationKind parse_activation_kind(std::string_view name);

// Tight uniform bound on |psi''| for the kind: 4/(3 sqrt 3) for tanh, 2 for
// the squared ReLU.
double curvature_constant(ActivationKind kind);

struct ActivationValue {
  double value;
  double first_derivative;
  double second_derivative;
};

class Activation {
 public:
  // Activation with the tight curvature constant.
  explicit Activation(ActivationKind kind);

  // Activation with an arbitrary curvature constant. Values below the tight
  // bound break concavity of the reverse conditional; only negative controls
  // should do that.
  static Activation with_curvature(ActivationKind kind, double c);

  ActivationKind kind() const noexcept { return kind_; }
  double curvature() const noexcept { return c_; }

  // Throws InputError on non-finite u.
  ActivationValue eval(double u) const;

  // Unchecked hot-path evaluations.
  double value(double u) const noexcept {
    if (kind_ == ActivationKind::tanh) return std::tanh(u);
    return u > 0.0 ? u * u : 0.0;
  }
  double first(double u) const noexcept {
    if (kind_ == ActivationKind::tanh) {
      const double t = std::tanh(u);
      return 1.0 - t * t;
    }
    return u > 0.0 ? 2.0 * u : 0.0;
  }
  // psi'' of the squared ReLU at 0 is taken as the left value 0.
  double second(double u) const noexcept {
    if (kind_ == ActivationKind::tanh) {
      const double t = std::tanh(u);
      return -2.0 * t * (1.0 - t * t);
    }
    return u > 0.0 ? 2.0 : 0.0;
  }

 private:
  Activation(ActivationKind kind, double c) : kind_(kind), c_(c) {}

  ActivationKind kind_;
  double c_;
};

// Free-function form of Activation::eval.
ActivationValue activation_eval(const Activation& act, double u);

enum class PriorVariant { uniform_l1, gaussian };

std::string_view to_string(PriorVariant variant) noexcept;
PriorVariant parse_prior_variant(std::string_view name);

// Uniform on C = {w : ||w||_1 <= 1}, or N(0, sigma0_sq I).
struct PriorSpec {
  PriorVariant variant = PriorVariant::uniform_l1;
  double sigma0_sq = 1.0;

  static PriorSpec uniform_l1() { return {PriorVariant::uniform_l1, 1.0}; }
  // Throws ConfigError unless sigma0_sq > 0 and finite.
  static PriorSpec gaussian(double sigma0_sq);

  bool is_gaussian() const noexcept { return variant == PriorVariant::gaussian; }
};

// Per-coordinate variance of the uniform distribution on the unit l1 ball in
// dimension d, 2 / ((d+1)(d+2)); coordinates are uncorrelated.
double uniform_l1_coordinate_variance(int d);

// Variance of |w_j| under the same distribution, d / ((d+1)^2 (d+2)): the
// Beta(1, d) variance of one Dirichlet(1, ..., 1) component.
double uniform_l1_magnitude_variance(int d);

struct HyperParams {
  double alpha = 0.5;
  double beta = 0.2;
  int K = 1;
  int L = 200;

  // Throws ConfigError naming the offending field.
  void validate() const;

  // alpha = n^{-1/2}.
  static double default_alpha(int n);
};

struct Dataset {
  Matrix X;  // n x d
  Vector y;  // n

  int n() const noexcept { return static_cast<int>(X.rows()); }
  int d() const noexcept { return static_cast<int>(X.cols()); }
};

// Passes iff n, d >= 1, shapes agree, every entry is finite and, for the
// uniform prior, every |x_ij| <= 1. Violating entries are listed in details.
CheckReport validate_dataset(const Dataset& ds, const PriorSpec& prior);

struct ResidualState {
  Vector fits;
  Vector residuals;
};

// r_i = y_i - (1 - beta) fits_i. Throws InputError on length mismatch.
ResidualState update_residuals(const ResidualState& state, const Vector& y,
                               double beta);

}  // namespace lcc
