// Copyright 2026 The lcc Authors
// SPDX-License-Identifier: Apache-2.0

// Log-densities of the coupled pair (w, xi) where
//
//   xi_i = (alpha c |r_i|)^{1/2} x_i . w + Z_i,   Z_i ~ N(0, 1).
//
// With g(w) = sum_i alpha r_i psi(x_i.w) - (alpha c |r_i| / 2)(x_i.w)^2 the
// reverse conditional is log p(w | xi) = g(w) + (S w).xi + log p0(w) + const,
// S = (alpha c |R|)^{1/2} X being the scaled design. Every log-density here is
// unnormalized; only differences and gradients are meaningful.

#pragma once

#include <limits>
#include <span>
#include <vector>

#include "lcc/model.hpp"

namespace lcc {

inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();

// Frozen inputs of one Greedy Bayes posterior. Immutable after construction.
class DensitySpec {
 public:
  // Throws InputError on shape mismatch or non-finite inputs, ConfigError
  // on alpha < 0. A spec with zero rows is valid: its target is the prior.
  DensitySpec(Matrix X, Vector r, Activation act, double alpha,
              PriorSpec prior);

  const Matrix& design() const noexcept { return X_; }
  const Vector& residuals() const noexcept { return r_; }
  const Activation& activation() const noexcept { return act_; }
  double alpha() const noexcept { return alpha_; }
  const PriorSpec& prior() const noexcept { return prior_; }

  // Row i is (alpha c |r_i|)^{1/2} x_i.
  const Matrix& scaled_design() const noexcept { return scaled_; }
  // (alpha c |r_i|)^{1/2}.
  const Vector& row_scales() const noexcept { return row_scale_; }

  int rows() const noexcept { return static_cast<int>(X_.rows()); }
  int dim() const noexcept { return static_cast<int>(X_.cols()); }
  double residual_sup() const noexcept { return r_inf_; }
  // Largest eigenvalue of X^T X (0 with no rows).
  double lambda_max() const noexcept { return lambda_max_; }
  // Largest eigenvalue of X^T |R| X; bounds the curvature of g by 2 alpha c.
  double weighted_lambda_max() const noexcept { return weighted_lambda_max_; }

  // Same data with the prior replaced.
  DensitySpec with_prior(PriorSpec prior) const;

 private:
  Matrix X_;
  Vector r_;
  Activation act_;
  double alpha_;
  PriorSpec prior_;
  Matrix scaled_;
  Vector row_scale_;
  double r_inf_ = 0.0;
  double lambda_max_ = 0.0;
  double weighted_lambda_max_ = 0.0;
};

// Sigma0^2 at which the small-variance condition for the xi marginal is tight:
// 1 / (alpha c ||r||_inf lambda_max). Infinite when the product vanishes.
double gaussian_variance_threshold(const DensitySpec& spec);

struct GEvaluation {
  double value;
  Vector gradient;
  Matrix hessian;
};

// g, its gradient and Hessian alpha sum_i |r_i| (sign(r_i) psi'' - c) x_i x_i^T.
GEvaluation g_value_grad_hess(const DensitySpec& spec, const Vector& w);

// log p0(w) up to a constant: 0 / -inf for the l1 ball, -||w||^2/(2 sigma0^2).
double log_prior_unnorm(const PriorSpec& prior, const Vector& w);

// alpha sum_i r_i psi(x_i.w) + log p0(w); kLogZero outside the l1 ball.
double log_target_unnorm(const DensitySpec& spec, const Vector& w);

struct ValueGradient {
  double value;
  Vector gradient;
};

// g(w) + (S w).xi + log p0(w) and its gradient in w (the gradient is that of
// the smooth part; the l1 ball contributes no gradient in its interior).
ValueGradient log_reverse_conditional_unnorm(const DensitySpec& spec,
                                             const Vector& w, const Vector& xi);

// Hessian of log p(w | xi): Hessian of g plus -I/sigma0^2 for the gaussian
// prior. Independent of xi.
Matrix reverse_conditional_hessian(const DensitySpec& spec, const Vector& w);

// Monte Carlo score of the xi marginal: -xi + mean_m S w^(m).
Vector xi_score(const DensitySpec& spec, const Vector& xi,
                std::span<const Vector> w_samples);

// -I + empirical Cov[S w] over the samples (denominator M - 1).
Matrix xi_hessian_diagnostic(const DensitySpec& spec,
                             std::span<const Vector> w_samples);

// Empirical covariance with denominator M - 1. Throws on fewer than 2 samples.
Matrix sample_covariance(std::span<const Vector> samples);

// Largest eigenvalue of (A + A^T)/2.
double max_symmetric_eigenvalue(const Matrix& A);

// Matrices of the Brascamp-Lieb bound on the Hessian of log p(xi).
//
// With X = U Lambda V^T (thin SVD), A = (alpha c |R|)^{1/2} U,
// B = U^T (alpha c |R|) U, S(w) = diag(psi''(x_i.w)) and
// C(w) = alpha U^T R S(w) U, the bracketed term is
//
//   -B^{-1} + (Lambda^{-2} / sigma0^2 - C(w) + B)^{-1}.
//
// When X or B is rank deficient the term is evaluated on the subspace where
// both are invertible and `degenerate` is set.
struct BrascampLiebMatrices {
  Matrix U;
  Vector Lambda;  // singular values, descending
  Matrix V;
  double lambda_max = 0.0;  // largest squared singular value
  Matrix A;
  Matrix B;
  Vector S_of_w;  // diagonal of S(w)
  Matrix C_of_w;
  bool degenerate = false;
  int rank = 0;
  // Orthonormal basis (columns, in U coordinates) of the subspace the bound
  // is evaluated on; identity when not degenerate.
  Matrix subspace;
  // Bracketed term at the spec's sigma0^2 (gaussian prior only; empty
  // otherwise).
  Matrix bound;
};

BrascampLiebMatrices build_bl_matrices(const DensitySpec& spec, const Vector& w);

// The bracketed term for an arbitrary prior variance, reusing the factors.
Matrix bl_bound_term(const BrascampLiebMatrices& m, double sigma0_sq);

// Reverse conditional at a fixed xi, specialised for the samplers: keeps
// scratch buffers, so one instance must not be shared between threads.
class ReverseConditional {
 public:
  ReverseConditional(const DensitySpec& spec, const Vector& xi);

  const DensitySpec& spec() const noexcept { return *spec_; }

  // Smooth part g(w) + lin.w - ||w||^2/(2 sigma0^2) (gaussian) and its
  // gradient. Ignores the l1 support.
  double value_and_gradient(const Vector& w, Vector& gradient);

  // Prepares the restriction t -> log p(w + t v | xi) (smooth part).
  void set_line(const Vector& w, const Vector& v);
  double line_value(double t) const;

 private:
  const DensitySpec* spec_;
  Vector lin_;    // S^T xi
  Vector coeff_;  // alpha r_i
  Vector quad_;   // alpha c |r_i|
  Vector u_;
  Vector du_;
  Vector line_a_;
  Vector line_b_;
  double line_lin0_ = 0.0;
  double line_lin1_ = 0.0;
  double line_w2_ = 0.0;
  double line_wv_ = 0.0;
  double line_v2_ = 0.0;
};

}  // namespace lcc
