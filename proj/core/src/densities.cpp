// Copyright 2026 The lcc Authors
// SPDX-License-Identifier: Apache-2.0

#include "lcc/densities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lcc/error.hpp"

namespace lcc {
namespace {

void require_dim(const DensitySpec& spec, const Vector& w, const char* where) {
  if (w.size() != spec.dim()) {
    throw InputError(std::string(where) + ": w has length " +
                     std::to_string(w.size()) + ", expected " +
                     std::to_string(spec.dim()));
  }
}

void require_xi(const DensitySpec& spec, const Vector& xi, const char* where) {
  if (xi.size() != spec.rows()) {
    throw InputError(std::string(where) + ": xi has length " +
                     std::to_string(xi.size()) + ", expected " +
                     std::to_string(spec.rows()));
  }
}

Matrix symmetrized(const Matrix& A) { return 0.5 * (A + A.transpose()); }

}  // namespace

DensitySpec::DensitySpec(Matrix X, Vector r, Activation act, double alpha,
                         PriorSpec prior)
    : X_(std::move(X)),
      r_(std::move(r)),
      act_(act),
      alpha_(alpha),
      prior_(prior) {
  if (X_.rows() != r_.size()) {
    throw InputError("DensitySpec: design has " + std::to_string(X_.rows()) +
                     " rows but " + std::to_string(r_.size()) + " residuals");
  }
  if (X_.cols() < 1) throw InputError("DensitySpec: dimension must be >= 1");
  if (!X_.allFinite() || !r_.allFinite()) {
    throw InputError("DensitySpec: non-finite design or residual entry");
  }
  if (!(alpha_ >= 0.0) || !std::isfinite(alpha_)) {
    throw ConfigError("DensitySpec: alpha must be finite and non-negative");
  }
  if (prior_.is_gaussian() && !(prior_.sigma0_sq > 0.0)) {
    throw ConfigError("DensitySpec: sigma0_sq must be positive");
  }

  const double c = act_.curvature();
  row_scale_ = (alpha_ * c * r_.cwiseAbs()).cwiseSqrt();
  scaled_ = row_scale_.asDiagonal() * X_;
  r_inf_ = r_.size() > 0 ? r_.cwiseAbs().maxCoeff() : 0.0;

  if (X_.rows() > 0) {
    const Matrix gram = X_.transpose() * X_;
    lambda_max_ = max_symmetric_eigenvalue(gram);
    const Matrix weighted = X_.transpose() * r_.cwiseAbs().asDiagonal() * X_;
    weighted_lambda_max_ = std::max(0.0, max_symmetric_eigenvalue(weighted));
  }
}

DensitySpec DensitySpec::with_prior(PriorSpec prior) const {
  return DensitySpec(X_, r_, act_, alpha_, prior);
}

double gaussian_variance_threshold(const DensitySpec& spec) {
  const double denom = spec.alpha() * spec.activation().curvature() *
                       spec.residual_sup() * spec.lambda_max();
  if (!(denom > 0.0)) return std::numeric_limits<double>::infinity();
  return 1.0 / denom;
}

GEvaluation g_value_grad_hess(const DensitySpec& spec, const Vector& w) {
  require_dim(spec, w, "g_value_grad_hess");
  const int d = spec.dim();
  const double alpha = spec.alpha();
  const double c = spec.activation().curvature();
  const auto& act = spec.activation();
  const auto& X = spec.design();
  const auto& r = spec.residuals();

  GEvaluation out{0.0, Vector::Zero(d), Matrix::Zero(d, d)};
  for (int i = 0; i < spec.rows(); ++i) {
    const double u = X.row(i).dot(w);
    const double ar = std::abs(r(i));
    out.value += alpha * r(i) * act.value(u) - 0.5 * alpha * c * ar * u * u;
    out.gradient.noalias() +=
        (alpha * r(i) * act.first(u) - alpha * c * ar * u) * X.row(i).transpose();
    const double sign = r(i) > 0.0 ? 1.0 : (r(i) < 0.0 ? -1.0 : 0.0);
    const double weight = alpha * ar * (sign * act.second(u) - c);
    out.hessian.noalias() += weight * X.row(i).transpose() * X.row(i);
  }
  return out;
}

double log_prior_unnorm(const PriorSpec& prior, const Vector& w) {
  if (prior.is_gaussian()) return -0.5 * w.squaredNorm() / prior.sigma0_sq;
  return w.lpNorm<1>() <= 1.0 ? 0.0 : kLogZero;
}

double log_target_unnorm(const DensitySpec& spec, const Vector& w) {
  require_dim(spec, w, "log_target_unnorm");
  const double lp = log_prior_unnorm(spec.prior(), w);
  if (lp == kLogZero) return kLogZero;
  const auto& act = spec.activation();
  const Vector u = spec.design() * w;
  double s = 0.0;
  for (int i = 0; i < spec.rows(); ++i) s += spec.residuals()(i) * act.value(u(i));
  return spec.alpha() * s + lp;
}

ValueGradient log_reverse_conditional_unnorm(const DensitySpec& spec,
                                             const Vector& w, const Vector& xi) {
  require_dim(spec, w, "log_reverse_conditional_unnorm");
  require_xi(spec, xi, "log_reverse_conditional_unnorm");
  GEvaluation g = g_value_grad_hess(spec, w);
  const Vector lin = spec.scaled_design().transpose() * xi;
  ValueGradient out{g.value + lin.dot(w), g.gradient + lin};
  if (spec.prior().is_gaussian()) {
    out.value += log_prior_unnorm(spec.prior(), w);
    out.gradient -= w / spec.prior().sigma0_sq;
  } else if (w.lpNorm<1>() > 1.0) {
    out.value = kLogZero;
  }
  return out;
}

Matrix reverse_conditional_hessian(const DensitySpec& spec, const Vector& w) {
  require_dim(spec, w, "reverse_conditional_hessian");
  Matrix H = g_value_grad_hess(spec, w).hessian;
  if (spec.prior().is_gaussian()) {
    H.diagonal().array() -= 1.0 / spec.prior().sigma0_sq;
  }
  return H;
}

Vector xi_score(const DensitySpec& spec, const Vector& xi,
                std::span<const Vector> w_samples) {
  require_xi(spec, xi, "xi_score");
  if (w_samples.empty()) throw InputError("xi_score: no samples");
  Vector mean = Vector::Zero(spec.dim());
  for (const auto& w : w_samples) {
    require_dim(spec, w, "xi_score");
    mean += w;
  }
  mean /= static_cast<double>(w_samples.size());
  return -xi + spec.scaled_design() * mean;
}

Matrix sample_covariance(std::span<const Vector> samples) {
  if (samples.size() < 2) throw InputError("covariance needs at least 2 samples");
  const Eigen::Index d = samples.front().size();
  Vector mean = Vector::Zero(d);
  for (const auto& s : samples) {
    if (s.size() != d) throw InputError("covariance: ragged samples");
    mean += s;
  }
  mean /= static_cast<double>(samples.size());
  Matrix cov = Matrix::Zero(d, d);
  for (const auto& s : samples) {
    const Vector c = s - mean;
    cov.noalias() += c * c.transpose();
  }
  return cov / static_cast<double>(samples.size() - 1);
}

Matrix xi_hessian_diagnostic(const DensitySpec& spec,
                             std::span<const Vector> w_samples) {
  if (w_samples.size() < 2) {
    throw InputError("xi_hessian_diagnostic: need at least 2 samples");
  }
  std::vector<Vector> z;
  z.reserve(w_samples.size());
  for (const auto& w : w_samples) {
    require_dim(spec, w, "xi_hessian_diagnostic");
    z.push_back(spec.scaled_design() * w);
  }
  const int n = spec.rows();
  if (n == 0) return Matrix(0, 0);
  Matrix H = sample_covariance(z);
  H.diagonal().array() -= 1.0;
  return H;
}

double max_symmetric_eigenvalue(const Matrix& A) {
  if (A.rows() == 0) return -std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(A),
                                           Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

BrascampLiebMatrices build_bl_matrices(const DensitySpec& spec, const Vector& w) {
  require_dim(spec, w, "build_bl_matrices");
  if (spec.rows() == 0) throw InputError("build_bl_matrices: spec has no rows");
  const auto& X = spec.design();
  const auto& r = spec.residuals();
  const auto& act = spec.activation();
  const double alpha = spec.alpha();
  const double c = act.curvature();

  BrascampLiebMatrices m;
  Eigen::JacobiSVD<Matrix> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
  m.U = svd.matrixU();
  m.Lambda = svd.singularValues();
  m.V = svd.matrixV();
  m.lambda_max = m.Lambda.size() > 0 ? m.Lambda(0) * m.Lambda(0) : 0.0;

  const double sv_tol = 1e-12 * std::max<double>(X.rows(), X.cols()) *
                        (m.Lambda.size() > 0 ? m.Lambda(0) : 0.0);
  int rank_x = 0;
  for (Eigen::Index k = 0; k < m.Lambda.size(); ++k) {
    if (m.Lambda(k) > sv_tol) ++rank_x;
  }

  const Vector abs_weights = alpha * c * r.cwiseAbs();
  m.A = abs_weights.cwiseSqrt().asDiagonal() * m.U;
  m.B = m.U.transpose() * abs_weights.asDiagonal() * m.U;
  m.S_of_w.resize(spec.rows());
  const Vector u = X * w;
  for (int i = 0; i < spec.rows(); ++i) m.S_of_w(i) = act.second(u(i));
  m.C_of_w = alpha * m.U.transpose() * r.cwiseProduct(m.S_of_w).asDiagonal() * m.U;

  // Restrict to the nonzero singular directions of X, then to the range of B.
  const Matrix Br = m.B.topLeftCorner(rank_x, rank_x);
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(Br));
  const double b_scale = rank_x > 0 ? std::max(1.0, es.eigenvalues().maxCoeff()) : 1.0;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
    if (es.eigenvalues()(k) > 1e-12 * b_scale) keep.push_back(k);
  }
  m.rank = static_cast<int>(keep.size());
  m.degenerate = m.rank < spec.dim() || rank_x < m.Lambda.size();
  if (static_cast<int>(keep.size()) == rank_x && rank_x == m.Lambda.size()) {
    m.subspace = Matrix::Identity(rank_x, rank_x);
  } else {
    m.subspace.resize(rank_x, static_cast<Eigen::Index>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k) {
      m.subspace.col(static_cast<Eigen::Index>(k)) = es.eigenvectors().col(keep[k]);
    }
  }

  if (spec.prior().is_gaussian()) m.bound = bl_bound_term(m, spec.prior().sigma0_sq);
  return m;
}

Matrix bl_bound_term(const BrascampLiebMatrices& m, double sigma0_sq) {
  if (!(sigma0_sq > 0.0)) throw InputError("bl_bound_term: sigma0_sq must be positive");
  const Eigen::Index rank_x = m.subspace.rows();
  const Matrix& Q = m.subspace;
  if (Q.cols() == 0) return Matrix(0, 0);

  Matrix inner = m.B.topLeftCorner(rank_x, rank_x) -
                 m.C_of_w.topLeftCorner(rank_x, rank_x);
  for (Eigen::Index k = 0; k < rank_x; ++k) {
    inner(k, k) += 1.0 / (sigma0_sq * m.Lambda(k) * m.Lambda(k));
  }
  const Matrix Bq = symmetrized(Q.transpose() * m.B.topLeftCorner(rank_x, rank_x) * Q);
  const Matrix Mq = symmetrized(Q.transpose() * inner * Q);
  const Eigen::Index k = Q.cols();
  const Matrix I = Matrix::Identity(k, k);
  const Matrix term = -Bq.ldlt().solve(I) + Mq.fullPivLu().solve(I);
  return symmetrized(term);
}

ReverseConditional::ReverseConditional(const DensitySpec& spec, const Vector& xi)
    : spec_(&spec) {
  require_xi(spec, xi, "ReverseConditional");
  lin_ = spec.scaled_design().transpose() * xi;
  coeff_ = spec.alpha() * spec.residuals();
  quad_ = spec.alpha() * spec.activation().curvature() * spec.residuals().cwiseAbs();
  u_.resize(spec.rows());
  du_.resize(spec.rows());
  line_a_.resize(spec.rows());
  line_b_.resize(spec.rows());
}

double ReverseConditional::value_and_gradient(const Vector& w, Vector& gradient) {
  const DensitySpec& spec = *spec_;
  const int n = spec.rows();
  u_.noalias() = spec.design() * w;
  double value = lin_.dot(w);
  if (spec.activation().kind() == ActivationKind::tanh) {
    for (int i = 0; i < n; ++i) {
      const double t = std::tanh(u_(i));
      value += coeff_(i) * t - 0.5 * quad_(i) * u_(i) * u_(i);
      du_(i) = coeff_(i) * (1.0 - t * t) - quad_(i) * u_(i);
    }
  } else {
    for (int i = 0; i < n; ++i) {
      const double ui = u_(i);
      const double pos = ui > 0.0 ? ui : 0.0;
      value += coeff_(i) * pos * pos - 0.5 * quad_(i) * ui * ui;
      du_(i) = 2.0 * coeff_(i) * pos - quad_(i) * ui;
    }
  }
  gradient.noalias() = spec.design().transpose() * du_;
  gradient += lin_;
  if (spec.prior().is_gaussian()) {
    const double inv = 1.0 / spec.prior().sigma0_sq;
    value -= 0.5 * inv * w.squaredNorm();
    gradient -= inv * w;
  }
  return value;
}

void ReverseConditional::set_line(const Vector& w, const Vector& v) {
  line_a_.noalias() = spec_->design() * w;
  line_b_.noalias() = spec_->design() * v;
  line_lin0_ = lin_.dot(w);
  line_lin1_ = lin_.dot(v);
  line_w2_ = w.squaredNorm();
  line_wv_ = w.dot(v);
  line_v2_ = v.squaredNorm();
}

double ReverseConditional::line_value(double t) const {
  const DensitySpec& spec = *spec_;
  const int n = spec.rows();
  double value = line_lin0_ + t * line_lin1_;
  if (spec.activation().kind() == ActivationKind::tanh) {
    for (int i = 0; i < n; ++i) {
      const double u = line_a_(i) + t * line_b_(i);
      value += coeff_(i) * std::tanh(u) - 0.5 * quad_(i) * u * u;
    }
  } else {
    for (int i = 0; i < n; ++i) {
      const double u = line_a_(i) + t * line_b_(i);
      const double pos = u > 0.0 ? u : 0.0;
      value += coeff_(i) * pos * pos - 0.5 * quad_(i) * u * u;
    }
  }
  if (spec.prior().is_gaussian()) {
    value -= 0.5 * (line_w2_ + 2.0 * t * line_wv_ + t * t * line_v2_) /
             spec.prior().sigma0_sq;
  }
  return value;
}

}  // namespace lcc
