// Copyright 2026 The lcc Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <vector>

#include "lcc/densities.hpp"
#include "lcc/error.hpp"
#include "support/generators.hpp"

namespace lcc {
namespace {

using testing::Gen;

// Direct evaluation of g, independent of the library's vectorized form.
double ref_g(const DensitySpec& s, const Vector& w) {
  const double c = s.activation().curvature();
  double g = 0.0;
  for (int i = 0; i < s.rows(); ++i) {
    double u = 0.0;
    for (int j = 0; j < s.dim(); ++j) u += s.design()(i, j) * w(j);
    const double r = s.residuals()(i);
    g += s.alpha() * r * testing::ref_psi(s.activation().kind(), u) -
         0.5 * s.alpha() * c * std::abs(r) * u * u;
  }
  return g;
}

DensitySpec one_by_one(double x, double r, double alpha, PriorSpec prior,
                       ActivationKind kind = ActivationKind::tanh) {
  return DensitySpec(Matrix::Constant(1, 1, x), Vector::Constant(1, r), Activation(kind), alpha,
                     prior);
}

TEST(DensitySpec, ScaledDesignRows) {
  Gen gen(1);
  for (int t = 0; t < 50; ++t) {
    const auto s = gen.spec(gen.coin());
    const double c = s.activation().curvature();
    for (int i = 0; i < s.rows(); ++i) {
      const double scale = std::sqrt(s.alpha() * c * std::abs(s.residuals()(i)));
      EXPECT_EQ(s.row_scales()(i), scale);
      EXPECT_EQ(s.scaled_design().row(i), scale * s.design().row(i));
      EXPECT_NEAR(s.scaled_design().row(i).squaredNorm(),
                  s.alpha() * c * std::abs(s.residuals()(i)) * s.design().row(i).squaredNorm(),
                  1e-12);
    }
  }
}

TEST(DensitySpec, RejectsBadInputs) {
  const Activation a(ActivationKind::tanh);
  EXPECT_THROW(DensitySpec(Matrix::Zero(2, 1), Vector::Zero(3), a, 0.5, PriorSpec::uniform_l1()),
               InputError);
  Matrix bad = Matrix::Zero(1, 1);
  bad(0, 0) = NAN;
  EXPECT_THROW(DensitySpec(bad, Vector::Zero(1), a, 0.5, PriorSpec::uniform_l1()), InputError);
  EXPECT_THROW(DensitySpec(Matrix::Zero(1, 1), Vector::Zero(1), a, -0.1, PriorSpec::uniform_l1()),
               ConfigError);
  EXPECT_NO_THROW(DensitySpec(Matrix::Zero(0, 3), Vector::Zero(0), a, 0.5, PriorSpec::uniform_l1()));
}

TEST(GFunction, VanishesForZeroResiduals) {
  Gen gen(2);
  DensitySpec s(gen.matrix(4, 3, -1, 1), Vector::Zero(4), Activation(ActivationKind::tanh), 0.4,
                PriorSpec::uniform_l1());
  const auto e = g_value_grad_hess(s, gen.vector(3, -1, 1));
  EXPECT_EQ(e.value, 0.0);
  EXPECT_EQ(e.gradient, Vector::Zero(3));
  EXPECT_EQ(e.hessian, Matrix::Zero(3, 3));
}

TEST(GFunction, ZeroAtOriginForTanh) {
  Gen gen(3);
  const auto s = gen.spec(6, 3, ActivationKind::tanh, PriorSpec::uniform_l1());
  EXPECT_EQ(g_value_grad_hess(s, Vector::Zero(3)).value, 0.0);
}

TEST(GFunction, SymbolicOneByOne) {
  const auto s = one_by_one(1.0, 1.0, 0.5, PriorSpec::uniform_l1());
  const double c = 4.0 / (3.0 * std::sqrt(3.0));
  const Vector w = Vector::Constant(1, 0.3);
  EXPECT_NEAR(g_value_grad_hess(s, w).value, 0.5 * std::tanh(0.3) - 0.5 * c / 2.0 * 0.09, 1e-15);
}

TEST(GFunction, MatchesReferenceAndFiniteDifferences) {
  Gen gen(4);
  for (int t = 0; t < 100; ++t) {
    const auto s = gen.spec(gen.integer(1, 12), gen.integer(1, 6), gen.activation(),
                            PriorSpec::uniform_l1());
    const Vector w = gen.in_ball(s.dim());
    if (s.activation().kind() == ActivationKind::squared_relu &&
        (s.design() * w).cwiseAbs().minCoeff() < 1e-3) {
      continue;  // finite differences straddle the kink
    }
    const auto e = g_value_grad_hess(s, w);
    EXPECT_NEAR(e.value, ref_g(s, w), 1e-12 * std::max(1.0, std::abs(e.value)));
    auto f = [&](const Vector& v) { return ref_g(s, v); };
    // Unit floor: squared ReLU terms cancel exactly where r_i > 0 and u_i > 0.
    EXPECT_LE(testing::relative_error(e.gradient, testing::fd_gradient(f, w), 1.0), 1e-6);
    // Hessian by differencing the analytic gradient.
    Matrix H(s.dim(), s.dim());
    for (int j = 0; j < s.dim(); ++j) {
      Vector a = w, b = w;
      a(j) += 1e-6;
      b(j) -= 1e-6;
      H.col(j) = (g_value_grad_hess(s, a).gradient - g_value_grad_hess(s, b).gradient) / 2e-6;
    }
    if (s.activation().kind() == ActivationKind::tanh) {
      EXPECT_LE((H - e.hessian).norm(), 1e-5 * std::max(1.0, e.hessian.norm()));
    }
  }
}

TEST(GFunction, HessianNegativeSemidefinite) {
  Gen gen(5);
  for (int t = 0; t < 1000; ++t) {
    const auto s = gen.spec(gen.coin());
    const Vector w = gen.in_ball(s.dim());
    ASSERT_LE(max_symmetric_eigenvalue(g_value_grad_hess(s, w).hessian), 1e-10);
  }
}

TEST(LogTarget, OutsideBallIsLogZero) {
  Gen gen(6);
  const auto s = gen.spec(3, 2, ActivationKind::tanh, PriorSpec::uniform_l1());
  Vector w(2);
  w << 0.7, -0.5;
  EXPECT_EQ(log_target_unnorm(s, w), kLogZero);
  w << 0.5, -0.4;
  EXPECT_TRUE(std::isfinite(log_target_unnorm(s, w)));
}

TEST(LogTarget, AlphaZeroReducesToPrior) {
  Gen gen(7);
  DensitySpec s(gen.matrix(5, 2, -1, 1), gen.vector(5, -2, 2), Activation(ActivationKind::tanh),
                0.0, PriorSpec::gaussian(0.7));
  for (int t = 0; t < 20; ++t) {
    const Vector a = gen.gaussian_vector(2, 1.0), b = gen.gaussian_vector(2, 1.0);
    EXPECT_NEAR(log_target_unnorm(s, a) - log_target_unnorm(s, b),
                log_prior_unnorm(s.prior(), a) - log_prior_unnorm(s.prior(), b), 1e-12);
  }
}

TEST(LogTarget, DifferencesMatchDirectFormula) {
  const DensitySpec s((Matrix(2, 1) << 0.8, -0.6).finished(), (Vector(2) << 1.5, -0.7).finished(),
                      Activation(ActivationKind::tanh), 0.6, PriorSpec::gaussian(0.5));
  auto direct = [](double w) {
    return 0.6 * (1.5 * std::tanh(0.8 * w) - 0.7 * std::tanh(-0.6 * w)) - w * w / (2 * 0.5);
  };
  for (int k = 0; k < 10; ++k) {
    const double a = -2.0 + 0.4 * k;
    EXPECT_NEAR(log_target_unnorm(s, Vector::Constant(1, a)) -
                    log_target_unnorm(s, Vector::Constant(1, 0.1)),
                direct(a) - direct(0.1), 1e-12);
  }
}

TEST(ReverseConditional, XiZeroEqualsGPlusPrior) {
  Gen gen(8);
  for (int t = 0; t < 20; ++t) {
    const auto s = gen.spec(gen.coin());
    const Vector w = gen.in_ball(s.dim());
    const auto rc = log_reverse_conditional_unnorm(s, w, Vector::Zero(s.rows()));
    EXPECT_NEAR(rc.value, ref_g(s, w) + log_prior_unnorm(s.prior(), w), 1e-10);
  }
}

TEST(ReverseConditional, GradientMatchesFiniteDifferences) {
  Gen gen(9);
  for (int t = 0; t < 100; ++t) {
    const bool gaussian = gen.coin();
    const auto s = gen.spec(gen.integer(1, 10), gen.integer(1, 5), ActivationKind::tanh,
                            gen.prior(gaussian));
    const Vector w = gen.in_ball(s.dim(), 0.9);
    const Vector xi = gen.gaussian_vector(s.rows(), 1.5);
    const auto rc = log_reverse_conditional_unnorm(s, w, xi);
    auto f = [&](const Vector& v) {
      return ref_g(s, v) + (s.scaled_design() * v).dot(xi) +
             (gaussian ? -v.squaredNorm() / (2 * s.prior().sigma0_sq) : 0.0);
    };
    EXPECT_NEAR(rc.value, f(w), 1e-10 * std::max(1.0, std::abs(rc.value)));
    EXPECT_LE(testing::relative_error(rc.gradient, testing::fd_gradient(f, w)), 1e-6);
  }
}

TEST(ReverseConditional, ZeroResidualsGaussianIsPrior) {
  Gen gen(10);
  DensitySpec s(gen.matrix(3, 2, -1, 1), Vector::Zero(3), Activation(ActivationKind::tanh), 0.5,
                PriorSpec::gaussian(2.0));
  EXPECT_EQ(s.scaled_design(), Matrix::Zero(3, 2));
  const Vector w = gen.gaussian_vector(2, 1.0);
  const auto rc = log_reverse_conditional_unnorm(s, w, gen.gaussian_vector(3, 1.0));
  EXPECT_NEAR(rc.value, -w.squaredNorm() / 4.0, 1e-15);
  EXPECT_LE((rc.gradient + w / 2.0).norm(), 1e-15);
}

TEST(ReverseConditional, HessianExamples) {
  Gen gen(11);
  const Matrix X = gen.matrix(3, 2, -1, 1);
  DensitySpec u(X, Vector::Zero(3), Activation(ActivationKind::tanh), 0.5, PriorSpec::uniform_l1());
  EXPECT_EQ(reverse_conditional_hessian(u, gen.in_ball(2)), Matrix::Zero(2, 2));
  DensitySpec g = u.with_prior(PriorSpec::gaussian(0.25));
  EXPECT_LE((reverse_conditional_hessian(g, gen.in_ball(2)) + 4.0 * Matrix::Identity(2, 2)).norm(),
            1e-15);
}

TEST(ReverseConditional, HessianConcaveOnRandomSpecs) {
  Gen gen(12);
  for (int t = 0; t < 200; ++t) {
    const bool gaussian = gen.coin();
    const auto s = gen.spec(gaussian);
    const double thr = gaussian ? -1.0 / s.prior().sigma0_sq + 1e-10 : 1e-10;
    for (int k = 0; k < 5; ++k) {
      const Vector w = gaussian ? gen.gaussian_vector(s.dim(), 2.0) : gen.in_ball(s.dim());
      ASSERT_LE(max_symmetric_eigenvalue(reverse_conditional_hessian(s, w)), thr);
    }
  }
}

TEST(ReverseConditional, EvaluatorAgreesWithFreeFunctions) {
  Gen gen(13);
  for (int t = 0; t < 50; ++t) {
    const bool gaussian = gen.coin();
    const auto s = gen.spec(gen.integer(1, 10), gen.integer(1, 5), gen.activation(),
                            gen.prior(gaussian));
    const Vector xi = gen.gaussian_vector(s.rows(), 1.0);
    ReverseConditional rc(s, xi);
    const Vector w = gen.in_ball(s.dim(), 0.5);
    Vector grad(s.dim());
    const double v = rc.value_and_gradient(w, grad);
    const auto ref = log_reverse_conditional_unnorm(s, w, xi);
    EXPECT_NEAR(v, ref.value, 1e-10 * std::max(1.0, std::abs(v)));
    EXPECT_LE((grad - ref.gradient).norm(), 1e-10 * std::max(1.0, grad.norm()));
    const Vector dir = gen.in_ball(s.dim(), 0.3);
    rc.set_line(w, dir);
    for (double tt : {-0.5, 0.0, 0.4}) {
      const Vector p = w + tt * dir;
      EXPECT_NEAR(rc.line_value(tt), log_reverse_conditional_unnorm(s, p, xi).value,
                  1e-9 * std::max(1.0, std::abs(v)));
    }
  }
}

TEST(DimensionChecks, MismatchesThrow) {
  Gen gen(14);
  const auto s = gen.spec(3, 2, ActivationKind::tanh, PriorSpec::gaussian(1.0));
  EXPECT_THROW(g_value_grad_hess(s, Vector::Zero(3)), InputError);
  EXPECT_THROW(reverse_conditional_hessian(s, Vector::Zero(1)), InputError);
  EXPECT_THROW(log_reverse_conditional_unnorm(s, Vector::Zero(2), Vector::Zero(2)), InputError);
  EXPECT_THROW(xi_score(s, Vector::Zero(3), std::vector<Vector>{}), InputError);
  EXPECT_THROW(xi_hessian_diagnostic(s, std::vector<Vector>{Vector::Zero(2)}), InputError);
}

TEST(XiScore, Examples) {
  Gen gen(15);
  const Vector xi = gen.gaussian_vector(4, 1.0);
  DensitySpec zero(gen.matrix(4, 2, -1, 1), Vector::Zero(4), Activation(ActivationKind::tanh), 0.5,
                   PriorSpec::uniform_l1());
  std::vector<Vector> ws{gen.in_ball(2), gen.in_ball(2)};
  EXPECT_EQ(xi_score(zero, xi, ws), -xi);
  const auto s = gen.spec(4, 2, ActivationKind::tanh, PriorSpec::uniform_l1());
  EXPECT_EQ(xi_score(s, xi, std::vector<Vector>{Vector::Zero(2)}), -xi);
}

TEST(XiScore, LinearInSampleMean) {
  Gen gen(16);
  for (int t = 0; t < 50; ++t) {
    const auto s = gen.spec(gen.integer(1, 8), gen.integer(1, 4), ActivationKind::tanh,
                            PriorSpec::gaussian(1.0));
    const Vector xi = gen.gaussian_vector(s.rows(), 1.0);
    std::vector<Vector> ws, doubled;
    for (int m = 0; m < 5; ++m) {
      ws.push_back(gen.gaussian_vector(s.dim(), 1.0));
      doubled.push_back(2.0 * ws.back());
    }
    const Vector a = xi_score(s, xi, ws) + xi;
    const Vector b = xi_score(s, xi, doubled) + xi;
    EXPECT_LE((b - 2.0 * a).norm(), 1e-12 * std::max(1.0, a.norm()));
  }
}

TEST(XiHessianDiagnostic, DegenerateCases) {
  Gen gen(17);
  const auto s = gen.spec(3, 2, ActivationKind::tanh, PriorSpec::uniform_l1());
  const Vector w = gen.in_ball(2);
  std::vector<Vector> same(5, w);
  EXPECT_LE((xi_hessian_diagnostic(s, same) + Matrix::Identity(3, 3)).norm(), 1e-15);
  DensitySpec zero(s.design(), Vector::Zero(3), s.activation(), s.alpha(), s.prior());
  std::vector<Vector> ws{gen.in_ball(2), gen.in_ball(2), gen.in_ball(2)};
  EXPECT_EQ(xi_hessian_diagnostic(zero, ws), -Matrix::Identity(3, 3));
}

TEST(SampleCovariance, UnbiasedDenominator) {
  std::vector<Vector> xs{Vector::Constant(1, 1.0), Vector::Constant(1, 3.0)};
  EXPECT_DOUBLE_EQ(sample_covariance(xs)(0, 0), 2.0);
  EXPECT_THROW(sample_covariance(std::vector<Vector>{Vector::Zero(1)}), InputError);
}

TEST(MaxEigenvalue, Symmetrizes) {
  Matrix A(2, 2);
  A << 1.0, 2.0, 0.0, 1.0;  // symmetric part [[1,1],[1,1]]
  EXPECT_NEAR(max_symmetric_eigenvalue(A), 2.0, 1e-14);
}

TEST(GaussianThreshold, Formula) {
  const DensitySpec s((Matrix(2, 2) << 1.0, 0.0, 0.0, 0.5).finished(),
                      (Vector(2) << 2.0, -0.5).finished(), Activation(ActivationKind::squared_relu),
                      0.25, PriorSpec::gaussian(1.0));
  // alpha c ||r||_inf lambda_max = 0.25 * 2 * 2 * 1
  EXPECT_DOUBLE_EQ(gaussian_variance_threshold(s), 1.0);
  EXPECT_DOUBLE_EQ(s.lambda_max(), 1.0);
  EXPECT_DOUBLE_EQ(s.weighted_lambda_max(), 2.0);
}

TEST(BrascampLieb, FactorsAndReconstruction) {
  Gen gen(18);
  for (int t = 0; t < 30; ++t) {
    const int n = gen.integer(2, 10), d = gen.integer(1, 6);
    auto s = gen.spec(n, d, gen.activation(), PriorSpec::gaussian(1.0));
    s = s.with_prior(PriorSpec::gaussian(gaussian_variance_threshold(s)));
    const Vector w = gen.gaussian_vector(d, 1.0);
    const auto m = build_bl_matrices(s, w);
    const Matrix rec = m.U * m.Lambda.asDiagonal() * m.V.transpose();
    EXPECT_LE((s.design() - rec).norm(), 1e-8 * s.design().norm());
    EXPECT_NEAR(m.lambda_max, s.lambda_max(), 1e-10 * std::max(1.0, s.lambda_max()));
    const Vector absr = s.residuals().cwiseAbs();
    const double ac = s.alpha() * s.activation().curvature();
    EXPECT_LE((m.A - (ac * absr).cwiseSqrt().asDiagonal() * m.U).norm(), 1e-12);
    EXPECT_LE((m.B - m.U.transpose() * (ac * absr).asDiagonal() * m.U).norm(), 1e-12);
    // C(w) <= alpha c ||r||_inf I
    EXPECT_LE(max_symmetric_eigenvalue(m.C_of_w), ac * s.residual_sup() + 1e-8);
    if (m.bound.size() > 0) EXPECT_LE(max_symmetric_eigenvalue(m.bound), 1e-8);
  }
}

TEST(BrascampLieb, ZeroCurvatureGivesZeroC) {
  const DensitySpec s((Matrix(2, 1) << 1.0, 0.5).finished(), (Vector(2) << 1.0, -1.0).finished(),
                      Activation(ActivationKind::squared_relu), 0.5, PriorSpec::gaussian(0.5));
  const auto m = build_bl_matrices(s, Vector::Constant(1, -0.7));  // both x_i.w < 0
  EXPECT_EQ(m.C_of_w, Matrix::Zero(m.C_of_w.rows(), m.C_of_w.cols()));
}

TEST(BrascampLieb, RankDeficientDesignIsDegenerate) {
  Matrix X(3, 2);
  X << 1.0, 0.5, 0.5, 0.25, -0.2, -0.1;  // rank one
  const DensitySpec s(X, (Vector(3) << 1.0, 0.0, -1.0).finished(),
                      Activation(ActivationKind::tanh), 0.5, PriorSpec::gaussian(0.5));
  const auto m = build_bl_matrices(s, Vector::Constant(2, 0.1));
  EXPECT_TRUE(m.degenerate);
  EXPECT_EQ(m.rank, 1);
  EXPECT_TRUE(m.bound.allFinite());
}

}  // namespace
}  // namespace lcc
