// Copyright 2026 The lcc Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "lcc/dataset_io.hpp"
#include "lcc/error.hpp"
#include "lcc/model.hpp"
#include "support/generators.hpp"

namespace lcc {
namespace {

using testing::Gen;

TEST(Activation, TanhAtZero) {
  const auto v = activation_eval(Activation(ActivationKind::tanh), 0.0);
  EXPECT_EQ(v.value, 0.0);
  EXPECT_EQ(v.first_derivative, 1.0);
  EXPECT_EQ(v.second_derivative, 0.0);
}

TEST(Activation, SquaredReluNegativeHalfLine) {
  const auto v = activation_eval(Activation(ActivationKind::squared_relu), -1.0);
  EXPECT_EQ(v.value, 0.0);
  EXPECT_EQ(v.first_derivative, 0.0);
  EXPECT_EQ(v.second_derivative, 0.0);
}

TEST(Activation, SquaredReluSecondDerivativeAtZeroIsLeftValue) {
  const Activation a(ActivationKind::squared_relu);
  EXPECT_EQ(a.eval(0.0).second_derivative, 0.0);
  EXPECT_EQ(a.eval(1e-300).second_derivative, 2.0);
}

TEST(Activation, TanhCurvatureAtStationaryPoint) {
  const double u_star = std::atanh(1.0 / std::sqrt(3.0));
  const auto v = activation_eval(Activation(ActivationKind::tanh), u_star);
  EXPECT_NEAR(std::abs(v.second_derivative), 4.0 / (3.0 * std::sqrt(3.0)), 1e-14);
  EXPECT_NEAR(std::abs(v.second_derivative), 0.7698, 5e-5);
}

TEST(Activation, NonFiniteInputThrows) {
  const Activation a(ActivationKind::tanh);
  EXPECT_THROW(a.eval(std::numeric_limits<double>::quiet_NaN()), InputError);
  EXPECT_THROW(activation_eval(a, std::numeric_limits<double>::infinity()), InputError);
}

TEST(CurvatureConstant, SquaredRelu) { EXPECT_EQ(curvature_constant(ActivationKind::squared_relu), 2.0); }

TEST(CurvatureConstant, TanhMatchesGridMaximum) {
  // Golden-section maximization of |psi''| on [0, 2] agrees with the closed form.
  double a = 0.0, b = 2.0;
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  auto f = [](double u) { return std::abs(testing::ref_psi2(ActivationKind::tanh, u)); };
  for (int it = 0; it < 200; ++it) {
    const double c1 = b - phi * (b - a), c2 = a + phi * (b - a);
    if (f(c1) > f(c2)) {
      b = c2;
    } else {
      a = c1;
    }
  }
  EXPECT_NEAR(curvature_constant(ActivationKind::tanh), f(0.5 * (a + b)), 1e-12);
}

TEST(CurvatureConstant, DominatesDenseGrid) {
  for (auto kind : {ActivationKind::tanh, ActivationKind::squared_relu}) {
    const double c = curvature_constant(kind);
    double mx = 0.0;
    for (int k = 0; k < 1000000; ++k) {
      const double u = -10.0 + 20.0 * k / 999999.0;
      mx = std::max(mx, std::abs(testing::ref_psi2(kind, u)));
    }
    EXPECT_GE(c, mx) << to_string(kind);
    EXPECT_EQ(Activation(kind).curvature(), c);
  }
}

TEST(CurvatureConstant, BoundHoldsAtRandomPoints) {
  Gen gen(11);
  for (auto kind : {ActivationKind::tanh, ActivationKind::squared_relu}) {
    const Activation a(kind);
    for (int k = 0; k < 100000; ++k) {
      const double u = gen.normal() * 5.0;
      ASSERT_LE(std::abs(a.eval(u).second_derivative), a.curvature() + 1e-12);
    }
  }
}

TEST(Activation, DerivativesMatchFiniteDifferences) {
  Gen gen(12);
  for (auto kind : {ActivationKind::tanh, ActivationKind::squared_relu}) {
    const Activation a(kind);
    for (int k = 0; k < 1000; ++k) {
      double u = gen.uniform(-3.0, 3.0);
      if (std::abs(u) < 1e-3) u += 0.01;  // keep FD away from the ReLU kink
      const double h = 1e-5;
      const auto v = a.eval(u);
      const double d1 = (a.value(u + h) - a.value(u - h)) / (2 * h);
      const double d2 = (a.first(u + h) - a.first(u - h)) / (2 * h);
      EXPECT_NEAR(v.first_derivative, d1, 1e-6 * std::max(1.0, std::abs(d1)));
      EXPECT_NEAR(v.second_derivative, d2, 1e-6 * std::max(1.0, std::abs(d2)));
    }
  }
}

TEST(ActivationKind, ParseAndErrors) {
  EXPECT_EQ(parse_activation_kind("tanh"), ActivationKind::tanh);
  EXPECT_EQ(parse_activation_kind("squared_relu"), ActivationKind::squared_relu);
  EXPECT_THROW(parse_activation_kind("relu"), ConfigError);
  EXPECT_EQ(parse_prior_variant("gaussian"), PriorVariant::gaussian);
  EXPECT_THROW(parse_prior_variant("laplace"), ConfigError);
}

TEST(PriorSpec, GaussianRequiresPositiveVariance) {
  EXPECT_THROW(PriorSpec::gaussian(0.0), ConfigError);
  EXPECT_THROW(PriorSpec::gaussian(-1.0), ConfigError);
  EXPECT_TRUE(PriorSpec::gaussian(0.3).is_gaussian());
  EXPECT_FALSE(PriorSpec::uniform_l1().is_gaussian());
}

TEST(PriorSpec, UniformBallVarianceFormulas) {
  // Var(w_j) for d = 1 is that of U[-1, 1].
  EXPECT_DOUBLE_EQ(uniform_l1_coordinate_variance(1), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(uniform_l1_coordinate_variance(2), 1.0 / 6.0);
  EXPECT_DOUBLE_EQ(uniform_l1_magnitude_variance(2), 1.0 / 18.0);
  EXPECT_NEAR(uniform_l1_magnitude_variance(5), 5.0 / (36.0 * 7.0), 1e-15);
}

TEST(HyperParams, ValidationNamesField) {
  HyperParams h;
  h.alpha = 1.5;
  try {
    h.validate();
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("alpha"), std::string::npos);
  }
  h = HyperParams{};
  h.beta = 0.0;
  EXPECT_THROW(h.validate(), ConfigError);
  h = HyperParams{};
  h.K = 0;
  EXPECT_THROW(h.validate(), ConfigError);
  h = HyperParams{};
  h.L = 0;
  EXPECT_THROW(h.validate(), ConfigError);
  EXPECT_NO_THROW(HyperParams{}.validate());
  EXPECT_DOUBLE_EQ(HyperParams::default_alpha(100), 0.1);
}

TEST(UpdateResiduals, Examples) {
  const Vector y = (Vector(2) << 1.0, 2.0).finished();
  ResidualState s{Vector::Zero(2), Vector::Zero(2)};
  EXPECT_EQ(update_residuals(s, y, 0.3).residuals, y);
  s.fits = (Vector(2) << 1.0, 1.0).finished();
  EXPECT_EQ(update_residuals(s, y, 1.0).residuals, y);
  const auto r = update_residuals(s, y, 0.5).residuals;
  EXPECT_DOUBLE_EQ(r(0), 0.5);
  EXPECT_DOUBLE_EQ(r(1), 1.5);
}

TEST(UpdateResiduals, IdempotentAndLengthChecked) {
  Gen gen(3);
  for (int t = 0; t < 100; ++t) {
    const int n = gen.integer(1, 20);
    ResidualState s{gen.vector(n, -2, 2), gen.vector(n, -2, 2)};
    const Vector y = gen.vector(n, -2, 2);
    const double beta = gen.uniform(0.01, 0.99);
    const auto once = update_residuals(s, y, beta);
    const auto twice = update_residuals(once, y, beta);
    EXPECT_EQ(once.residuals, twice.residuals);
    EXPECT_EQ(once.fits, s.fits);
    for (int i = 0; i < n; ++i) EXPECT_EQ(once.residuals(i), y(i) - (1.0 - beta) * s.fits(i));
  }
  ResidualState s{Vector::Zero(3), Vector::Zero(3)};
  EXPECT_THROW(update_residuals(s, Vector::Zero(2), 0.5), InputError);
}

TEST(ValidateDataset, PriorSpecificBound) {
  Dataset ds{Matrix::Constant(3, 2, 0.5), Vector::Ones(3)};
  EXPECT_TRUE(validate_dataset(ds, PriorSpec::uniform_l1()).passed);
  ds.X(1, 0) = 1.5;
  const auto rep = validate_dataset(ds, PriorSpec::uniform_l1());
  EXPECT_FALSE(rep.passed);
  EXPECT_NE(rep.details.find("(2,1)"), std::string::npos) << rep.details;
  EXPECT_TRUE(validate_dataset(ds, PriorSpec::gaussian(1.0)).passed);
}

TEST(ValidateDataset, NonFiniteAndShape) {
  Dataset ds{Matrix::Zero(2, 2), Vector::Zero(2)};
  ds.y(0) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_FALSE(validate_dataset(ds, PriorSpec::gaussian(1.0)).passed);
  Dataset empty{Matrix::Zero(0, 2), Vector::Zero(0)};
  EXPECT_FALSE(validate_dataset(empty, PriorSpec::gaussian(1.0)).passed);
  Dataset mismatch{Matrix::Zero(2, 2), Vector::Zero(3)};
  EXPECT_FALSE(validate_dataset(mismatch, PriorSpec::gaussian(1.0)).passed);
}

TEST(DatasetCsv, RoundTripIsExact) {
  Gen gen(5);
  Dataset ds{gen.matrix(7, 3, -1, 1), gen.vector(7, -3, 3)};
  ds.X(0, 0) = 0.1;
  ds.y(0) = 1e-300;
  std::stringstream ss;
  write_dataset_csv(ss, ds);
  const Dataset back = read_dataset_csv(ss);
  EXPECT_EQ(back.X, ds.X);
  EXPECT_EQ(back.y, ds.y);
}

TEST(DatasetCsv, Rejections) {
  auto parse = [](const std::string& s) {
    std::istringstream in(s);
    return read_dataset_csv(in);
  };
  EXPECT_NO_THROW(parse("x1,x2,y\n0.1,0.2,1\n"));
  EXPECT_THROW(parse("x1,x2,y\n0.1,0.2\n"), DataError);
  EXPECT_THROW(parse("x1,x2,y\n0.1,0.2,1,4\n"), DataError);
  EXPECT_THROW(parse("a,b,y\n0.1,0.2,1\n"), DataError);
  EXPECT_THROW(parse("x1,x2,y\n0.1,abc,1\n"), DataError);
  EXPECT_THROW(parse("x1,x2,y\n"), DataError);
  EXPECT_THROW(parse(""), DataError);
  EXPECT_THROW(load_dataset_csv("/nonexistent/data.csv"), DataError);
}

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(-2.0), "-2");
  Gen gen(8);
  for (int k = 0; k < 1000; ++k) {
    const double v = gen.normal() * std::pow(10.0, gen.integer(-20, 20));
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
}

}  // namespace
}  // namespace lcc
