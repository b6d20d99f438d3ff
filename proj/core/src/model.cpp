// Copyright 2026 The lcc Authors
// SPDX-License-Identifier: Apache-2.0

#include "lcc/model.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "lcc/error.hpp"

namespace lcc {

std::string_view to_string(ActivationKind kind) noexcept {
  switch (kind) {
    case ActivationKind::tanh:
      return "tanh";
    case ActivationKind::squared_relu:
      return "squared_relu";
  }
  return "unknown";
}

ActivationKind parse_activation_kind(std::string_view name) {
  if (name == "tanh") return ActivationKind::tanh;
  if (name == "squared_relu") return ActivationKind::squared_relu;
  throw ConfigError("unknown activation kind '" + std::string(name) + "'");
}

double curvature_constant(ActivationKind kind) {
  switch (kind) {
    case ActivationKind::tanh:
      // |psi''| = 2 |tanh u| sech^2 u peaks where tanh^2 u = 1/3.
      return 4.0 / (3.0 * std::sqrt(3.0));
    case ActivationKind::squared_relu:
      return 2.0;
  }
  throw ConfigError("unsupported activation kind");
}

Activation::Activation(ActivationKind kind)
    : kind_(kind), c_(curvature_constant(kind)) {}

Activation Activation::with_curvature(ActivationKind kind, double c) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw ConfigError("activation curvature must be positive and finite");
  }
  return Activation(kind, c);
}

ActivationValue Activation::eval(double u) const {
  if (!std::isfinite(u)) throw InputError("activation input is not finite");
  return {value(u), first(u), second(u)};
}

ActivationValue activation_eval(const Activation& act, double u) {
  return act.eval(u);
}

std::string_view to_string(PriorVariant variant) noexcept {
  return variant == PriorVariant::gaussian ? "gaussian" : "uniform_l1";
}

PriorVariant parse_prior_variant(std::string_view name) {
  if (name == "uniform_l1") return PriorVariant::uniform_l1;
  if (name == "gaussian") return PriorVariant::gaussian;
  throw ConfigError("unknown prior variant '" + std::string(name) + "'");
}

PriorSpec PriorSpec::gaussian(double sigma0_sq) {
  if (!(sigma0_sq > 0.0) || !std::isfinite(sigma0_sq)) {
    throw ConfigError("prior.sigma0_sq must be positive and finite");
  }
  return {PriorVariant::gaussian, sigma0_sq};
}

double uniform_l1_coordinate_variance(int d) {
  const double dd = d;
  return 2.0 / ((dd + 1.0) * (dd + 2.0));
}

double uniform_l1_magnitude_variance(int d) {
  const double dd = d;
  return dd / ((dd + 1.0) * (dd + 1.0) * (dd + 2.0));
}

void HyperParams::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ConfigError("alpha must lie in (0, 1), got " + std::to_string(alpha));
  }
  if (!(beta > 0.0 && beta < 1.0)) {
    throw ConfigError("beta must lie in (0, 1), got " + std::to_string(beta));
  }
  if (K < 1) throw ConfigError("K must be a positive integer");
  if (L < 1) throw ConfigError("L must be a positive integer");
}

double HyperParams::default_alpha(int n) {
  if (n < 1) throw ConfigError("default alpha needs n >= 1");
  return 1.0 / std::sqrt(static_cast<double>(n));
}

CheckReport validate_dataset(const Dataset& ds, const PriorSpec& prior) {
  CheckReport report;
  report.check_name = "validate_dataset";
  std::ostringstream details;
  int violations = 0;
  constexpr int kMaxListed = 20;

  auto note = [&](const std::string& msg) {
    if (violations < kMaxListed) details << msg << "; ";
    ++violations;
  };

  if (ds.n() < 1) note("dataset has no rows");
  if (ds.d() < 1) note("dataset has no covariates");
  if (ds.y.size() != ds.X.rows()) {
    note("y has " + std::to_string(ds.y.size()) + " entries for " +
         std::to_string(ds.X.rows()) + " rows");
  }
  const bool bounded = prior.variant == PriorVariant::uniform_l1;
  for (Eigen::Index i = 0; i < ds.X.rows(); ++i) {
    for (Eigen::Index j = 0; j < ds.X.cols(); ++j) {
      const double v = ds.X(i, j);
      if (!std::isfinite(v)) {
        note("x(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ") not finite");
      } else if (bounded && std::abs(v) > 1.0) {
        note("x(" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
             ") = " + std::to_string(v) + " exceeds 1 in magnitude");
      }
    }
  }
  for (Eigen::Index i = 0; i < ds.y.size(); ++i) {
    if (!std::isfinite(ds.y(i))) note("y(" + std::to_string(i + 1) + ") not finite");
  }

  report.passed = violations == 0;
  report.margin = report.passed ? 0.0 : -static_cast<double>(violations);
  if (violations > kMaxListed) {
    details << "... " << (violations - kMaxListed) << " more";
  }
  report.details = report.passed ? "all dataset invariants hold" : details.str();
  return report;
}

ResidualState update_residuals(const ResidualState& state, const Vector& y,
                               double beta) {
  if (state.fits.size() != y.size()) {
    throw InputError("update_residuals: fits and y differ in length");
  }
  ResidualState out;
  out.fits = state.fits;
  out.residuals = y - (1.0 - beta) * state.fits;
  return out;
}

}  // namespace lcc
