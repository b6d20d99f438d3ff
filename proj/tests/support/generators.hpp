// Copyright 2026 The lcc Authors
// SPDX-License-Identifier: Apache-2.0

// Hand-rolled generators for property tests and independent reference
// implementations shared by the test binaries.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "lcc/densities.hpp"
#include "lcc/model.hpp"

namespace lcc::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : eng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
  double normal() { return std::normal_distribution<double>()(eng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }
  bool coin() { return integer(0, 1) == 1; }

  Vector vector(int n, double lo, double hi) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v(i) = uniform(lo, hi);
    return v;
  }
  Vector gaussian_vector(int n, double scale) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v(i) = scale * normal();
    return v;
  }
  Matrix matrix(int rows, int cols, double lo, double hi) {
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) m(i, j) = uniform(lo, hi);
    return m;
  }
  // Point inside the l1 ball of radius `radius`.
  Vector in_ball(int d, double radius = 0.999) {
    Vector v = vector(d, -1.0, 1.0);
    const double s = v.lpNorm<1>();
    const double target = radius * std::pow(uniform(0.0, 1.0), 1.0 / d);
    return s > 0.0 ? Vector(v * (target / s)) : v;
  }

  ActivationKind activation() { return coin() ? ActivationKind::tanh : ActivationKind::squared_relu; }

  PriorSpec prior(bool gaussian) {
    return gaussian ? PriorSpec::gaussian(uniform(0.05, 3.0)) : PriorSpec::uniform_l1();
  }

  // Random spec with entries of X in [-1, 1], residuals of either sign.
  DensitySpec spec(int n, int d, ActivationKind kind, PriorSpec prior) {
    return DensitySpec(matrix(n, d, -1.0, 1.0), vector(n, -2.0, 2.0), Activation(kind),
                       uniform(0.01, 0.99), prior);
  }
  DensitySpec spec(bool gaussian) {
    const int n = integer(1, 50);
    const int d = integer(1, 20);
    return spec(n, d, activation(), prior(gaussian));
  }

  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
};

// Central finite-difference gradient.
inline Vector fd_gradient(const std::function<double(const Vector&)>& f, const Vector& x,
                          double h = 1e-5) {
  Vector g(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    Vector a = x, b = x;
    a(j) += h;
    b(j) -= h;
    g(j) = (f(a) - f(b)) / (2.0 * h);
  }
  return g;
}

inline double relative_error(const Vector& a, const Vector& b, double floor = 1e-8) {
  return (a - b).norm() / std::max(b.norm(), floor);
}

// Independent scalar activations.
inline double ref_psi(ActivationKind k, double u) {
  if (k == ActivationKind::tanh) return std::tanh(u);
  return u > 0.0 ? u * u : 0.0;
}
inline double ref_psi2(ActivationKind k, double u) {
  if (k == ActivationKind::tanh) {
    const double s = 1.0 / std::cosh(u);
    return -2.0 * std::tanh(u) * s * s;
  }
  return u > 0.0 ? 2.0 : 0.0;
}

// Exact Kolmogorov-Smirnov one-sample statistic against a CDF.
inline double ks_against(std::vector<double> xs, const std::function<double(double)>& cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Trapezoid tabulation of an unnormalized 1-D log density, used as an
// independent inverse-CDF oracle.
class Table1D {
 public:
  Table1D(const std::function<double(double)>& logf, double lo, double hi, int points)
      : lo_(lo), h_((hi - lo) / (points - 1)), cdf_(points, 0.0) {
    std::vector<double> lv(points);
    double mx = -INFINITY;
    for (int k = 0; k < points; ++k) {
      lv[k] = logf(lo + h_ * k);
      mx = std::max(mx, lv[k]);
    }
    std::vector<double> f(points);
    for (int k = 0; k < points; ++k) f[k] = std::exp(lv[k] - mx);
    for (int k = 1; k < points; ++k) cdf_[k] = cdf_[k - 1] + 0.5 * h_ * (f[k - 1] + f[k]);
    const double z = cdf_.back();
    for (double& c : cdf_) c /= z;
  }
  double cdf(double t) const {
    if (t <= lo_) return 0.0;
    const double pos = (t - lo_) / h_;
    const auto k = static_cast<std::size_t>(pos);
    if (k + 1 >= cdf_.size()) return 1.0;
    const double frac = pos - static_cast<double>(k);
    return cdf_[k] + frac * (cdf_[k + 1] - cdf_[k]);
  }

 private:
  double lo_;
  double h_;
  std::vector<double> cdf_;
};

}  // namespace lcc::testing
