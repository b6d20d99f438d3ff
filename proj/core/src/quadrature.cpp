// Copyright 2026 The lcc Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lcc/error.hpp"
#include "lcc/rng.hpp"
#include "lcc/verification.hpp"

namespace lcc {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double trapezoid_weight(std::size_t index, std::size_t points, double h) {
  return (index == 0 || index + 1 == points) ? 0.5 * h : h;
}

void check_grid(const GridSpec& grid, int dims) {
  if (static_cast<int>(grid.lower.size()) != dims ||
      static_cast<int>(grid.upper.size()) != dims) {
    throw InputError("grid bounds do not match the density dimension " + std::to_string(dims));
  }
  if (grid.points_per_dim < 2) throw InputError("grid needs at least 2 points per dimension");
  for (int k = 0; k < dims; ++k) {
    if (!(grid.upper[static_cast<std::size_t>(k)] > grid.lower[static_cast<std::size_t>(k)])) {
      throw InputError("grid upper bound must exceed lower bound");
    }
  }
}

std::size_t grid_size(std::size_t points, int dims) {
  std::size_t total = 1;
  for (int k = 0; k < dims; ++k) total *= points;
  return total;
}

// Coordinates and trapezoid weight of flat index `flat`.
double grid_point(const GridSpec& grid, std::size_t flat, Vector& point) {
  const int dims = static_cast<int>(grid.lower.size());
  const std::size_t p = grid.points_per_dim;
  double weight = 1.0;
  for (int k = dims - 1; k >= 0; --k) {
    const std::size_t idx = flat % p;
    flat /= p;
    const auto kk = static_cast<std::size_t>(k);
    const double h = (grid.upper[kk] - grid.lower[kk]) / static_cast<double>(p - 1);
    point(k) = grid.lower[kk] + h * static_cast<double>(idx);
    weight *= trapezoid_weight(idx, p, h);
  }
  return weight;
}

// Log prior written out independently of densities.cpp.
double prior_log(const PriorSpec& prior, const Vector& w) {
  if (prior.variant == PriorVariant::gaussian) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < w.size(); ++j) s += w(j) * w(j);
    return -0.5 * s / prior.sigma0_sq;
  }
  double l1 = 0.0;
  for (Eigen::Index j = 0; j < w.size(); ++j) l1 += std::abs(w(j));
  return l1 <= 1.0 ? 0.0 : kNegInf;
}

double target_exponent(const DensitySpec& spec, const Vector& w) {
  const double lp = prior_log(spec.prior(), w);
  if (lp == kNegInf) return kNegInf;
  double s = 0.0;
  for (int i = 0; i < spec.rows(); ++i) {
    double u = 0.0;
    for (int j = 0; j < spec.dim(); ++j) u += spec.design()(i, j) * w(j);
    s += spec.residuals()(i) * spec.activation().value(u);
  }
  return spec.alpha() * s + lp;
}

// g(w) + log p0(w), and the coupling scores (alpha c |r_i|)^{1/2} x_i.w.
double reverse_base(const DensitySpec& spec, const Vector& w, Vector* coupling) {
  const double lp = prior_log(spec.prior(), w);
  const double c = spec.activation().curvature();
  double s = 0.0;
  for (int i = 0; i < spec.rows(); ++i) {
    double u = 0.0;
    for (int j = 0; j < spec.dim(); ++j) u += spec.design()(i, j) * w(j);
    const double ar = std::abs(spec.residuals()(i));
    s += spec.alpha() * spec.residuals()(i) * spec.activation().value(u) -
         0.5 * spec.alpha() * c * ar * u * u;
    if (coupling) (*coupling)(i) = std::sqrt(spec.alpha() * c * ar) * u;
  }
  return s + lp;
}

double log_sum_exp(const std::vector<double>& v) {
  double m = kNegInf;
  for (double x : v) m = std::max(m, x);
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

// Precomputed inner quadrature for the xi marginal.
struct InnerQuadrature {
  std::vector<double> base;      // g + log p0 + log weight
  std::vector<Vector> coupling;  // S w per point

  InnerQuadrature(const DensitySpec& spec, const GridSpec& w_grid) {
    check_grid(w_grid, spec.dim());
    if (spec.dim() > 2) throw CapabilityError("xi-marginal quadrature requires d <= 2");
    const std::size_t total = grid_size(w_grid.points_per_dim, spec.dim());
    Vector w(spec.dim());
    Vector su(spec.rows());
    for (std::size_t f = 0; f < total; ++f) {
      const double weight = grid_point(w_grid, f, w);
      const double b = reverse_base(spec, w, &su);
      if (b == kNegInf) continue;
      base.push_back(b + std::log(weight));
      coupling.push_back(su);
    }
  }

  double log_marginal(const Vector& xi) const {
    std::vector<double> terms(base.size());
    for (std::size_t f = 0; f < base.size(); ++f) terms[f] = base[f] + coupling[f].dot(xi);
    return -0.5 * xi.squaredNorm() + log_sum_exp(terms);
  }
};

}  // namespace

double OracleGrid::spacing(int dim) const {
  const auto k = static_cast<std::size_t>(dim);
  return (upper[k] - lower[k]) / static_cast<double>(points_per_dim - 1);
}

double OracleGrid::coordinate(int dim, std::size_t index) const {
  return lower[static_cast<std::size_t>(dim)] + spacing(dim) * static_cast<double>(index);
}

double OracleGrid::log_density(std::size_t flat_index) const {
  return log_density_values[flat_index] - std::log(normalizer);
}

double OracleGrid::cdf(double t) const {
  if (dims() != 1) throw CapabilityError("cdf is defined for 1-D oracle grids only");
  const double h = spacing(0);
  if (t <= lower[0]) return 0.0;
  if (t >= upper[0]) return 1.0;
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < points_per_dim; ++k) {
    const double a = std::exp(log_density_values[k]);
    const double b = std::exp(log_density_values[k + 1]);
    const double x0 = coordinate(0, k);
    if (t < x0 + h) {
      // Exact integral of the linear interpolant over [x0, t].
      const double s = t - x0;
      acc += a * s + 0.5 * (b - a) * s * s / h;
      return std::clamp(acc / normalizer, 0.0, 1.0);
    }
    acc += 0.5 * (a + b) * h;
  }
  return 1.0;
}

double OracleGrid::quantile(double p) const {
  if (dims() != 1) throw CapabilityError("quantile is defined for 1-D oracle grids only");
  const double h = spacing(0);
  const double target = std::clamp(p, 0.0, 1.0) * normalizer;
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < points_per_dim; ++k) {
    const double a = std::exp(log_density_values[k]);
    const double b = std::exp(log_density_values[k + 1]);
    const double cell = 0.5 * (a + b) * h;
    if (acc + cell >= target) {
      // Solve a s + (b - a) s^2 / (2h) = target - acc for s in [0, h].
      const double rem = target - acc;
      const double qa = 0.5 * (b - a) / h;
      double s;
      if (std::abs(qa) < 1e-300 * h || std::abs(qa * h) < 1e-12 * std::max(a, b)) {
        s = a > 0.0 ? rem / a : 0.5 * h;
      } else {
        const double disc = std::max(0.0, a * a + 4.0 * qa * rem);
        s = (-a + std::sqrt(disc)) / (2.0 * qa);
      }
      return coordinate(0, k) + std::clamp(s, 0.0, h);
    }
    acc += cell;
  }
  return upper[0];
}

GridSpec default_grid(const DensitySpec& spec, OracleDensity which,
                      std::size_t points_per_dim, const std::optional<Vector>& xi) {
  GridSpec g;
  g.points_per_dim = points_per_dim;
  const bool gaussian = spec.prior().is_gaussian();
  const double sd = std::sqrt(spec.prior().sigma0_sq);
  switch (which) {
    case OracleDensity::target_w:
    case OracleDensity::reverse_w_given_xi: {
      Vector center = Vector::Zero(spec.dim());
      if (which == OracleDensity::reverse_w_given_xi && gaussian) {
        if (!xi) throw InputError("default_grid: reverse conditional needs xi");
        center = spec.prior().sigma0_sq * (spec.scaled_design().transpose() * *xi);
      }
      for (int j = 0; j < spec.dim(); ++j) {
        g.lower.push_back(gaussian ? center(j) - 10.0 * sd : -1.0);
        g.upper.push_back(gaussian ? center(j) + 10.0 * sd : 1.0);
      }
      break;
    }
    case OracleDensity::marginal_xi: {
      const Matrix& S = spec.scaled_design();
      for (int i = 0; i < spec.rows(); ++i) {
        const double reach = gaussian ? 10.0 * sd * S.row(i).norm()
                                      : S.row(i).cwiseAbs().maxCoeff();
        g.lower.push_back(-(reach + 9.0));
        g.upper.push_back(reach + 9.0);
      }
      break;
    }
  }
  return g;
}

OracleGrid quadrature_oracle(const DensitySpec& spec, OracleDensity which,
                             const GridSpec& grid, const std::optional<Vector>& xi,
                             const std::optional<GridSpec>& inner_grid) {
  const int dims = which == OracleDensity::marginal_xi ? spec.rows() : spec.dim();
  if (dims > 2) {
    throw CapabilityError("quadrature oracle supports effective dimension <= 2, got " +
                          std::to_string(dims));
  }
  if (dims < 1) throw CapabilityError("quadrature oracle needs dimension >= 1");
  check_grid(grid, dims);
  if (which == OracleDensity::reverse_w_given_xi) {
    if (!xi || xi->size() != spec.rows()) {
      throw InputError("reverse conditional oracle needs xi of length n");
    }
  }

  OracleGrid out;
  out.lower = grid.lower;
  out.upper = grid.upper;
  out.points_per_dim = grid.points_per_dim;
  const std::size_t total = grid_size(grid.points_per_dim, dims);
  out.log_density_values.resize(total);

  std::optional<InnerQuadrature> inner;
  if (which == OracleDensity::marginal_xi) {
    inner.emplace(spec, inner_grid ? *inner_grid
                                   : default_grid(spec, OracleDensity::target_w,
                                                  spec.dim() == 1 ? 2001 : 201));
  }

  Vector point(dims);
  Vector coupling(spec.rows());
  std::vector<double> weights(total);
  for (std::size_t f = 0; f < total; ++f) {
    weights[f] = grid_point(grid, f, point);
    double v = kNegInf;
    switch (which) {
      case OracleDensity::target_w:
        v = target_exponent(spec, point);
        break;
      case OracleDensity::reverse_w_given_xi: {
        v = reverse_base(spec, point, &coupling);
        if (v != kNegInf) v += coupling.dot(*xi);
        break;
      }
      case OracleDensity::marginal_xi:
        v = inner->log_marginal(point);
        break;
    }
    out.log_density_values[f] = v;
  }

  double mx = kNegInf;
  for (double v : out.log_density_values) mx = std::max(mx, v);
  if (!std::isfinite(mx)) throw CapabilityError("density vanishes on the whole grid");
  out.log_offset = mx;
  double z = 0.0;
  for (std::size_t f = 0; f < total; ++f) {
    out.log_density_values[f] -= mx;
    z += weights[f] * std::exp(out.log_density_values[f]);
  }
  out.normalizer = z;
  return out;
}

double log_marginal_xi(const DensitySpec& spec, const Vector& xi, const GridSpec& w_grid) {
  if (xi.size() != spec.rows()) throw InputError("log_marginal_xi: xi has wrong length");
  return InnerQuadrature(spec, w_grid).log_marginal(xi);
}

std::vector<Vector> sample_oracle(const OracleGrid& grid, std::size_t count,
                                  std::uint64_t seed) {
  RandomStream rng(seed);
  std::vector<Vector> out;
  out.reserve(count);
  if (grid.dims() == 1) {
    for (std::size_t k = 0; k < count; ++k) {
      Vector v(1);
      v(0) = grid.quantile(rng.uniform());
      out.push_back(v);
    }
    return out;
  }
  if (grid.dims() != 2) throw CapabilityError("sample_oracle supports 1-D and 2-D grids");
  // Cells carry the average of their four corner densities.
  const std::size_t p = grid.points_per_dim;
  std::vector<double> cum;
  cum.reserve((p - 1) * (p - 1));
  double acc = 0.0;
  for (std::size_t a = 0; a + 1 < p; ++a) {
    for (std::size_t b = 0; b + 1 < p; ++b) {
      const auto at = [&](std::size_t i, std::size_t j) {
        return std::exp(grid.log_density_values[i * p + j]);
      };
      acc += 0.25 * (at(a, b) + at(a + 1, b) + at(a, b + 1) + at(a + 1, b + 1));
      cum.push_back(acc);
    }
  }
  for (std::size_t k = 0; k < count; ++k) {
    const double u = rng.uniform() * acc;
    const auto cell = static_cast<std::size_t>(
        std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
    const std::size_t a = std::min(cell / (p - 1), p - 2);
    const std::size_t b = std::min(cell % (p - 1), p - 2);
    Vector v(2);
    v(0) = grid.coordinate(0, a) + rng.uniform() * grid.spacing(0);
    v(1) = grid.coordinate(1, b) + rng.uniform() * grid.spacing(1);
    out.push_back(v);
  }
  return out;
}

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw InputError("ks_statistic: no samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double F = cdf(samples[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - F, F - static_cast<double>(i) / n});
  }
  return d;
}

double compare_samples(const std::vector<Vector>& a, const std::vector<Vector>& b) {
  if (a.empty() || b.empty()) throw InputError("compare_samples: empty sample");
  const Eigen::Index d = a.front().size();
  for (const auto& v : a) {
    if (v.size() != d) throw InputError("compare_samples: ragged first sample");
  }
  for (const auto& v : b) {
    if (v.size() != d) throw InputError("compare_samples: dimension mismatch");
  }
  double worst = 0.0;
  std::vector<double> xa(a.size());
  std::vector<double> xb(b.size());
  for (Eigen::Index j = 0; j < d; ++j) {
    for (std::size_t k = 0; k < a.size(); ++k) xa[k] = a[k](j);
    for (std::size_t k = 0; k < b.size(); ++k) xb[k] = b[k](j);
    std::sort(xa.begin(), xa.end());
    std::sort(xb.begin(), xb.end());
    std::size_t ia = 0;
    std::size_t ib = 0;
    const double na = static_cast<double>(xa.size());
    const double nb = static_cast<double>(xb.size());
    while (ia < xa.size() && ib < xb.size()) {
      const double x = std::min(xa[ia], xb[ib]);
      while (ia < xa.size() && xa[ia] == x) ++ia;
      while (ib < xb.size() && xb[ib] == x) ++ib;
      worst = std::max(worst, std::abs(static_cast<double>(ia) / na - static_cast<double>(ib) / nb));
    }
  }
  return worst;
}

}  // namespace lcc
