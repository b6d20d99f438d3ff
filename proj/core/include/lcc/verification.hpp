// Copyright 2026 The lcc Authors
// SPDX-License-Identifier: Apache-2.0

// Ground-truth oracles (quadrature, rejection) for low-dimensional instances
// and empirical certificates of the log-concavity conditions of the coupling.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lcc/check_report.hpp"
#include "lcc/densities.hpp"
#include "lcc/samplers.hpp"

namespace lcc {

enum class OracleDensity { target_w, marginal_xi, reverse_w_given_xi };

// Tensor grid of points_per_dim points per dimension, endpoints included.
struct GridSpec {
  std::vector<double> lower;
  std::vector<double> upper;
  std::size_t points_per_dim = 2001;
};

// Tabulated density. `log_density_values` are unnormalized and shifted so
// that their maximum is 0 (the shift is `log_offset`); `normalizer` is the
// trapezoid integral of exp(values). Flat index is row-major in dimension
// order (the last dimension varies fastest).
struct OracleGrid {
  std::vector<double> lower;
  std::vector<double> upper;
  std::size_t points_per_dim = 0;
  std::vector<double> log_density_values;
  double normalizer = 0.0;
  double log_offset = 0.0;

  int dims() const noexcept { return static_cast<int>(lower.size()); }
  double spacing(int dim) const;
  double coordinate(int dim, std::size_t index) const;
  // Normalized log-density at a grid point.
  double log_density(std::size_t flat_index) const;

  // 1-D grids only.
  double cdf(double t) const;
  double quantile(double p) const;
};

// Bounds that hold essentially all of the mass of the named density.
GridSpec default_grid(const DensitySpec& spec, OracleDensity which,
                      std::size_t points_per_dim,
                      const std::optional<Vector>& xi = std::nullopt);

// Tabulates and normalizes. Requires d <= 2 for w-densities and n <= 2 for
// the xi marginal (otherwise CapabilityError). The xi marginal integrates
// over w by nested quadrature on `inner_grid` (default_grid of target_w with
// 2001 points per dimension when omitted). reverse_w_given_xi needs `xi`.
OracleGrid quadrature_oracle(const DensitySpec& spec, OracleDensity which,
                             const GridSpec& grid,
                             const std::optional<Vector>& xi = std::nullopt,
                             const std::optional<GridSpec>& inner_grid = std::nullopt);

// Unnormalized log p(xi) by quadrature over `w_grid` (d <= 2); the additive
// constant is the same for every xi given the same grid.
double log_marginal_xi(const DensitySpec& spec, const Vector& xi, const GridSpec& w_grid);

// Draws from a tabulated density: inverse CDF in 1-D, cell sampling in 2-D.
std::vector<Vector> sample_oracle(const OracleGrid& grid, std::size_t count,
                                  std::uint64_t seed);

// One-sample Kolmogorov-Smirnov statistic sup |F_n - F|.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

// Largest two-sample KS statistic over coordinates. Throws InputError on
// empty inputs or mismatched dimensions.
double compare_samples(const std::vector<Vector>& a, const std::vector<Vector>& b);

// Exact i.i.d. draws from p(w) by rejection against the prior (d <= 2).
// CapabilityError when the exponent is unbounded on the support or the
// acceptance rate drops below 1e-6.
std::vector<Vector> rejection_oracle(const DensitySpec& spec, std::size_t count,
                                     std::uint64_t seed);

// Upper bound on alpha sum_i r_i psi(x_i.w) over the prior support used by
// rejection_oracle.
double rejection_envelope(const DensitySpec& spec);

// Hex FNV-1a digest of the spec plus `extra` (configuration echo).
std::string inputs_digest(const DensitySpec& spec, const std::string& extra = {});

// Max Hessian eigenvalue of log p(w | xi) at n_points prior draws against
// 1e-8 (uniform) or -1/sigma0^2 + 1e-8 (gaussian).
CheckReport check_reverse_logconcavity(const DensitySpec& spec, std::size_t n_points,
                                       std::uint64_t seed);

// Per-xi empirical covariance statistics shared by the covariance checks.
struct CouplingCovariance {
  Vector xi;
  double max_eig_w = 0.0;       // largest eigenvalue of Cov[w | xi]
  double max_eig_scaled = 0.0;  // largest eigenvalue of Cov[S w | xi]
};

// For each of xi_draws forward-coupled xi = S w0 + Z (w0 ~ p0), estimates the
// conditional covariances from inner_cfg.n_steps reverse-conditional draws.
// Draw m uses seed stream_seed(inner_cfg.seed, {m + 1}).
std::vector<CouplingCovariance> estimate_coupling_covariances(
    const DensitySpec& spec, std::size_t xi_draws, const ChainConfig& inner_cfg);

// Gaussian prior: Cov[w|xi] <= sigma0^2 (1 + eps_stat). Uniform prior:
// Cov[w|xi] <= Cov_prior (1 + eps_stat) with Cov_prior = 2/((d+1)(d+2)) I;
// reported as informational evidence, as is the gaussian case above the
// small-variance threshold.
CheckReport check_cov_domination(const DensitySpec& spec, std::size_t xi_draws,
                                 const ChainConfig& inner_cfg, double eps_stat = 0.1);

// Largest eigenvalue of Cov[S w | xi] below 1 at every xi; margin = 1 - worst.
// Informational unless the gaussian small-variance premise holds.
CheckReport check_xi_strict_logconcavity(const DensitySpec& spec, std::size_t xi_draws,
                                         const ChainConfig& inner_cfg);

// Largest grid variance (scanning upward, stopping at the first failure)
// for which the Brascamp-Lieb bracket stays negative semidefinite (max
// eigenvalue <= 1e-8) at w_points draws w ~ N(0, sigma0^2 I). Passes iff it
// reaches the threshold 1/(alpha c ||r||_inf lambda_max).
CheckReport check_bl_bound(const DensitySpec& spec, std::size_t w_points,
                               std::vector<double> sigma0_sq_grid, std::uint64_t seed);

// 20 (alpha c n r_inf)^2 / d.
double holder_ratio(double alpha, double c, double n, double r_inf, double d);

// Informational: passes iff holder_ratio < 1.
CheckReport check_holder_ratio(const DensitySpec& spec);

}  // namespace lcc
