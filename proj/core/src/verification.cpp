// Copyright 2026 The lcc Authors
// SPDX-License-Identifier: Apache-2.0

#include "lcc/verification.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <iomanip>
#include <limits>
#include <sstream>

#include "lcc/error.hpp"

namespace lcc {
namespace {

constexpr double kEigTolerance = 1e-8;

class Fnv1a {
 public:
  void bytes(const void* data, std::size_t size) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t k = 0; k < size; ++k) {
      h_ ^= p[k];
      h_ *= 0x100000001b3ULL;
    }
  }
  void real(double v) { bytes(&v, sizeof(v)); }
  void integer(std::int64_t v) { bytes(&v, sizeof(v)); }
  std::string hex() const {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h_;
    return os.str();
  }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

double exponent(const DensitySpec& spec, const Vector& w) {
  double s = 0.0;
  for (int i = 0; i < spec.rows(); ++i) {
    s += spec.residuals()(i) * spec.activation().value(spec.design().row(i).dot(w));
  }
  return spec.alpha() * s;
}

std::string digest_with_config(const DensitySpec& spec, const std::string& tag,
                               const ChainConfig& cfg, std::size_t draws) {
  std::ostringstream extra;
  extra << tag << ';' << draws << ';' << cfg.step_size << ';' << cfg.burn_in << ';'
        << cfg.thinning << ';' << cfg.n_steps << ';' << cfg.seed;
  return inputs_digest(spec, extra.str());
}

}  // namespace

std::string inputs_digest(const DensitySpec& spec, const std::string& extra) {
  Fnv1a h;
  h.integer(spec.rows());
  h.integer(spec.dim());
  for (Eigen::Index k = 0; k < spec.design().size(); ++k) h.real(spec.design().data()[k]);
  for (Eigen::Index k = 0; k < spec.residuals().size(); ++k) h.real(spec.residuals()(k));
  h.real(spec.alpha());
  h.integer(static_cast<std::int64_t>(spec.activation().kind()));
  h.real(spec.activation().curvature());
  h.integer(static_cast<std::int64_t>(spec.prior().variant));
  h.real(spec.prior().sigma0_sq);
  h.bytes(extra.data(), extra.size());
  return h.hex();
}

double rejection_envelope(const DensitySpec& spec) {
  const auto& act = spec.activation();
  const auto& r = spec.residuals();
  if (spec.prior().is_gaussian()) {
    if (act.kind() == ActivationKind::tanh) return spec.alpha() * r.cwiseAbs().sum();
    // alpha sum r_i (x_i.w)_+^2 is bounded above iff no residual is positive.
    if (spec.rows() == 0 || r.maxCoeff() <= 0.0) return 0.0;
    throw CapabilityError(
        "rejection oracle: squared_relu exponent is unbounded under the gaussian prior");
  }
  if (spec.dim() > 2) throw CapabilityError("rejection oracle requires d <= 2");

  // Grid maximum over the l1 ball plus a Lipschitz correction for the cell
  // radius; grid points within one cell of the ball are included.
  const int d = spec.dim();
  const std::size_t p = d == 1 ? 20001 : 801;
  const double h = 2.0 / static_cast<double>(p - 1);
  double best = -std::numeric_limits<double>::infinity();
  Vector w(d);
  if (d == 1) {
    for (std::size_t a = 0; a < p; ++a) {
      w(0) = -1.0 + h * static_cast<double>(a);
      best = std::max(best, exponent(spec, w));
    }
  } else {
    for (std::size_t a = 0; a < p; ++a) {
      for (std::size_t b = 0; b < p; ++b) {
        w(0) = -1.0 + h * static_cast<double>(a);
        w(1) = -1.0 + h * static_cast<double>(b);
        if (w.lpNorm<1>() > 1.0 + 2.0 * h) continue;
        best = std::max(best, exponent(spec, w));
      }
    }
  }
  // |psi'| <= 1 (tanh) or <= 2 |u| <= 2 ||x||_inf on the ball (squared ReLU).
  double lipschitz = 0.0;
  for (int i = 0; i < spec.rows(); ++i) {
    const double xinf = spec.design().row(i).cwiseAbs().maxCoeff();
    const double dpsi = act.kind() == ActivationKind::tanh ? 1.0 : 2.0 * xinf;
    lipschitz += std::abs(r(i)) * dpsi * spec.design().row(i).lpNorm<1>();
  }
  return best + spec.alpha() * lipschitz * h + 1e-6;
}

std::vector<Vector> rejection_oracle(const DensitySpec& spec, std::size_t count,
                                     std::uint64_t seed) {
  if (spec.dim() > 2) throw CapabilityError("rejection oracle requires d <= 2");
  const double sup = rejection_envelope(spec);
  RandomStream rng(seed);
  std::vector<Vector> out;
  out.reserve(count);
  std::uint64_t proposals = 0;
  while (out.size() < count) {
    Vector w = sample_prior_one(spec.prior(), spec.dim(), rng);
    ++proposals;
    const double e = exponent(spec, w);
    if (e > sup) {
      throw CapabilityError("rejection oracle: exponent " + fmt(e) +
                            " exceeds envelope " + fmt(sup));
    }
    if (std::log(rng.uniform()) < e - sup) out.push_back(std::move(w));
    if (proposals % 1000000 == 0 &&
        static_cast<double>(out.size()) < 1e-6 * static_cast<double>(proposals)) {
      throw CapabilityError("rejection oracle: acceptance rate below 1e-6");
    }
  }
  return out;
}

CheckReport check_reverse_logconcavity(const DensitySpec& spec, std::size_t n_points,
                                       std::uint64_t seed) {
  const bool gaussian = spec.prior().is_gaussian();
  const double threshold =
      gaussian ? -1.0 / spec.prior().sigma0_sq + kEigTolerance : kEigTolerance;
  const auto points = sample_prior(spec.prior(), spec.dim(), n_points, seed);
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& w : points) {
    worst = std::max(worst, max_symmetric_eigenvalue(reverse_conditional_hessian(spec, w)));
  }
  if (points.empty()) worst = threshold;

  CheckReport rep;
  rep.check_name = "reverse_logconcavity";
  rep.margin = threshold - worst;
  rep.passed = rep.margin >= 0.0;
  rep.seed = seed;
  rep.inputs_digest = inputs_digest(spec, "reverse_logconcavity;" + std::to_string(n_points));
  rep.details = "max Hessian eigenvalue " + fmt(worst) + " over " + std::to_string(n_points) +
                " prior draws; threshold " + fmt(threshold);
  return rep;
}

std::vector<CouplingCovariance> estimate_coupling_covariances(const DensitySpec& spec,
                                                              std::size_t xi_draws,
                                                              const ChainConfig& inner_cfg) {
  if (inner_cfg.n_steps < 2) throw ConfigError("covariance estimation needs n_steps >= 2");
  RandomStream rng(stream_seed(inner_cfg.seed, {0}));
  std::vector<CouplingCovariance> out;
  out.reserve(xi_draws);
  for (std::size_t m = 0; m < xi_draws; ++m) {
    const Vector w0 = sample_prior_one(spec.prior(), spec.dim(), rng);
    Vector xi = spec.scaled_design() * w0;
    for (Eigen::Index i = 0; i < xi.size(); ++i) xi(i) += rng.normal();

    ChainConfig c = inner_cfg;
    c.seed = stream_seed(inner_cfg.seed, {m + 1});
    const ChainResult chain = sample_reverse_conditional(spec, xi, c);

    CouplingCovariance cc;
    cc.xi = xi;
    cc.max_eig_w = max_symmetric_eigenvalue(sample_covariance(chain.samples));
    if (spec.rows() > 0) {
      std::vector<Vector> z;
      z.reserve(chain.samples.size());
      for (const auto& w : chain.samples) z.push_back(spec.scaled_design() * w);
      cc.max_eig_scaled = max_symmetric_eigenvalue(sample_covariance(z));
    }
    out.push_back(std::move(cc));
  }
  return out;
}

CheckReport check_cov_domination(const DensitySpec& spec, std::size_t xi_draws,
                                 const ChainConfig& inner_cfg, double eps_stat) {
  const auto stats = estimate_coupling_covariances(spec, xi_draws, inner_cfg);
  const bool gaussian = spec.prior().is_gaussian();
  const double prior_var =
      gaussian ? spec.prior().sigma0_sq : uniform_l1_coordinate_variance(spec.dim());
  const double bound = prior_var * (1.0 + eps_stat);
  double worst = 0.0;
  for (const auto& s : stats) worst = std::max(worst, s.max_eig_w);

  CheckReport rep;
  rep.check_name = "cov_domination";
  rep.margin = bound - worst;
  rep.passed = rep.margin >= 0.0;
  rep.seed = inner_cfg.seed;
  rep.informational =
      !gaussian || spec.prior().sigma0_sq > gaussian_variance_threshold(spec) * (1.0 + 1e-12);
  rep.inputs_digest = digest_with_config(spec, "cov_domination", inner_cfg, xi_draws);
  std::ostringstream os;
  if (!gaussian) os << "evidence for conjectured covariance domination under the uniform prior; ";
  os << "max eigenvalue of Cov[w|xi] " << fmt(worst) << " over " << xi_draws
     << " xi draws vs prior variance " << fmt(prior_var) << " x (1 + " << eps_stat << ")";
  rep.details = os.str();
  return rep;
}

CheckReport check_xi_strict_logconcavity(const DensitySpec& spec, std::size_t xi_draws,
                                         const ChainConfig& inner_cfg) {
  const auto stats = estimate_coupling_covariances(spec, xi_draws, inner_cfg);
  double worst = 0.0;
  for (const auto& s : stats) worst = std::max(worst, s.max_eig_scaled);

  const bool gaussian = spec.prior().is_gaussian();
  const double c = spec.activation().curvature();
  bool premise = false;
  std::ostringstream os;
  if (gaussian) {
    const double thr = gaussian_variance_threshold(spec);
    premise = spec.prior().sigma0_sq <= thr;
    os << "sigma0^2 " << fmt(spec.prior().sigma0_sq) << (premise ? " <= " : " > ")
       << "threshold " << fmt(thr) << "; ";
  } else {
    const double rhs = spec.alpha() * c * spec.rows() * spec.residual_sup();
    premise = spec.dim() > rhs;
    os << "evidence (premise relies on conjectured covariance domination); d = " << spec.dim()
       << (premise ? " > " : " <= ") << "alpha c n ||r||_inf = " << fmt(rhs) << "; ";
  }
  os << "max eigenvalue of Cov[S w|xi] " << fmt(worst) << " over " << xi_draws << " xi draws";

  CheckReport rep;
  rep.check_name = "xi_strict_logconcavity";
  rep.margin = 1.0 - worst;
  rep.passed = worst < 1.0;
  rep.seed = inner_cfg.seed;
  rep.informational = !(gaussian && premise);
  rep.inputs_digest = digest_with_config(spec, "xi_strict_logconcavity", inner_cfg, xi_draws);
  rep.details = os.str();
  return rep;
}

CheckReport check_bl_bound(const DensitySpec& spec, std::size_t w_points,
                               std::vector<double> sigma0_sq_grid, std::uint64_t seed) {
  if (!spec.prior().is_gaussian()) {
    throw InputError("check_bl_bound requires the gaussian prior");
  }
  if (sigma0_sq_grid.empty()) throw InputError("check_bl_bound: empty variance grid");
  std::sort(sigma0_sq_grid.begin(), sigma0_sq_grid.end());
  const double thr = gaussian_variance_threshold(spec);

  std::vector<double> worst(sigma0_sq_grid.size(), -std::numeric_limits<double>::infinity());
  const auto points = sample_prior(spec.prior(), spec.dim(), w_points, seed);
  bool degenerate = false;
  for (const auto& w : points) {
    const BrascampLiebMatrices m = build_bl_matrices(spec, w);
    degenerate = degenerate || m.degenerate;
    for (std::size_t g = 0; g < sigma0_sq_grid.size(); ++g) {
      const Matrix term = bl_bound_term(m, sigma0_sq_grid[g]);
      if (term.rows() > 0) worst[g] = std::max(worst[g], max_symmetric_eigenvalue(term));
    }
  }

  double largest_ok = 0.0;
  bool any_ok = false;
  for (std::size_t g = 0; g < sigma0_sq_grid.size(); ++g) {
    if (worst[g] > kEigTolerance) break;
    largest_ok = sigma0_sq_grid[g];
    any_ok = true;
  }

  CheckReport rep;
  rep.check_name = "bl_bound";
  rep.seed = seed;
  rep.passed = any_ok && largest_ok >= thr * (1.0 - 1e-12);
  rep.margin = any_ok ? (largest_ok - thr) / thr : -1.0;
  if (rep.passed) rep.margin = std::max(rep.margin, 0.0);
  std::ostringstream os;
  os << "threshold sigma0^2 " << fmt(thr) << "; largest grid variance with negative "
     << "semidefinite bracket at all " << w_points << " points: "
     << (any_ok ? fmt(largest_ok) : std::string("none"));
  for (std::size_t g = 0; g < sigma0_sq_grid.size(); ++g) {
    os << (g == 0 ? "; max eigenvalue by variance: " : ", ") << fmt(sigma0_sq_grid[g]) << "->"
       << fmt(worst[g]);
  }
  if (degenerate) os << "; degenerate factors, evaluated on the positive-rank subspace";
  rep.details = os.str();
  std::ostringstream extra;
  extra << "bl_bound;" << w_points;
  for (double s : sigma0_sq_grid) extra << ';' << s;
  rep.inputs_digest = inputs_digest(spec, extra.str());
  return rep;
}

double holder_ratio(double alpha, double c, double n, double r_inf, double d) {
  if (alpha < 0.0 || c < 0.0 || n < 0.0 || r_inf < 0.0) {
    throw InputError("holder_ratio: arguments must be non-negative");
  }
  if (!(d > 0.0)) throw InputError("holder_ratio: d must be positive");
  const double prod = alpha * c * n * r_inf;
  return 20.0 * prod * prod / d;
}

CheckReport check_holder_ratio(const DensitySpec& spec) {
  const double ratio = holder_ratio(spec.alpha(), spec.activation().curvature(), spec.rows(),
                                    spec.residual_sup(), spec.dim());
  CheckReport rep;
  rep.check_name = "holder_ratio";
  rep.margin = 1.0 - ratio;
  rep.passed = ratio < 1.0;
  rep.informational = true;
  rep.inputs_digest = inputs_digest(spec, "holder_ratio");
  rep.details = "20 (alpha c n ||r||_inf)^2 / d = " + fmt(ratio);
  return rep;
}

}  // namespace lcc
