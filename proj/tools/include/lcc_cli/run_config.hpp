// Copyright 2026 The lcc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lcc/model.hpp"
#include "lcc/samplers.hpp"

namespace lcc::cli {

// Settings of the verification battery run by `verify`.
struct VerifyConfig {
  std::size_t hessian_points = 1000;
  std::size_t xi_draws = 20;
  std::size_t inner_samples = 10000;
  double eps_stat = 0.1;
  std::size_t bound_points = 100;
  // Multiples of the small-variance threshold scanned by the Brascamp-Lieb
  // check.
  std::vector<double> variance_multipliers{0.125, 0.25, 0.5, 1.0};
};

// Parsed run configuration. Relative paths in the file are resolved against
// the directory holding the config file.
struct RunConfig {
  std::filesystem::path dataset_path;
  PriorVariant prior_variant = PriorVariant::uniform_l1;
  // sigma0^2; unset when the file asks for the small-variance threshold.
  std::optional<double> sigma0_sq;
  ActivationKind activation = ActivationKind::tanh;
  std::optional<double> alpha;  // unset: n^{-1/2}
  double beta = 0.2;
  int K = 1;
  int L = 200;
  ChainConfig chain;
  // `sample` and `verify`: residuals of the single density, y when unset.
  std::optional<std::vector<double>> residuals;
  VerifyConfig verify;
  unsigned threads = 1;
  std::filesystem::path output_dir{"."};

  // Normalized echo for manifests.
  std::string to_json() const;
};

// Strict parser: unknown keys, wrong types and out-of-range values throw
// ConfigError naming the field.
RunConfig parse_run_config(std::istream& in,
                           const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace lcc::cli
