// Copyright 2026 The lcc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace lcc {

// Outcome of one verification. `margin` is the signed distance to the
// threshold: non-negative iff `passed`. Informational reports (empirical
// evidence for a conjecture, sufficient-but-not-necessary conditions) never
// fail a verification run.
struct CheckReport {
  std::string check_name;
  bool passed = false;
  double margin = 0.0;
  std::string details;
  std::string inputs_digest;
  std::uint64_t seed = 0;
  bool informational = false;
};

// JSON array of {check_name, passed, margin, details, inputs_digest, seed,
// informational}. Non-finite margins serialize as null.
std::string reports_to_json(const std::vector<CheckReport>& reports);

}  // namespace lcc
