// Copyright 2026 The lcc Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "json.hpp"
#include "lcc/check_report.hpp"

namespace lcc {

std::string reports_to_json(const std::vector<CheckReport>& reports) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : reports) {
    nlohmann::ordered_json j;
    j["check_name"] = r.check_name;
    j["passed"] = r.passed;
    if (std::isfinite(r.margin)) {
      j["margin"] = r.margin;
    } else {
      j["margin"] = nullptr;
    }
    j["details"] = r.details;
    j["inputs_digest"] = r.inputs_digest;
    j["seed"] = r.seed;
    j["informational"] = r.informational;
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

}  // namespace lcc
