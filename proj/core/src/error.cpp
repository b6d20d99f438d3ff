// Copyright 2026 The lcc Authors
// SPDX-License-Identifier: Apache-2.0

#include "lcc/error.hpp"

namespace lcc {

StageError::StageError(int index, int stage, const std::string& what)
    : SamplerError("sampler failed at (i=" + std::to_string(index) +
                   ", k=" + std::to_string(stage) + "): " + what),
      index_(index),
      stage_(stage) {}

}  // namespace lcc
