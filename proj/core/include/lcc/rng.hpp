// Copyright 2026 The lcc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace lcc {

// Derives an independent 64-bit seed for the stream addressed by `path`
// (e.g. {chain index} or {i, k, l}). Pure function of its arguments, so
// results do not depend on how chains are scheduled.
std::uint64_t stream_seed(std::uint64_t seed,
                          std::initializer_list<std::uint64_t> path) noexcept;

// Engine plus the three distributions the samplers draw from.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  double exponential() { return exponential_(engine_); }
  bool coin() { return (engine_() >> 63) != 0; }

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
  std::exponential_distribution<double> exponential_{1.0};
};

}  // namespace lcc
