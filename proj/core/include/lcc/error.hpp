// Copyright 2026 The lcc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace lcc {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed arguments: dimension mismatch, non-finite input, empty sample list.
class InputError : public Error {
 public:
  using Error::Error;
};

// Invalid hyperparameters or unknown enumerations.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Dataset that cannot be read or violates its invariants.
class DataError : public Error {
 public:
  using Error::Error;
};

// Operation called on an object in the wrong state (e.g. incomplete store).
class StateError : public Error {
 public:
  using Error::Error;
};

// Request outside what an oracle can compute (dimension too high, envelope too loose).
class CapabilityError : public Error {
 public:
  using Error::Error;
};

class SamplerError : public Error {
 public:
  using Error::Error;
};

// Chain rejected every proposal for too long.
class StepSizeError : public SamplerError {
 public:
  using SamplerError::SamplerError;
};

// Outer Langevin chain left the region ||xi|| <= 1e6.
class DivergenceError : public SamplerError {
 public:
  using SamplerError::SamplerError;
};

// Sampler failure inside a Greedy Bayes fit, tagged with the failing (i, k).
class StageError : public SamplerError {
 public:
  StageError(int index, int stage, const std::string& what);

  int index() const noexcept { return index_; }
  int stage() const noexcept { return stage_; }

 private:
  int index_;
  int stage_;
};

}  // namespace lcc
