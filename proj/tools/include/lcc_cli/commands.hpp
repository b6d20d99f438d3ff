// Copyright 2026 The lcc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace lcc::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 1,
  kDataError = 2,
  kSamplerError = 3,
  kVerificationFailed = 4,
};

struct CommandOptions {
  std::filesystem::path config_path;
  std::optional<std::size_t> count;
  std::optional<std::uint64_t> seed;      // overrides the config seed
  std::optional<std::filesystem::path> out_dir;
  // Runs the battery with the curvature constant divided by 10.
  bool negative_control = false;
};

// Each command logs progress to `log`, reports errors on `err` and returns
// an ExitCode.
int cmd_fit(const CommandOptions& opts, std::ostream& log, std::ostream& err);
int cmd_sample(const CommandOptions& opts, std::ostream& log, std::ostream& err);
int cmd_verify(const CommandOptions& opts, std::ostream& log, std::ostream& err);

// Writes `content` to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace lcc::cli
