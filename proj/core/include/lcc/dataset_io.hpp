// Copyright 2026 The lcc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "lcc/model.hpp"

namespace lcc {

// Reads the dataset CSV format: header `x1,...,xd,y`, then one observation
// per row of decimal reals. Ragged rows, a malformed header, unparsable
// numbers and empty tables throw DataError.
Dataset read_dataset_csv(std::istream& in);
Dataset load_dataset_csv(const std::filesystem::path& path);

// Writes `ds` in the same format with round-trip exact decimals.
void write_dataset_csv(std::ostream& out, const Dataset& ds);

// Shortest decimal that parses back to exactly `v`.
std::string format_double(double v);

}  // namespace lcc
