// Copyright 2026 The lcc Authors
// SPDX-License-Identifier: Apache-2.0

#include "lcc/dataset_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>
#include <vector>

#include "lcc/error.hpp"

namespace lcc {
namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    std::string_view field = line.substr(start, comma == std::string_view::npos
                                                    ? std::string_view::npos
                                                    : comma - start);
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) {
      field.remove_prefix(1);
    }
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t')) {
      field.remove_suffix(1);
    }
    fields.push_back(field);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

double parse_real(std::string_view field, std::size_t line_no) {
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
    throw DataError("line " + std::to_string(line_no) + ": cannot parse '" +
                    std::string(field) + "' as a real");
  }
  return v;
}

}  // namespace

Dataset read_dataset_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw DataError("dataset is empty");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();

  const auto header = split_fields(line);
  if (header.size() < 2) {
    throw DataError("header must be x1,...,xd,y with d >= 1");
  }
  const std::size_t d = header.size() - 1;
  for (std::size_t j = 0; j < d; ++j) {
    if (header[j] != "x" + std::to_string(j + 1)) {
      throw DataError("header column " + std::to_string(j + 1) + " is '" +
                      std::string(header[j]) + "', expected x" +
                      std::to_string(j + 1));
    }
  }
  if (header.back() != "y") throw DataError("last header column must be 'y'");

  std::vector<double> values;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto fields = split_fields(line);
    if (fields.size() != d + 1) {
      throw DataError("line " + std::to_string(line_no) + " has " +
                      std::to_string(fields.size()) + " fields, expected " +
                      std::to_string(d + 1));
    }
    for (const auto f : fields) values.push_back(parse_real(f, line_no));
    ++n;
  }
  if (n == 0) throw DataError("dataset has no observations");

  Dataset ds;
  ds.X.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  ds.y.resize(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      ds.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          values[i * (d + 1) + j];
    }
    ds.y(static_cast<Eigen::Index>(i)) = values[i * (d + 1) + d];
  }
  return ds;
}

Dataset load_dataset_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset '" + path.string() + "'");
  return read_dataset_csv(in);
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

void write_dataset_csv(std::ostream& out, const Dataset& ds) {
  for (int j = 0; j < ds.d(); ++j) out << 'x' << (j + 1) << ',';
  out << "y\n";
  for (int i = 0; i < ds.n(); ++i) {
    for (int j = 0; j < ds.d(); ++j) out << format_double(ds.X(i, j)) << ',';
    out << format_double(ds.y(i)) << '\n';
  }
}

}  // namespace lcc
