/**
 * Copyright wvote contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>

namespace wvote {

// Shortest representation that parses back to the same double.
std::string format_double(double x);
std::string format_u64(std::uint64_t x);
double parse_double(std::string_view s);

// RFC-4180-style writer: header row required, UTF-8, LF line endings. Fields
// here never need quoting; the writer enforces that instead of quoting.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);

  void row(std::initializer_list<std::string_view> fields);
  bool good() const { return out_.good(); }

 private:
  std::ofstream out_;
};

}  // namespace wvote
