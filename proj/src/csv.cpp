/**
 * Copyright wvote contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "wvote/csv.hpp"

#include <charconv>
#include <stdexcept>
#include <system_error>

namespace wvote {

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string format_u64(std::uint64_t x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
  double value = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw std::invalid_argument("not a number: " + std::string(s));
  }
  return value;
}

CsvWriter::CsvWriter(const std::string& path) : out_(path, std::ios::binary) {
  if (!out_) throw std::runtime_error("cannot open " + path + " for writing");
}

void CsvWriter::row(std::initializer_list<std::string_view> fields) {
  bool first = true;
  for (std::string_view f : fields) {
    if (f.find_first_of(",\"\r\n") != std::string_view::npos) {
      throw std::invalid_argument("csv field needs quoting: " + std::string(f));
    }
    if (!first) out_ << ',';
    out_ << f;
    first = false;
  }
  out_ << '\n';
}

}  // namespace wvote
