// SPDX-License-Identifier: Apache-2.0
// Helpers shared by the plain-text artifact readers and writers.
#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sasa/error.hpp"

namespace sasa::detail {

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const auto at = s.find(sep, start);
    parts.push_back(s.substr(start, at == std::string_view::npos ? s.npos : at - start));
    if (at == std::string_view::npos) return parts;
    start = at + 1;
  }
}

template <typename T>
T parse_number(std::string_view text, std::string_view what) {
  T value{};
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (text.empty() || ec != std::errc() || ptr != last) {
    throw FormatError(std::string(what) + ": cannot parse '" + std::string(text) + "'");
  }
  return value;
}

/// Shortest representation that round-trips exactly.
inline std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

/// Parses `k1=v1 k2=v2 ...`, requiring exactly the given keys in order.
inline std::vector<std::string_view> parse_header(std::string_view line,
                                                  std::initializer_list<std::string_view> keys,
                                                  std::string_view what) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  const auto fields = split(line, ' ');
  if (fields.size() != keys.size()) {
    throw FormatError(std::string(what) + ": malformed header '" + std::string(line) + "'");
  }
  std::vector<std::string_view> values;
  auto key = keys.begin();
  for (const auto field : fields) {
    const auto eq = field.find('=');
    if (eq == std::string_view::npos || field.substr(0, eq) != *key) {
      throw FormatError(std::string(what) + ": expected header field '" + std::string(*key) +
                        "=' in '" + std::string(line) + "'");
    }
    values.push_back(field.substr(eq + 1));
    ++key;
  }
  return values;
}

}  // namespace sasa::detail
