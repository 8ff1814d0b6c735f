#pragma once

#include <charconv>
#include <cmath>
#include <string>
#include <string_view>
#include <system_error>

#include "depthgate/error.hpp"

namespace depthgate {

/// Shortest decimal string that parses back to the same double.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

/// Strict full-string parse; throws DataError(parse) on failure.
inline double parse_double(std::string_view s, std::string_view what = "number") {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw DataError(ErrorKind::parse, "cannot parse " + std::string(what) + " '" + std::string(s) + "'");
  return v;
}

inline long long parse_int(std::string_view s, std::string_view what = "integer") {
  long long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw DataError(ErrorKind::parse, "cannot parse " + std::string(what) + " '" + std::string(s) + "'");
  return v;
}

}  // namespace depthgate
