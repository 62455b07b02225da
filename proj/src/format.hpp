#pragma once

#include <charconv>
#include <cstdio>
#include <string>

namespace ellipsefit {

/// Shortest decimal representation that round-trips the exact double.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string format_fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

}  // namespace ellipsefit
