#pragma once

#include <charconv>
#include <string>
#include <system_error>

namespace dvrforge {

/// Shortest decimal that parses back to the same double.
inline std::string shortest_repr(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  if (res.ec != std::errc{}) return "nan";
  return std::string(buf, res.ptr);
}

/// Fixed significant-digit formatting (general notation).
inline std::string repr_digits(double x, int digits) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, digits);
  if (res.ec != std::errc{}) return "nan";
  return std::string(buf, res.ptr);
}

}  // namespace dvrforge
