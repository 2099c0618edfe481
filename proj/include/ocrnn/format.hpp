#pragma once

#include <charconv>
#include <cmath>
#include <string>
#include <system_error>

namespace ocrnn {

// Shortest representation that parses back to the same double; independent
// of the C locale.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

// Fixed-point with `digits` decimals, also locale independent.
inline std::string format_fixed(double v, int digits) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, digits);
  if (ec != std::errc()) return "0";
  return std::string(buf, ptr);
}

}  // namespace ocrnn
