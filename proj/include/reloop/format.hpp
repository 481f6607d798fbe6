#pragma once

#include <cstdio>
#include <string>

namespace reloop {

/// Render a double with 17 significant digits, enough for exact value
/// round-trip through text.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

} // namespace reloop
