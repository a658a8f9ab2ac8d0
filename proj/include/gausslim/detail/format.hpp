#pragma once

#include <cstdio>
#include <string>

namespace gausslim::detail {

/// Round-trip decimal for a double; identical bits give identical text.
inline std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace gausslim::detail
