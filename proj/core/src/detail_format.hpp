#pragma once

#include <cstdio>
#include <string>

namespace tcqlf::detail {

// Canonical float formatting for text outputs: 9 significant digits.
inline std::string g9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace tcqlf::detail
