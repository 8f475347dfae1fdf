#pragma once

#include <cstdio>
#include <string>

namespace evauth::detail {

// Fixed 6-decimal rendering used by every CSV writer; locale-independent.
inline std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace evauth::detail
