#pragma once

#include <cstdint>

namespace evauth {

// Seconds since the Unix epoch (UTC). Decay and damping formulas measure
// time in fractional hours derived from second deltas.
using Timestamp = std::int64_t;

inline constexpr double kSecondsPerHour = 3600.0;

inline double hours_between(Timestamp from, Timestamp to) {
  return static_cast<double>(to - from) / kSecondsPerHour;
}

}  // namespace evauth
