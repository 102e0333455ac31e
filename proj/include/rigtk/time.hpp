#pragma once

#include <cmath>
#include <cstdint>

namespace rigtk {

// Nanoseconds since an arbitrary epoch. Integer storage keeps multi-hour
// logs exact; subtraction cannot overflow for spans below 1e4 s.
using Timestamp = std::int64_t;

inline constexpr double kNanosecondsPerSecond = 1e9;

inline double to_seconds(Timestamp t_ns) {
  return static_cast<double>(t_ns) / kNanosecondsPerSecond;
}

inline Timestamp from_seconds(double seconds) {
  return static_cast<Timestamp>(std::llround(seconds * kNanosecondsPerSecond));
}

}  // namespace rigtk
