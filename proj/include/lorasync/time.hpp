#pragma once

#include <chrono>
#include <cstdint>
#include <string>

namespace lorasync {

/// All protocol timing is carried as integer nanoseconds.
using Nanos = std::chrono::nanoseconds;

/// Tag for the network-server timeline. The server clock is taken as the
/// true (reference) time of the simulation.
struct ServerClock {
  using rep = std::int64_t;
  using period = std::nano;
  using duration = Nanos;
  using time_point = std::chrono::time_point<ServerClock, Nanos>;
  static constexpr bool is_steady = true;
};

/// Tag for an end-device's local, drifting timeline.
struct DeviceClock {
  using rep = std::int64_t;
  using period = std::nano;
  using duration = Nanos;
  using time_point = std::chrono::time_point<DeviceClock, Nanos>;
  static constexpr bool is_steady = true;
};

using ServerTime = ServerClock::time_point;
using DeviceTime = DeviceClock::time_point;

constexpr Nanos from_ms(std::int64_t ms) { return std::chrono::milliseconds(ms); }
constexpr Nanos from_s(std::int64_t s) { return std::chrono::seconds(s); }

/// Floor division for signed integers (rounds toward negative infinity).
constexpr std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

/// Mathematical modulo: result has the sign of the divisor.
constexpr std::int64_t floor_mod(std::int64_t a, std::int64_t b) {
  return a - floor_div(a, b) * b;
}

/// Ceiling division for a positive divisor.
constexpr std::int64_t ceil_div(std::int64_t a, std::int64_t b) {
  return -floor_div(-a, b);
}

/// Round-half-up to whole milliseconds.
constexpr std::int64_t round_ms(Nanos d) {
  return floor_div(d.count() + 500'000, 1'000'000);
}

/// Milliseconds with `decimals` fractional digits (0..6), rounded half-up.
std::string format_ms(Nanos d, int decimals = 3);

}  // namespace lorasync
