#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "lorasync/time.hpp"

namespace lorasync {

// Oscillator models. Every model describes the instantaneous frequency offset
// (f - f0) / f0 in parts per million as a piecewise-constant function of
// server time; positive ppm means the device clock runs fast.

struct IdealClock {};

struct ConstantPpm {
  double offset_ppm = 0.0;
};

/// Frequency offset held for `step_interval`, then perturbed by a zero-mean
/// Gaussian step of `step_std_ppm`.
struct RandomWalkPpm {
  Nanos step_interval = from_s(60);
  double step_std_ppm = 0.0;
  double initial_ppm = 0.0;
  std::uint64_t seed = 1;
};

struct PpmSegment {
  Nanos from{};  ///< server time at which this offset takes effect
  double offset_ppm = 0.0;
};

/// Offset is 0 ppm before the first segment.
struct PiecewisePpm {
  std::vector<PpmSegment> segments;
};

using ClockModel = std::variant<IdealClock, ConstantPpm, RandomWalkPpm, PiecewisePpm>;

void validate(const ClockModel& model);

/// Named calibration presets: "ideal", "feather-like", "ttgo-like".
/// `seed` is used by stochastic presets only.
ClockModel clock_preset(std::string_view name, std::uint64_t seed = 1);

std::string describe(const ClockModel& model);

/// A drifting device clock. Server and device share the time origin, so the
/// local reading at server time 0 is 0.
///
/// Queries must be non-decreasing in server time; the model state only moves
/// forward. Readings depend only on the queried instant, never on the query
/// history, so any sequence of forward queries gives the same answers.
class SimClock {
 public:
  explicit SimClock(ClockModel model);

  DeviceTime local_time(ServerTime t);

  /// Server time minus device time. A fast clock yields negative drift.
  Nanos drift(ServerTime t);

  /// Earliest server instant at which the local reading reaches `local`.
  ServerTime server_time_at(DeviceTime local);

  /// Frequency offset of the segment the clock currently sits in.
  double current_ppm() const { return segment_.ppm; }

  const ClockModel& model() const { return model_; }

 private:
  struct Segment {
    ServerTime start{};
    DeviceTime local_start{};
    double ppm = 0.0;
    std::optional<ServerTime> end;
  };

  static Nanos scaled(Nanos elapsed, double ppm);
  DeviceTime local_in_segment(ServerTime t) const;
  void enter_next_segment();
  void check_monotone(ServerTime t);

  ClockModel model_;
  Segment segment_;
  std::size_t piece_index_ = 0;
  std::mt19937_64 rng_;
  std::normal_distribution<double> step_;
  ServerTime last_query_{};
};

/// Frame is in sync iff -tb2 < drift < tb1 (both bounds exclusive).
bool is_in_sync(Nanos drift, Nanos tb1, Nanos tb2);

}  // namespace lorasync
