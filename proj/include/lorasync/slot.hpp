#pragma once

#include <cstdint>

#include "lorasync/airtime.hpp"
#include "lorasync/time.hpp"

namespace lorasync {

/// Largest value the 2-byte remaining-time option can carry, in ms.
inline constexpr std::int64_t kMaxRemainingMs = 65'535;

/// Slot geometry. Layout inside one slot, starting at the boundary:
///
///   | uplink t_tx | rx_delay | downlink t_rx | tb1 + tb2 |
///
/// The device starts transmitting on the boundary, so the ideal end of its
/// uplink sits at offset t_tx. tb1 absorbs early (backward) drift and tb2 late
/// (forward) drift.
struct SlotConfig {
  Nanos t_tx{};
  Nanos rx_delay{};
  Nanos t_rx{};
  Nanos tb1{};
  Nanos tb2{};

  Nanos slot_length() const { return t_tx + rx_delay + t_rx + tb1 + tb2; }

  friend bool operator==(const SlotConfig&, const SlotConfig&) = default;
};

/// Throws ParameterError unless:
///   all durations non-negative, t_tx > tb1, tb1 and tb2 < slot/2,
///   slot <= 65535 ms and tb1 + tb2 <= 65535 ms - longest uplink air-time.
void validate(const SlotConfig& cfg);

/// Slot built from uplink/downlink air-times computed from radio parameters.
SlotConfig slot_from_radio(const RadioParams& uplink, const RadioParams& downlink, Nanos rx_delay,
                           Nanos tb1, Nanos tb2);

/// Server-side epoch of slot 0. Fixed once at server start.
class TimelineRef {
 public:
  explicit TimelineRef(ServerTime origin) : origin_(origin) {}
  ServerTime origin() const { return origin_; }

 private:
  ServerTime origin_;
};

ServerTime slot_start(const TimelineRef& ref, std::int64_t n, const SlotConfig& cfg);

/// (time - ref) mod slot, in [0, slot).
Nanos position_in_slot(ServerTime time, const TimelineRef& ref, const SlotConfig& cfg);

/// slot - position, in (0, slot]. A frame exactly on a boundary gets a full slot.
Nanos remaining_to_next_slot(ServerTime time, const TimelineRef& ref, const SlotConfig& cfg);

struct SyncVerdict {
  bool in_sync = false;
  /// Expected minus observed end-of-uplink position, wrapped into
  /// (-slot/2, slot/2]. Positive means the frame ended early.
  Nanos signed_drift{};
};

/// Judges an uplink from the position of its end inside the slot.
SyncVerdict uplink_end_in_sync(Nanos arrival_pos, const SlotConfig& cfg);

}  // namespace lorasync
