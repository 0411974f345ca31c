#include "lorasync/slot.hpp"

#include <string>

#include "lorasync/clock.hpp"
#include "lorasync/errors.hpp"

namespace lorasync {

std::string format_ms(Nanos d, int decimals) {
  if (decimals < 0 || decimals > 6) throw ParameterError("format_ms supports 0..6 decimals");
  std::int64_t unit = 1;  // ns per printed digit
  for (int i = decimals; i < 6; ++i) unit *= 10;
  const std::int64_t units = floor_div(d.count() + unit / 2, unit);
  std::int64_t scale = 1;
  for (int i = 0; i < decimals; ++i) scale *= 10;
  const bool negative = units < 0;
  const std::int64_t mag = negative ? -units : units;
  std::string out = (negative ? "-" : "") + std::to_string(mag / scale);
  if (decimals > 0) {
    std::string frac = std::to_string(mag % scale);
    out += '.' + std::string(decimals - frac.size(), '0') + frac;
  }
  return out;
}

void validate(const SlotConfig& cfg) {
  for (Nanos d : {cfg.t_tx, cfg.rx_delay, cfg.t_rx, cfg.tb1, cfg.tb2})
    if (d < Nanos::zero()) throw ParameterError("slot durations must be non-negative");
  if (cfg.t_tx <= cfg.tb1) throw ParameterError("uplink air-time must exceed the backward guard tb1");
  const Nanos slot = cfg.slot_length();
  if (2 * cfg.tb1 >= slot || 2 * cfg.tb2 >= slot)
    throw ParameterError("each guard interval must be shorter than half a slot");
  if (slot > from_ms(kMaxRemainingMs))
    throw ParameterError("slot length " + format_ms(slot) + " ms does not fit the 2-byte remaining-time field");
  const Nanos headroom = from_ms(kMaxRemainingMs) - time_on_air(longest_airtime_params()).packet;
  if (cfg.tb1 + cfg.tb2 > headroom)
    throw ParameterError("tb1 + tb2 exceeds the " + format_ms(headroom, 0) + " ms guard headroom");
}

SlotConfig slot_from_radio(const RadioParams& uplink, const RadioParams& downlink, Nanos rx_delay,
                           Nanos tb1, Nanos tb2) {
  return SlotConfig{.t_tx = time_on_air(uplink).packet,
                    .rx_delay = rx_delay,
                    .t_rx = time_on_air(downlink).packet,
                    .tb1 = tb1,
                    .tb2 = tb2};
}

ServerTime slot_start(const TimelineRef& ref, std::int64_t n, const SlotConfig& cfg) {
  if (n < 0) throw UsageError("slot index must be non-negative");
  return ref.origin() + n * cfg.slot_length();
}

Nanos position_in_slot(ServerTime time, const TimelineRef& ref, const SlotConfig& cfg) {
  if (time < ref.origin()) throw UsageError("time precedes the timeline reference");
  return (time - ref.origin()) % cfg.slot_length();
}

Nanos remaining_to_next_slot(ServerTime time, const TimelineRef& ref, const SlotConfig& cfg) {
  return cfg.slot_length() - position_in_slot(time, ref, cfg);
}

SyncVerdict uplink_end_in_sync(Nanos arrival_pos, const SlotConfig& cfg) {
  const std::int64_t slot = cfg.slot_length().count();
  // Wrap into (-slot/2, slot/2].
  std::int64_t diff = floor_mod((cfg.t_tx - arrival_pos).count(), slot);
  if (2 * diff > slot) diff -= slot;
  const Nanos drift(diff);
  return {is_in_sync(drift, cfg.tb1, cfg.tb2), drift};
}

}  // namespace lorasync
