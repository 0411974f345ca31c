#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "lorasync/frame.hpp"
#include "lorasync/slot.hpp"
#include "lorasync/time.hpp"

namespace lorasync {

enum class SyncStrategy {
  adaptive,    ///< resynchronize only frames judged out of sync
  fixed_rate,  ///< baseline: resynchronize everyone once per round
};

const char* to_string(SyncStrategy s);

/// Sync bytes a single resynchronization costs under `s`.
std::size_t sync_bytes_per_resync(SyncStrategy s);

struct DeviceRecord {
  Nanos last_signed_drift{};
  int frames = 0;
  int resync_count = 0;
  int out_sync_count = 0;
  std::uint16_t last_seen_fcnt = 0;
  bool pending_resync = false;  ///< fixed-rate: round ended, resync on next uplink
};

/// What the server will send back for one uplink.
struct AckPlan {
  std::uint32_t dev_addr = 0;
  std::uint16_t fcnt = 0;
  std::optional<std::uint32_t> remaining_ms;
  ServerTime scheduled_tx{};  ///< opening of the receive window
  Nanos arrival_position{};
  SyncVerdict verdict;
  bool first_frame = false;

  SyncAck ack() const { return {dev_addr, fcnt, remaining_ms}; }
};

struct RoundAction {
  std::uint32_t dev_addr = 0;
  Nanos drift_at_round_end{};  ///< signed drift of the device's latest frame
};

/// Network-server monitor. Judges every uplink from the position of its end
/// in the slot grid anchored at `ref`, and piggybacks the time remaining to the
/// next boundary on the ACK when a resynchronization is due.
class NetworkServer {
 public:
  NetworkServer(TimelineRef ref, SlotConfig cfg, SyncStrategy strategy = SyncStrategy::adaptive);

  /// Unknown devices register on their first uplink.
  AckPlan on_uplink_end(std::uint32_t dev_addr, std::uint16_t fcnt, ServerTime arrival);

  /// Fixed-rate round boundary: logs each registered device's drift and issues
  /// a resynchronization, counted now and delivered on the device's next
  /// uplink regardless of its sync state.
  std::vector<RoundAction> fixed_rate_round();

  const DeviceRecord* find(std::uint32_t dev_addr) const;
  const std::map<std::uint32_t, DeviceRecord>& devices() const { return devices_; }

  const TimelineRef& ref() const { return ref_; }
  const SlotConfig& config() const { return cfg_; }
  SyncStrategy strategy() const { return strategy_; }

 private:
  const TimelineRef ref_;
  SlotConfig cfg_;
  SyncStrategy strategy_;
  std::map<std::uint32_t, DeviceRecord> devices_;
};

/// Class-A end-device synchronizer. Works purely in device-local time.
class EndDevice {
 public:
  EndDevice(Nanos tx_period, Nanos slot_length);

  /// First transmission goes out immediately and becomes the slot reference.
  /// Afterwards: the earliest grid point at or after max(now, last_tx + period).
  DeviceTime next_tx_time(DeviceTime now) const;

  void on_transmit(DeviceTime start);

  /// `beg`: local end of the uplink. `end`: local reception of the ACK.
  void on_ack(DeviceTime beg, DeviceTime end, const SyncAck& ack);

  /// Start from a known grid instead of bootstrapping from the first frame.
  void adopt_grid(DeviceTime slot_start);

  DeviceTime grid_at_or_after(DeviceTime t) const;

  bool has_transmitted() const { return has_transmitted_; }
  std::optional<DeviceTime> slot_start() const { return slot_start_; }
  std::optional<DeviceTime> last_tx() const { return last_tx_; }
  Nanos tx_period() const { return tx_period_; }
  Nanos slot_length() const { return slot_length_; }

 private:
  Nanos tx_period_;
  Nanos slot_length_;
  bool has_transmitted_ = false;
  std::optional<DeviceTime> slot_start_;
  std::optional<DeviceTime> last_tx_;
};

}  // namespace lorasync
