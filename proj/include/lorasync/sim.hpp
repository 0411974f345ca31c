#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lorasync/airtime.hpp"
#include "lorasync/clock.hpp"
#include "lorasync/protocol.hpp"
#include "lorasync/slot.hpp"
#include "lorasync/time.hpp"

namespace lorasync {

/// How a device chooses its next slot.
enum class SlotPick {
  first,   ///< first grid slot at least one period after the previous uplink
  random,  ///< uniform grid slot inside each period-long window
};

struct DeviceSpec {
  std::string id;
  std::uint32_t dev_addr = 0;
  ClockModel clock = IdealClock{};
  /// Replace a random-walk clock's seed with one derived from the scenario
  /// seed and the device index.
  bool derive_clock_seed = false;
  Nanos tx_period = from_s(30);
  int payload_bytes = 0;
  /// Device-local instant of the first transmission. Drawn uniformly in
  /// whole milliseconds over [0, tx_period) when unset.
  std::optional<Nanos> first_tx;
};

struct Scenario {
  Nanos duration = from_s(3600);
  SlotConfig slot;
  /// Downlink radio used to price extra FOpts bytes in ACK air-time. Without
  /// it every ACK lasts exactly slot.t_rx.
  std::optional<RadioParams> downlink;
  std::vector<DeviceSpec> devices;
  SyncStrategy strategy = SyncStrategy::adaptive;
  Nanos round = from_s(3600);
  std::uint64_t seed = 1;
  double duty_cycle_limit = 0.01;
  double downlink_loss = 0.0;
  SlotPick slot_pick = SlotPick::first;
  ServerTime ref{};
};

/// Throws ConfigError describing the first problem found.
void validate(const Scenario& sc);

struct DriftSample {
  ServerTime at{};
  Nanos signed_drift{};
};

struct DeviceMetrics {
  std::string id;
  std::uint32_t dev_addr = 0;
  int frames = 0;
  int resync_count = 0;
  int out_sync_frames = 0;
  /// Out-of-sync frames other than the bootstrap frame.
  int slot_violations = 0;
  std::optional<bool> first_frame_in_sync;
  std::vector<DriftSample> drift_series;
  /// Fixed-rate only: drift logged at each round boundary.
  std::vector<DriftSample> round_drifts;
};

struct DownlinkTx {
  ServerTime start{};
  Nanos airtime{};
  std::size_t sync_bytes = 0;
};

struct GatewayMetrics {
  int downlink_count = 0;
  std::size_t sync_overhead_bytes = 0;
  Nanos downlink_airtime{};
  double duty_cycle_used_fraction = 0.0;
  std::vector<DownlinkTx> downlinks;
};

struct Metrics {
  SyncStrategy strategy = SyncStrategy::adaptive;
  Nanos duration{};
  double duty_cycle_limit = 0.01;
  std::vector<DeviceMetrics> devices;
  GatewayMetrics gateway;
  int collision_count = 0;
  int frames_total = 0;

  int total_resyncs() const;
  int total_violations() const;
};

/// One row per uplink, in arrival order.
struct TraceRow {
  std::size_t frame_index = 0;
  std::string device_id;
  ServerTime true_time{};  ///< end of the uplink at the server
  Nanos arrival_position{};
  Nanos signed_drift{};
  bool in_sync = false;
  bool resync = false;
  std::optional<std::uint32_t> remaining_ms;
  SyncStrategy strategy = SyncStrategy::adaptive;

  friend bool operator==(const TraceRow&, const TraceRow&) = default;
};

using Trace = std::vector<TraceRow>;

struct RunResult {
  Metrics metrics;
  Trace trace;
};

/// Deterministic discrete-event run of a scenario on virtual time.
RunResult run(const Scenario& sc);

/// Out of sync here means a guard interval was exceeded.
bool detect_violation(Nanos arrival_pos, const SlotConfig& cfg);

/// Worst downlink air-time fraction over any window of length `window`.
double duty_cycle_report(const Metrics& m, Nanos window);

}  // namespace lorasync
