#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "lorasync/sim.hpp"

namespace lorasync {

/// Fixed CSV header of the per-frame trace.
inline constexpr const char* kTraceCsvHeader =
    "frame_index,device_id,true_time_ms,arrival_position_ms,signed_drift_ms,in_sync,action,remaining_ms,strategy";

/// Times are printed in ms with microsecond precision; remaining_ms is blank
/// when the ACK carried no sync option.
void write_trace_csv(std::ostream& os, const Trace& trace);
std::string trace_csv(const Trace& trace);

/// 64-bit FNV-1a over the CSV rendering of the trace.
std::uint64_t trace_hash(const Trace& trace);

struct DeviceSummary {
  std::string id;
  int frames = 0;
  int resyncs = 0;
  int out_sync_frames = 0;
  int violations = 0;
};

struct RunSummary {
  SyncStrategy strategy = SyncStrategy::adaptive;
  std::optional<Nanos> round;  ///< fixed-rate round length
  std::vector<DeviceSummary> devices;
  int frames = 0;
  int resyncs = 0;
  int violations = 0;
  int collisions = 0;
  int downlinks = 0;
  std::size_t overhead_bytes = 0;
  double duty_cycle_fraction = 0.0;       ///< downlink air-time / duration
  double worst_hour_duty_cycle = 0.0;     ///< busiest sliding window (1 h or duration)
  double duty_cycle_limit = 0.01;
  // Constants for redrawing the arrival-position plot from the CSV.
  Nanos ideal_arrival{};
  Nanos upper_bound{};
  Nanos lower_bound{};
  Nanos slot_length{};
};

RunSummary summarize(const Scenario& sc, const Metrics& m);

/// Human-readable block followed by a `key=value` block.
void print_summary(std::ostream& os, const RunSummary& s);

/// Fixed-rate cost relative to the adaptive run.
struct OverheadRatio {
  double resyncs = 0.0;  ///< fixed resyncs / adaptive resyncs
  double bytes = 0.0;    ///< fixed sync bytes / adaptive sync bytes
};

std::optional<OverheadRatio> overhead_ratio(const RunSummary& adaptive, const RunSummary& fixed);

/// One column per run; the first column must be the adaptive run.
void print_comparison(std::ostream& os, const std::vector<RunSummary>& runs);

}  // namespace lorasync
