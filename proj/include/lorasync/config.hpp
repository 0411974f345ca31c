#pragma once

#include <filesystem>
#include <string_view>

#include "lorasync/sim.hpp"

namespace lorasync {

// Scenario files are flat INI-style text:
//
//   [scenario]   duration_s, seed, strategy, round_s, duty_cycle_limit,
//                downlink_loss, slot_pick, ref_ms
//   [slot]       t_tx_ms, rx_delay_ms, t_rx_ms, tb1_ms, tb2_ms
//   [uplink]     sf, bw_khz, cr, preamble, pl, crc, ih, de   (optional)
//   [downlink]   same keys                                   (optional)
//   [device ID]  dev_addr, clock, offset_ppm, initial_ppm, step_interval_s,
//                step_std_ppm, clock_seed, segments, tx_period_s,
//                payload_bytes, first_tx_ms
//
// '#' and ';' start comments. Durations accept decimals. When t_tx_ms or
// t_rx_ms is omitted it is computed from the [uplink] / [downlink] radio.

/// Throws ConfigError with the offending line number.
Scenario parse_scenario(std::string_view text);

/// Throws ConfigError for parse errors, std::runtime_error for IO errors.
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace lorasync
