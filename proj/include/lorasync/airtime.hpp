#pragma once

#include <cstdint>

#include "lorasync/time.hpp"

namespace lorasync {

/// LoRa physical-layer parameters that determine packet time-on-air.
struct RadioParams {
  int sf = 7;                  ///< spreading factor, 5..12
  int bw_hz = 125'000;         ///< 125000, 250000 or 500000
  int cr = 1;                  ///< coding rate index 1..4 (4/5 .. 4/8)
  int n_preamble = 8;
  int pl_bytes = 0;            ///< PHY payload length, 0..255
  bool crc_on = true;
  bool implicit_header = false;
  bool low_datarate_opt = false;

  friend bool operator==(const RadioParams&, const RadioParams&) = default;
};

struct AirTime {
  Nanos preamble{};
  Nanos payload{};
  Nanos packet{};
  int n_payload_symbols = 0;
};

/// Throws ParameterError if any field is outside its domain.
void validate(const RadioParams& p);

/// Ts = 2^SF / BW. Exact in nanoseconds for every LoRaWAN bandwidth.
Nanos symbol_period(const RadioParams& p);

/// 8 + max(ceil((8PL - 4SF + 28 + 16CRC - 20IH) / (4(SF - 2DE))) * (CR + 4), 0)
int payload_symbol_count(const RadioParams& p);

/// Preamble lasts (n_preamble + 4.25) symbols; 4.25 Ts is always a whole
/// number of nanoseconds because Ts is a multiple of 4 ns.
AirTime time_on_air(const RadioParams& p);

/// Parameter set with the longest possible LoRaWAN uplink (SF12, 125 kHz,
/// CR 4/8, 255-byte payload, explicit header with CRC, DE off).
RadioParams longest_airtime_params();

/// Bits needed to carry a remaining-time value up to `max_slot_ms`:
/// ceil(log2(max_slot_ms)).
int remaining_time_bit_width(std::int64_t max_slot_ms);

}  // namespace lorasync
