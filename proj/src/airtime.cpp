#include "lorasync/airtime.hpp"

#include <algorithm>
#include <bit>
#include <string>

#include "lorasync/errors.hpp"

namespace lorasync {

void validate(const RadioParams& p) {
  if (p.sf < 5 || p.sf > 12)
    throw ParameterError("spreading factor must be in 5..12, got " + std::to_string(p.sf));
  if (p.bw_hz != 125'000 && p.bw_hz != 250'000 && p.bw_hz != 500'000)
    throw ParameterError("bandwidth must be 125, 250 or 500 kHz, got " + std::to_string(p.bw_hz) + " Hz");
  if (p.cr < 1 || p.cr > 4)
    throw ParameterError("coding rate index must be in 1..4, got " + std::to_string(p.cr));
  if (p.n_preamble < 1)
    throw ParameterError("preamble length must be at least 1 symbol");
  if (p.pl_bytes < 0 || p.pl_bytes > 255)
    throw ParameterError("payload length must be in 0..255, got " + std::to_string(p.pl_bytes));
  if (p.sf - 2 * int(p.low_datarate_opt) <= 0)
    throw ParameterError("SF - 2*DE must be positive");
}

Nanos symbol_period(const RadioParams& p) {
  validate(p);
  return Nanos((std::int64_t{1} << p.sf) * 1'000'000'000LL / p.bw_hz);
}

int payload_symbol_count(const RadioParams& p) {
  validate(p);
  const std::int64_t numerator = 8LL * p.pl_bytes - 4LL * p.sf + 28 + 16LL * p.crc_on -
                                 20LL * p.implicit_header;
  const std::int64_t denominator = 4LL * (p.sf - 2 * int(p.low_datarate_opt));
  const std::int64_t n_bits = ceil_div(numerator, denominator);
  return static_cast<int>(8 + std::max<std::int64_t>(n_bits * (p.cr + 4), 0));
}

AirTime time_on_air(const RadioParams& p) {
  const Nanos ts = symbol_period(p);
  AirTime at;
  at.n_payload_symbols = payload_symbol_count(p);
  at.preamble = Nanos((4LL * p.n_preamble + 17) * ts.count() / 4);
  at.payload = at.n_payload_symbols * ts;
  at.packet = at.preamble + at.payload;
  return at;
}

RadioParams longest_airtime_params() {
  RadioParams p;
  p.sf = 12;
  p.bw_hz = 125'000;
  p.cr = 4;
  p.n_preamble = 8;
  p.pl_bytes = 255;
  p.crc_on = true;
  p.implicit_header = false;
  p.low_datarate_opt = false;
  return p;
}

int remaining_time_bit_width(std::int64_t max_slot_ms) {
  if (max_slot_ms < 1) throw ParameterError("max slot length must be at least 1 ms");
  return static_cast<int>(std::bit_width(static_cast<std::uint64_t>(max_slot_ms - 1)));
}

}  // namespace lorasync
