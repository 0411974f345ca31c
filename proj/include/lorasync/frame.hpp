#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace lorasync {

// Minimal LoRaWAN-1.0-shaped frames. No MIC, no encryption.
//
// Uplink:   MHDR(0x40) | DevAddr(4, LE) | FCtrl(FOptsLen=0) | FCnt(2, LE) | FPort | payload
// Sync ACK: MHDR(0x60) | DevAddr(4, LE) | FCtrl(FOptsLen 0 or 2) | FCnt(2, LE) | FOpts
//
// The ACK's FOpts, when present, is the remaining time to the next slot
// boundary in milliseconds, big-endian. An empty FOpts means "in sync".

using Bytes = std::vector<std::uint8_t>;

inline constexpr std::uint8_t kMhdrUnconfirmedUp = 0x40;
inline constexpr std::uint8_t kMhdrUnconfirmedDown = 0x60;
inline constexpr std::uint8_t kSyncFPort = 198;
inline constexpr std::size_t kMaxFrameBytes = 255;
inline constexpr std::size_t kUplinkHeaderBytes = 9;
inline constexpr std::size_t kAckHeaderBytes = 8;
/// Sync bytes per resynchronization carried by this protocol.
inline constexpr std::size_t kSyncOptionBytes = 2;
/// Sync bytes per resynchronization of the timestamp-based fixed-rate baseline.
inline constexpr std::size_t kBaselineSyncBytes = 8;

struct UplinkFrame {
  std::uint32_t dev_addr = 0;
  std::uint16_t fcnt = 0;
  std::uint8_t fport = kSyncFPort;
  Bytes payload;

  bool uses_sync_protocol() const { return fport == kSyncFPort; }

  friend bool operator==(const UplinkFrame&, const UplinkFrame&) = default;
};

struct SyncAck {
  std::uint32_t dev_addr = 0;
  std::uint16_t fcnt = 0;
  std::optional<std::uint32_t> remaining_ms;  ///< present iff the uplink was out of sync

  friend bool operator==(const SyncAck&, const SyncAck&) = default;
};

/// Throws EncodeError if the frame would exceed 255 bytes.
Bytes encode_uplink(const UplinkFrame& f);
/// Throws DecodeError (with byte offset) on malformed input.
UplinkFrame decode_uplink(std::span<const std::uint8_t> bytes);

/// Throws EncodeError if remaining_ms > 65535.
Bytes encode_ack(const SyncAck& a);
SyncAck decode_ack(std::span<const std::uint8_t> bytes);

}  // namespace lorasync
