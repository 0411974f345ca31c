#include "lorasync/frame.hpp"

#include <string>

#include "lorasync/errors.hpp"

namespace lorasync {

namespace {

void put_le32(Bytes& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_le16(Bytes& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

std::uint32_t get_le32(std::span<const std::uint8_t> b, std::size_t at) {
  return std::uint32_t(b[at]) | std::uint32_t(b[at + 1]) << 8 | std::uint32_t(b[at + 2]) << 16 |
         std::uint32_t(b[at + 3]) << 24;
}

std::uint16_t get_le16(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint16_t>(b[at] | b[at + 1] << 8);
}

// Shared MHDR | DevAddr | FCtrl | FCnt prefix. Returns FOptsLen.
std::size_t check_header(std::span<const std::uint8_t> bytes, std::uint8_t mhdr, std::size_t min_len) {
  if (bytes.empty()) throw DecodeError("empty frame", 0);
  if (bytes[0] != mhdr) throw DecodeError("unexpected MHDR " + std::to_string(bytes[0]), 0);
  if (bytes.size() < min_len) throw DecodeError("truncated header", bytes.size());
  if (bytes.size() > kMaxFrameBytes) throw DecodeError("frame longer than 255 bytes", kMaxFrameBytes);
  return bytes[5] & 0x0F;
}

}  // namespace

Bytes encode_uplink(const UplinkFrame& f) {
  if (kUplinkHeaderBytes + f.payload.size() > kMaxFrameBytes)
    throw EncodeError("uplink payload of " + std::to_string(f.payload.size()) + " bytes exceeds the " +
                      std::to_string(kMaxFrameBytes - kUplinkHeaderBytes) + "-byte limit");
  Bytes out;
  out.reserve(kUplinkHeaderBytes + f.payload.size());
  out.push_back(kMhdrUnconfirmedUp);
  put_le32(out, f.dev_addr);
  out.push_back(0x00);
  put_le16(out, f.fcnt);
  out.push_back(f.fport);
  out.insert(out.end(), f.payload.begin(), f.payload.end());
  return out;
}

UplinkFrame decode_uplink(std::span<const std::uint8_t> bytes) {
  const std::size_t fopts_len = check_header(bytes, kMhdrUnconfirmedUp, kUplinkHeaderBytes);
  if (fopts_len != 0) throw DecodeError("uplink FOpts are not supported", 5);
  UplinkFrame f;
  f.dev_addr = get_le32(bytes, 1);
  f.fcnt = get_le16(bytes, 6);
  f.fport = bytes[8];
  f.payload.assign(bytes.begin() + kUplinkHeaderBytes, bytes.end());
  return f;
}

Bytes encode_ack(const SyncAck& a) {
  if (a.remaining_ms && *a.remaining_ms > 0xFFFF)
    throw EncodeError("remaining time " + std::to_string(*a.remaining_ms) + " ms does not fit in 2 bytes");
  Bytes out;
  out.reserve(kAckHeaderBytes + kSyncOptionBytes);
  out.push_back(kMhdrUnconfirmedDown);
  put_le32(out, a.dev_addr);
  out.push_back(a.remaining_ms ? static_cast<std::uint8_t>(kSyncOptionBytes) : 0x00);
  put_le16(out, a.fcnt);
  if (a.remaining_ms) {
    out.push_back(static_cast<std::uint8_t>(*a.remaining_ms >> 8));
    out.push_back(static_cast<std::uint8_t>(*a.remaining_ms));
  }
  return out;
}

SyncAck decode_ack(std::span<const std::uint8_t> bytes) {
  const std::size_t fopts_len = check_header(bytes, kMhdrUnconfirmedDown, kAckHeaderBytes);
  if (fopts_len != 0 && fopts_len != kSyncOptionBytes)
    throw DecodeError("unsupported FOptsLen " + std::to_string(fopts_len), 5);
  if (bytes.size() < kAckHeaderBytes + fopts_len)
    throw DecodeError("truncated FOpts", bytes.size());
  if (bytes.size() > kAckHeaderBytes + fopts_len)
    throw DecodeError("trailing bytes after FOpts", kAckHeaderBytes + fopts_len);
  SyncAck a;
  a.dev_addr = get_le32(bytes, 1);
  a.fcnt = get_le16(bytes, 6);
  if (fopts_len == kSyncOptionBytes)
    a.remaining_ms = std::uint32_t(bytes[8]) << 8 | bytes[9];
  return a;
}

}  // namespace lorasync
