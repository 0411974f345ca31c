#include "lorasync/protocol.hpp"

#include <algorithm>

#include "lorasync/errors.hpp"

namespace lorasync {

const char* to_string(SyncStrategy s) {
  switch (s) {
    case SyncStrategy::adaptive: return "adaptive";
    case SyncStrategy::fixed_rate: return "fixed_rate";
  }
  return "?";
}

std::size_t sync_bytes_per_resync(SyncStrategy s) {
  return s == SyncStrategy::adaptive ? kSyncOptionBytes : kBaselineSyncBytes;
}

NetworkServer::NetworkServer(TimelineRef ref, SlotConfig cfg, SyncStrategy strategy)
    : ref_(ref), cfg_(cfg), strategy_(strategy) {
  validate(cfg_);
}

AckPlan NetworkServer::on_uplink_end(std::uint32_t dev_addr, std::uint16_t fcnt, ServerTime arrival) {
  const Nanos position = position_in_slot(arrival, ref_, cfg_);
  const SyncVerdict verdict = uplink_end_in_sync(position, cfg_);

  auto [it, inserted] = devices_.try_emplace(dev_addr);
  DeviceRecord& rec = it->second;

  AckPlan plan;
  plan.dev_addr = dev_addr;
  plan.fcnt = fcnt;
  plan.scheduled_tx = arrival + cfg_.rx_delay;
  plan.arrival_position = position;
  plan.verdict = verdict;
  plan.first_frame = inserted;

  if (strategy_ == SyncStrategy::adaptive) {
    if (!verdict.in_sync) {
      plan.remaining_ms = static_cast<std::uint32_t>(round_ms(cfg_.slot_length() - position));
      ++rec.resync_count;
    }
  } else if (rec.pending_resync) {
    // Already counted when the round closed.
    plan.remaining_ms = static_cast<std::uint32_t>(round_ms(cfg_.slot_length() - position));
    rec.pending_resync = false;
  }

  ++rec.frames;
  if (!verdict.in_sync) ++rec.out_sync_count;
  rec.last_signed_drift = verdict.signed_drift;
  rec.last_seen_fcnt = fcnt;
  return plan;
}

std::vector<RoundAction> NetworkServer::fixed_rate_round() {
  if (strategy_ != SyncStrategy::fixed_rate)
    throw UsageError("fixed-rate rounds require the fixed_rate strategy");
  std::vector<RoundAction> actions;
  actions.reserve(devices_.size());
  for (auto& [addr, rec] : devices_) {
    rec.pending_resync = true;
    ++rec.resync_count;
    actions.push_back({addr, rec.last_signed_drift});
  }
  return actions;
}

const DeviceRecord* NetworkServer::find(std::uint32_t dev_addr) const {
  auto it = devices_.find(dev_addr);
  return it == devices_.end() ? nullptr : &it->second;
}

EndDevice::EndDevice(Nanos tx_period, Nanos slot_length) : tx_period_(tx_period), slot_length_(slot_length) {
  if (slot_length_ <= Nanos::zero()) throw ParameterError("slot length must be positive");
  if (tx_period_ < Nanos::zero()) throw ParameterError("transmit period must be non-negative");
}

DeviceTime EndDevice::grid_at_or_after(DeviceTime t) const {
  if (!slot_start_) throw UsageError("device has no slot reference yet");
  const std::int64_t k = ceil_div((t - *slot_start_).count(), slot_length_.count());
  return *slot_start_ + k * slot_length_;
}

DeviceTime EndDevice::next_tx_time(DeviceTime now) const {
  if (!slot_start_) return now;
  DeviceTime target = now;
  if (last_tx_) target = std::max(target, *last_tx_ + tx_period_);
  return grid_at_or_after(target);
}

void EndDevice::on_transmit(DeviceTime start) {
  if (!has_transmitted_) {
    has_transmitted_ = true;
    if (!slot_start_) slot_start_ = start;
  }
  last_tx_ = start;
}

void EndDevice::on_ack(DeviceTime beg, DeviceTime end, const SyncAck& ack) {
  if (!ack.remaining_ms) return;
  if (end < beg) throw UsageError("ACK reception precedes the uplink end");
  const Nanos elapsed = end - beg;
  Nanos t = from_ms(*ack.remaining_ms) - elapsed;
  if (t < Nanos::zero()) t = Nanos(floor_mod(t.count(), slot_length_.count()));
  slot_start_ = end + t;
}

void EndDevice::adopt_grid(DeviceTime slot_start) { slot_start_ = slot_start; }

}  // namespace lorasync
