#include <doctest.h>

#include <random>

#include "lorasync/errors.hpp"
#include "lorasync/protocol.hpp"

using namespace lorasync;

namespace {

SlotConfig reference_slot() {
  return {from_ms(306), from_ms(1000), from_ms(91), from_ms(180), from_ms(180)};
}

DeviceTime local_ms(std::int64_t ms) { return DeviceTime(from_ms(ms)); }

// Earliest grid point >= target by walking the grid one slot at a time.
DeviceTime brute_grid(DeviceTime slot_start, Nanos slot, DeviceTime target) {
  DeviceTime g = slot_start;
  while (g < target) g += slot;
  while (g - slot >= target) g -= slot;
  return g;
}

}  // namespace

TEST_CASE("server: ideal arrival needs no resync") {
  NetworkServer ns(TimelineRef(ServerTime{}), reference_slot());
  const AckPlan p = ns.on_uplink_end(1, 0, ServerTime(from_ms(306)));
  CHECK(p.verdict.in_sync);
  CHECK(p.verdict.signed_drift == Nanos::zero());
  CHECK_FALSE(p.remaining_ms.has_value());
  CHECK(p.scheduled_tx == ServerTime(from_ms(1306)));
  CHECK(ns.find(1)->last_signed_drift == Nanos::zero());
  CHECK(ns.find(1)->resync_count == 0);
}

TEST_CASE("server: out-of-sync arrival carries the remaining time") {
  NetworkServer ns(TimelineRef(ServerTime{}), reference_slot());
  const AckPlan p = ns.on_uplink_end(1, 0, ServerTime(from_ms(4000)));
  CHECK_FALSE(p.verdict.in_sync);
  CHECK(p.arrival_position == from_ms(486));
  CHECK(p.remaining_ms == 1271u);
  CHECK(p.first_frame);
  CHECK(ns.find(1)->resync_count == 1);
  CHECK(ns.find(1)->out_sync_count == 1);

  const AckPlan boundary = ns.on_uplink_end(2, 0, ServerTime(from_ms(3514)));
  CHECK(boundary.verdict.signed_drift == from_ms(306));
  CHECK(boundary.remaining_ms == 1757u);
  CHECK(boundary.ack().remaining_ms == 1757u);
}

TEST_CASE("server: unknown devices auto-register and counters only grow") {
  NetworkServer ns(TimelineRef(ServerTime{}), reference_slot());
  CHECK(ns.find(42) == nullptr);
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::int64_t> jitter(0, 2'000'000'000);
  int prev_resync = 0, prev_out = 0;
  ServerTime t{};
  for (std::uint16_t fcnt = 0; fcnt < 500; ++fcnt) {
    t += from_s(30) + Nanos(jitter(rng));
    ns.on_uplink_end(42, fcnt, t);
    const DeviceRecord* r = ns.find(42);
    REQUIRE(r != nullptr);
    REQUIRE(r->resync_count >= prev_resync);
    REQUIRE(r->out_sync_count >= prev_out);
    REQUIRE(r->resync_count == r->out_sync_count);  // adaptive resyncs exactly the out-of-sync frames
    REQUIRE(r->last_seen_fcnt == fcnt);
    prev_resync = r->resync_count;
    prev_out = r->out_sync_count;
  }
  CHECK(ns.find(42)->frames == 500);
}

TEST_CASE("fixed-rate rounds resync everyone once, in sync or not") {
  NetworkServer ns(TimelineRef(ServerTime{}), reference_slot(), SyncStrategy::fixed_rate);
  CHECK(ns.fixed_rate_round().empty());

  ns.on_uplink_end(1, 0, ServerTime(from_ms(306)));
  ns.on_uplink_end(2, 0, ServerTime(from_ms(1757 + 400)));
  const auto actions = ns.fixed_rate_round();
  REQUIRE(actions.size() == 2);
  CHECK(actions[0].drift_at_round_end == Nanos::zero());
  CHECK(actions[1].drift_at_round_end == -from_ms(94));
  CHECK(ns.find(1)->resync_count == 1);

  const AckPlan in_sync = ns.on_uplink_end(1, 1, ServerTime(from_ms(20 * 1757 + 306)));
  CHECK(in_sync.verdict.in_sync);
  CHECK(in_sync.remaining_ms == 1451u);
  const AckPlan again = ns.on_uplink_end(1, 2, ServerTime(from_ms(40 * 1757 + 1000)));
  CHECK_FALSE(again.verdict.in_sync);
  CHECK_FALSE(again.remaining_ms.has_value());  // between rounds nothing is sent
  CHECK(ns.find(1)->resync_count == 1);

  NetworkServer adaptive(TimelineRef(ServerTime{}), reference_slot());
  CHECK_THROWS_AS(adaptive.fixed_rate_round(), UsageError);
  CHECK(sync_bytes_per_resync(SyncStrategy::adaptive) == 2);
  CHECK(sync_bytes_per_resync(SyncStrategy::fixed_rate) == 8);
}

TEST_CASE("device: first transmission bootstraps the slot reference") {
  EndDevice ed(from_s(30), from_ms(1757));
  CHECK_FALSE(ed.has_transmitted());
  CHECK(ed.next_tx_time(DeviceTime(Nanos(12345))) == DeviceTime(Nanos(12345)));
  ed.on_transmit(DeviceTime(Nanos(12345)));
  CHECK(ed.has_transmitted());
  CHECK(ed.slot_start() == DeviceTime(Nanos(12345)));
}

TEST_CASE("device: next transmission is the first grid slot one period later") {
  EndDevice ed(from_s(30), from_ms(1757));
  ed.on_transmit(local_ms(0));
  CHECK(ed.next_tx_time(local_ms(1500)) == local_ms(31626));
  CHECK(ed.next_tx_time(local_ms(18 * 1757)) == local_ms(18 * 1757));
  CHECK(ed.next_tx_time(local_ms(18 * 1757 + 1)) == local_ms(19 * 1757));

  std::mt19937_64 rng(8);
  std::uniform_int_distribution<std::int64_t> any(-5'000'000'000, 500'000'000'000);
  for (int i = 0; i < 5000; ++i) {
    EndDevice d(Nanos(any(rng) & 0xFFFFFFFFFF), from_ms(1757));
    const DeviceTime start(Nanos(any(rng)));
    d.on_transmit(start);
    const DeviceTime now(Nanos(any(rng)));
    const DeviceTime target = std::max(now, start + d.tx_period());
    REQUIRE(d.next_tx_time(now) == brute_grid(start, from_ms(1757), target));
  }
}

TEST_CASE("device: resync from the remaining time") {
  const Nanos slot = from_ms(1757);
  SUBCASE("remaining covers the elapsed time") {
    EndDevice ed(from_s(30), slot);
    ed.on_transmit(local_ms(0));
    const DeviceTime beg = local_ms(10'000), end = local_ms(11'091);
    ed.on_ack(beg, end, SyncAck{1, 0, 1271});
    CHECK(ed.slot_start() == end + from_ms(180));
  }
  SUBCASE("elapsed longer than remaining wraps by one slot") {
    EndDevice ed(from_s(30), slot);
    ed.on_transmit(local_ms(0));
    const DeviceTime beg = local_ms(10'000), end = local_ms(11'091);
    ed.on_ack(beg, end, SyncAck{1, 0, 100});
    CHECK(ed.slot_start() == end + from_ms(766));
  }
  SUBCASE("in-sync ACK leaves the grid alone") {
    EndDevice ed(from_s(30), slot);
    ed.on_transmit(local_ms(5));
    ed.on_ack(local_ms(311), local_ms(1402), SyncAck{1, 0, std::nullopt});
    CHECK(ed.slot_start() == local_ms(5));
  }
  SUBCASE("reversed timestamps are rejected") {
    EndDevice ed(from_s(30), slot);
    CHECK_THROWS_AS(ed.on_ack(local_ms(10), local_ms(9), SyncAck{1, 0, 5}), UsageError);
  }
}

TEST_CASE("ideal-clock device lands on the ideal arrival line after one resync") {
  // Device and server share an ideal timeline; sweep whole-ms bootstrap phases.
  const SlotConfig cfg = reference_slot();
  for (std::int64_t phase_ms = 0; phase_ms < 1757 * 3; phase_ms += 7) {
    NetworkServer ns(TimelineRef(ServerTime{}), cfg);
    EndDevice ed(from_s(30), cfg.slot_length());

    const DeviceTime tx = ed.next_tx_time(local_ms(phase_ms));
    ed.on_transmit(tx);
    const ServerTime arrival = ServerTime(tx.time_since_epoch()) + cfg.t_tx;
    const AckPlan plan = ns.on_uplink_end(7, 0, arrival);
    const ServerTime ack_end = plan.scheduled_tx + cfg.t_rx;
    ed.on_ack(DeviceTime(arrival.time_since_epoch()), DeviceTime(ack_end.time_since_epoch()), plan.ack());

    const DeviceTime next = ed.next_tx_time(DeviceTime(ack_end.time_since_epoch()));
    const AckPlan second = ns.on_uplink_end(7, 1, ServerTime(next.time_since_epoch()) + cfg.t_tx);
    INFO("phase_ms=" << phase_ms << " drift_ns=" << second.verdict.signed_drift.count());
    // In-sync bootstrap frames get no correction and keep their offset.
    const Nanos expected = plan.verdict.in_sync ? plan.verdict.signed_drift : Nanos::zero();
    REQUIRE(second.verdict.signed_drift == expected);
    REQUIRE_FALSE(second.remaining_ms.has_value());

    // Resyncing again would not move the grid.
    const DeviceTime before = *ed.slot_start();
    ed.on_ack(DeviceTime((ServerTime(next.time_since_epoch()) + cfg.t_tx).time_since_epoch()),
              DeviceTime((second.scheduled_tx + cfg.t_rx).time_since_epoch()),
              SyncAck{7, 1, static_cast<std::uint32_t>(round_ms(cfg.slot_length() - cfg.t_tx))});
    REQUIRE(ed.grid_at_or_after(before) == before);
  }
}
