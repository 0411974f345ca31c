#include "lorasync/sim.hpp"

#include <algorithm>
#include <queue>
#include <random>
#include <set>
#include <string>

#include "lorasync/errors.hpp"
#include "lorasync/frame.hpp"

namespace lorasync {

void validate(const Scenario& sc) {
  if (sc.duration <= Nanos::zero()) throw ConfigError("scenario duration must be positive", 0);
  try {
    validate(sc.slot);
    if (sc.downlink) validate(*sc.downlink);
  } catch (const ParameterError& e) {
    throw ConfigError(e.what(), 0);
  }
  if (sc.strategy == SyncStrategy::fixed_rate && sc.round <= Nanos::zero())
    throw ConfigError("fixed-rate round length must be positive", 0);
  if (!(sc.duty_cycle_limit > 0.0 && sc.duty_cycle_limit <= 1.0))
    throw ConfigError("duty_cycle_limit must be in (0, 1]", 0);
  if (!(sc.downlink_loss >= 0.0 && sc.downlink_loss <= 1.0))
    throw ConfigError("downlink_loss must be in [0, 1]", 0);
  std::set<std::string> ids;
  std::set<std::uint32_t> addrs;
  for (const DeviceSpec& d : sc.devices) {
    if (!ids.insert(d.id).second) throw ConfigError("duplicate device id '" + d.id + "'", 0);
    if (!addrs.insert(d.dev_addr).second) throw ConfigError("duplicate dev_addr for device '" + d.id + "'", 0);
    if (d.tx_period <= Nanos::zero()) throw ConfigError("device '" + d.id + "': tx_period must be positive", 0);
    if (d.payload_bytes < 0 || std::size_t(d.payload_bytes) + kUplinkHeaderBytes > kMaxFrameBytes)
      throw ConfigError("device '" + d.id + "': payload_bytes out of range", 0);
    if (d.first_tx && *d.first_tx < Nanos::zero())
      throw ConfigError("device '" + d.id + "': first transmission precedes time 0", 0);
    try {
      validate(d.clock);
    } catch (const ParameterError& e) {
      throw ConfigError("device '" + d.id + "': " + e.what(), 0);
    }
  }
}

int Metrics::total_resyncs() const {
  int n = 0;
  for (const auto& d : devices) n += d.resync_count;
  return n;
}

int Metrics::total_violations() const {
  int n = 0;
  for (const auto& d : devices) n += d.slot_violations;
  return n;
}

bool detect_violation(Nanos arrival_pos, const SlotConfig& cfg) {
  return !uplink_end_in_sync(arrival_pos, cfg).in_sync;
}

double duty_cycle_report(const Metrics& m, Nanos window) {
  if (window <= Nanos::zero() || window > m.duration)
    throw ParameterError("duty-cycle window must be in (0, duration]");
  const auto& tx = m.gateway.downlinks;
  if (tx.empty()) return 0.0;

  // The busiest window has an edge aligned with some transmission edge.
  auto busy_in = [&](ServerTime from) {
    const ServerTime to = from + window;
    Nanos busy{};
    for (const DownlinkTx& d : tx) {
      const ServerTime lo = std::max(from, d.start);
      const ServerTime hi = std::min(to, d.start + d.airtime);
      if (hi > lo) busy += hi - lo;
    }
    return busy;
  };
  Nanos worst{};
  for (const DownlinkTx& d : tx) {
    worst = std::max(worst, busy_in(d.start));
    worst = std::max(worst, busy_in(d.start + d.airtime - window));
  }
  return static_cast<double>(worst.count()) / static_cast<double>(window.count());
}

namespace {

enum class EventKind { uplink_start, uplink_end, rx1_open, ack_end, round_boundary };

struct Event {
  ServerTime at{};
  EventKind kind{};
  std::size_t device = 0;
  std::uint64_t seq = 0;

  bool operator>(const Event& o) const { return at != o.at ? at > o.at : seq > o.seq; }
};

struct DeviceRuntime {
  const DeviceSpec* spec = nullptr;
  SimClock clock;
  EndDevice ed;
  std::mt19937_64 rng;
  std::uint16_t fcnt = 0;
  DeviceTime planned_local{};
  DeviceTime window_origin{};
  DeviceTime beg_local{};
  std::optional<AckPlan> pending;
  bool ack_lost = false;
};

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(stream)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return std::uint64_t(words[0]) << 32 | words[1];
}

ClockModel realize_clock(const DeviceSpec& d, std::uint64_t scenario_seed, std::size_t index) {
  ClockModel model = d.clock;
  if (d.derive_clock_seed)
    if (auto* rw = std::get_if<RandomWalkPpm>(&model)) rw->seed = mix_seed(scenario_seed, index, 1);
  return model;
}

class Simulation {
 public:
  explicit Simulation(const Scenario& sc)
      : sc_(sc),
        server_(TimelineRef(sc.ref), sc.slot, sc.strategy),
        end_(ServerTime(sc.duration)),
        loss_rng_(mix_seed(sc.seed, 0, 3)) {
    if (sc.downlink) base_ack_airtime_ = time_on_air(*sc.downlink).packet;
    devices_.reserve(sc.devices.size());
    for (std::size_t i = 0; i < sc.devices.size(); ++i) {
      const DeviceSpec& d = sc.devices[i];
      devices_.push_back(DeviceRuntime{&d, SimClock(realize_clock(d, sc.seed, i)),
                                       EndDevice(d.tx_period, sc.slot.slot_length()),
                                       std::mt19937_64(mix_seed(sc.seed, i, 2)), 0, {}, {}, {}, std::nullopt, false});
      DeviceMetrics dm;
      dm.id = d.id;
      dm.dev_addr = d.dev_addr;
      result_.metrics.devices.push_back(std::move(dm));
    }
    result_.metrics.strategy = sc.strategy;
    result_.metrics.duration = sc.duration;
    result_.metrics.duty_cycle_limit = sc.duty_cycle_limit;
  }

  RunResult run() {
    for (std::size_t i = 0; i < devices_.size(); ++i) schedule_first(i);
    if (sc_.strategy == SyncStrategy::fixed_rate)
      for (ServerTime t = sc_.ref + sc_.round; t <= end_; t += sc_.round) push(t, EventKind::round_boundary, 0);

    while (!queue_.empty()) {
      const Event ev = queue_.top();
      queue_.pop();
      switch (ev.kind) {
        case EventKind::uplink_start: on_uplink_start(ev); break;
        case EventKind::uplink_end: on_uplink_end(ev); break;
        case EventKind::rx1_open: on_rx1_open(ev); break;
        case EventKind::ack_end: on_ack_end(ev); break;
        case EventKind::round_boundary: on_round(ev); break;
      }
    }

    for (DeviceMetrics& dm : result_.metrics.devices)
      if (const DeviceRecord* rec = server_.find(dm.dev_addr)) dm.resync_count = rec->resync_count;

    GatewayMetrics& gw = result_.metrics.gateway;
    gw.duty_cycle_used_fraction =
        static_cast<double>(gw.downlink_airtime.count()) / static_cast<double>(sc_.duration.count());
    return std::move(result_);
  }

 private:
  void push(ServerTime at, EventKind kind, std::size_t device) { queue_.push({at, kind, device, seq_++}); }

  void schedule_first(std::size_t i) {
    DeviceRuntime& d = devices_[i];
    Nanos phase;
    if (d.spec->first_tx) {
      phase = *d.spec->first_tx;
    } else {
      const std::int64_t period_ms = std::max<std::int64_t>(1, d.spec->tx_period.count() / 1'000'000);
      phase = from_ms(std::uniform_int_distribution<std::int64_t>(0, period_ms - 1)(d.rng));
    }
    DeviceTime local(phase);
    d.window_origin = local;
    if (sc_.strategy == SyncStrategy::fixed_rate) {
      // The baseline starts from a grid agreed at join time.
      d.ed.adopt_grid(DeviceTime(sc_.ref.time_since_epoch()));
      local = d.ed.next_tx_time(local);
    }
    schedule_tx(i, local);
  }

  void schedule_tx(std::size_t i, DeviceTime local) {
    DeviceRuntime& d = devices_[i];
    const ServerTime at = d.clock.server_time_at(local);
    if (at >= end_) return;
    d.planned_local = local;
    push(at, EventKind::uplink_start, i);
  }

  DeviceTime pick_next(DeviceRuntime& d, DeviceTime now) {
    const DeviceTime first = d.ed.next_tx_time(now);
    if (sc_.slot_pick == SlotPick::first || !d.ed.last_tx()) return first;

    const Nanos period = d.spec->tx_period;
    const std::int64_t k = floor_div((*d.ed.last_tx() - d.window_origin).count(), period.count()) + 1;
    const DeviceTime w0 = d.window_origin + k * period;
    const DeviceTime lo = d.ed.grid_at_or_after(std::max({w0, *d.ed.last_tx() + d.ed.slot_length(), now}));
    const Nanos slot = d.ed.slot_length();
    const std::int64_t count = lo < w0 + period ? ceil_div((w0 + period - lo).count(), slot.count()) : 0;
    if (count <= 0) return first;
    const std::int64_t pick = std::uniform_int_distribution<std::int64_t>(0, count - 1)(d.rng);
    return lo + pick * slot;
  }

  void on_uplink_start(const Event& ev) {
    DeviceRuntime& d = devices_[ev.device];
    d.ed.on_transmit(d.planned_local);

    const ServerTime end = ev.at + sc_.slot.t_tx;
    std::erase_if(active_, [&](const auto& a) { return a.second <= ev.at; });
    result_.metrics.collision_count += static_cast<int>(active_.size());
    active_.emplace_back(ev.at, end);
    push(end, EventKind::uplink_end, ev.device);
  }

  void on_uplink_end(const Event& ev) {
    DeviceRuntime& d = devices_[ev.device];
    DeviceMetrics& dm = result_.metrics.devices[ev.device];
    d.beg_local = d.clock.local_time(ev.at);

    // Round-trip the uplink through the codec so the server sees wire data.
    const UplinkFrame up{d.spec->dev_addr, d.fcnt++, kSyncFPort, Bytes(std::size_t(d.spec->payload_bytes), 0)};
    const UplinkFrame rx = decode_uplink(encode_uplink(up));

    const AckPlan plan = server_.on_uplink_end(rx.dev_addr, rx.fcnt, ev.at);
    const bool first = !dm.first_frame_in_sync.has_value();
    if (first) dm.first_frame_in_sync = plan.verdict.in_sync;

    ++dm.frames;
    ++result_.metrics.frames_total;
    if (!plan.verdict.in_sync) {
      ++dm.out_sync_frames;
      if (!first) ++dm.slot_violations;
    }
    dm.drift_series.push_back({ev.at, plan.verdict.signed_drift});

    result_.trace.push_back(TraceRow{result_.trace.size(), d.spec->id, ev.at, plan.arrival_position,
                                     plan.verdict.signed_drift, plan.verdict.in_sync,
                                     plan.remaining_ms.has_value(), plan.remaining_ms, sc_.strategy});
    d.pending = plan;
    push(plan.scheduled_tx, EventKind::rx1_open, ev.device);
  }

  Nanos ack_airtime(std::size_t sync_bytes) const {
    if (!sc_.downlink || sync_bytes == 0) return sc_.slot.t_rx;
    RadioParams p = *sc_.downlink;
    p.pl_bytes = std::min(255, p.pl_bytes + static_cast<int>(sync_bytes));
    return sc_.slot.t_rx + (time_on_air(p).packet - base_ack_airtime_);
  }

  void on_rx1_open(const Event& ev) {
    DeviceRuntime& d = devices_[ev.device];
    const std::size_t sync_bytes = d.pending->remaining_ms ? sync_bytes_per_resync(sc_.strategy) : 0;
    const Nanos airtime = ack_airtime(sync_bytes);

    GatewayMetrics& gw = result_.metrics.gateway;
    ++gw.downlink_count;
    if (sc_.strategy == SyncStrategy::adaptive) gw.sync_overhead_bytes += sync_bytes;
    gw.downlink_airtime += airtime;
    gw.downlinks.push_back({ev.at, airtime, sync_bytes});

    d.ack_lost = sc_.downlink_loss > 0.0 && std::bernoulli_distribution(sc_.downlink_loss)(loss_rng_);
    push(ev.at + airtime, EventKind::ack_end, ev.device);
  }

  void on_ack_end(const Event& ev) {
    DeviceRuntime& d = devices_[ev.device];
    const DeviceTime end_local = d.clock.local_time(ev.at);
    if (!d.ack_lost) {
      const SyncAck ack = decode_ack(encode_ack(d.pending->ack()));
      d.ed.on_ack(d.beg_local, end_local, ack);
    }
    d.pending.reset();
    schedule_tx(ev.device, pick_next(d, end_local));
  }

  void on_round(const Event& ev) {
    for (const RoundAction& a : server_.fixed_rate_round()) {
      result_.metrics.gateway.sync_overhead_bytes += kBaselineSyncBytes;
      for (DeviceMetrics& dm : result_.metrics.devices)
        if (dm.dev_addr == a.dev_addr) dm.round_drifts.push_back({ev.at, a.drift_at_round_end});
    }
  }

  const Scenario& sc_;
  NetworkServer server_;
  ServerTime end_;
  std::vector<DeviceRuntime> devices_;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> queue_;
  std::uint64_t seq_ = 0;
  std::vector<std::pair<ServerTime, ServerTime>> active_;
  std::mt19937_64 loss_rng_;
  Nanos base_ack_airtime_{};
  RunResult result_;
};

}  // namespace

RunResult run(const Scenario& sc) {
  validate(sc);
  return Simulation(sc).run();
}

}  // namespace lorasync
