#include "lorasync/report.hpp"

#include <iomanip>
#include <sstream>

namespace lorasync {

void write_trace_csv(std::ostream& os, const Trace& trace) {
  os << kTraceCsvHeader << '\n';
  for (const TraceRow& r : trace) {
    os << r.frame_index << ',' << r.device_id << ',' << format_ms(r.true_time.time_since_epoch()) << ','
       << format_ms(r.arrival_position) << ',' << format_ms(r.signed_drift) << ',' << (r.in_sync ? 1 : 0) << ','
       << (r.resync ? "resync" : "none") << ',';
    if (r.remaining_ms) os << *r.remaining_ms;
    os << ',' << to_string(r.strategy) << '\n';
  }
}

std::string trace_csv(const Trace& trace) {
  std::ostringstream os;
  write_trace_csv(os, trace);
  return os.str();
}

std::uint64_t trace_hash(const Trace& trace) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : trace_csv(trace)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

RunSummary summarize(const Scenario& sc, const Metrics& m) {
  RunSummary s;
  s.strategy = m.strategy;
  if (m.strategy == SyncStrategy::fixed_rate) s.round = sc.round;
  for (const DeviceMetrics& d : m.devices)
    s.devices.push_back({d.id, d.frames, d.resync_count, d.out_sync_frames, d.slot_violations});
  s.frames = m.frames_total;
  s.resyncs = m.total_resyncs();
  s.violations = m.total_violations();
  s.collisions = m.collision_count;
  s.downlinks = m.gateway.downlink_count;
  s.overhead_bytes = m.gateway.sync_overhead_bytes;
  s.duty_cycle_fraction = m.gateway.duty_cycle_used_fraction;
  s.worst_hour_duty_cycle = duty_cycle_report(m, std::min(m.duration, Nanos(from_s(3600))));
  s.duty_cycle_limit = m.duty_cycle_limit;
  s.ideal_arrival = sc.slot.t_tx;
  s.upper_bound = sc.slot.t_tx + sc.slot.tb2;
  s.lower_bound = sc.slot.t_tx - sc.slot.tb1;
  s.slot_length = sc.slot.slot_length();
  return s;
}

namespace {

std::string percent(double fraction) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4) << fraction * 100.0 << '%';
  return os.str();
}

std::string label(const RunSummary& s) {
  if (!s.round) return "adaptive";
  return "fixed " + std::to_string(std::chrono::duration_cast<std::chrono::seconds>(*s.round).count()) + "s";
}

}  // namespace

void print_summary(std::ostream& os, const RunSummary& s) {
  os << "strategy: " << label(s) << '\n'
     << "slot: " << format_ms(s.slot_length) << " ms, ideal arrival " << format_ms(s.ideal_arrival)
     << " ms, in-sync window (" << format_ms(s.lower_bound) << ", " << format_ms(s.upper_bound) << ") ms\n";
  for (const DeviceSummary& d : s.devices)
    os << "  device " << d.id << ": frames " << d.frames << ", resyncs " << d.resyncs << ", out-of-sync "
       << d.out_sync_frames << ", violations " << d.violations << '\n';
  os << "frames " << s.frames << ", resyncs " << s.resyncs << ", violations " << s.violations << ", collisions "
     << s.collisions << '\n'
     << "downlinks " << s.downlinks << ", sync overhead " << s.overhead_bytes << " bytes\n"
     << "duty cycle " << percent(s.duty_cycle_fraction) << " (worst window " << percent(s.worst_hour_duty_cycle)
     << ", limit " << percent(s.duty_cycle_limit) << ")\n";

  os << "\n[summary]\n"
     << "strategy=" << to_string(s.strategy) << '\n';
  if (s.round) os << "round_s=" << std::chrono::duration_cast<std::chrono::seconds>(*s.round).count() << '\n';
  os << "frames=" << s.frames << '\n'
     << "resyncs=" << s.resyncs << '\n'
     << "violations=" << s.violations << '\n'
     << "collisions=" << s.collisions << '\n'
     << "downlinks=" << s.downlinks << '\n'
     << (s.strategy == SyncStrategy::adaptive ? "adaptive_overhead_bytes=" : "baseline_overhead_bytes=")
     << s.overhead_bytes << '\n'
     << "duty_cycle_fraction=" << std::setprecision(9) << s.duty_cycle_fraction << '\n'
     << "worst_window_duty_cycle=" << s.worst_hour_duty_cycle << '\n'
     << "duty_cycle_within_limit=" << (s.worst_hour_duty_cycle <= s.duty_cycle_limit ? 1 : 0) << '\n'
     << "slot_ms=" << format_ms(s.slot_length) << '\n'
     << "ideal_arrival_ms=" << format_ms(s.ideal_arrival) << '\n'
     << "upper_bound_ms=" << format_ms(s.upper_bound) << '\n'
     << "lower_bound_ms=" << format_ms(s.lower_bound) << '\n';
  for (const DeviceSummary& d : s.devices)
    os << "device." << d.id << ".resyncs=" << d.resyncs << '\n'
       << "device." << d.id << ".violations=" << d.violations << '\n';
}

std::optional<OverheadRatio> overhead_ratio(const RunSummary& adaptive, const RunSummary& fixed) {
  if (adaptive.resyncs == 0 || adaptive.overhead_bytes == 0) return std::nullopt;
  return OverheadRatio{static_cast<double>(fixed.resyncs) / adaptive.resyncs,
                       static_cast<double>(fixed.overhead_bytes) / static_cast<double>(adaptive.overhead_bytes)};
}

void print_comparison(std::ostream& os, const std::vector<RunSummary>& runs) {
  if (runs.empty()) return;
  constexpr int kLabel = 22;
  constexpr int kCol = 14;
  auto row = [&](const std::string& name, auto&& cell) {
    os << std::left << std::setw(kLabel) << name << std::right;
    for (const RunSummary& r : runs) os << std::setw(kCol) << cell(r);
    os << '\n';
  };
  row("", [](const RunSummary& r) { return label(r); });
  row("resyncs", [](const RunSummary& r) { return std::to_string(r.resyncs); });
  row("violations", [](const RunSummary& r) { return std::to_string(r.violations); });
  row("sync bytes", [](const RunSummary& r) { return std::to_string(r.overhead_bytes); });
  row("downlinks", [](const RunSummary& r) { return std::to_string(r.downlinks); });
  row("duty cycle", [](const RunSummary& r) { return percent(r.duty_cycle_fraction); });
  row("worst window", [](const RunSummary& r) { return percent(r.worst_hour_duty_cycle); });
  auto ratio_cell = [&](auto pick) {
    return [&, pick](const RunSummary& r) -> std::string {
      if (&r == &runs.front()) return "1.00";
      const auto ratio = overhead_ratio(runs.front(), r);
      if (!ratio) return "n/a";
      std::ostringstream cell;
      cell << std::fixed << std::setprecision(2) << pick(*ratio);
      return cell.str();
    };
  };
  row("resync ratio", ratio_cell([](const OverheadRatio& o) { return o.resyncs; }));
  row("byte ratio", ratio_cell([](const OverheadRatio& o) { return o.bytes; }));

  os << "\n[comparison]\n";
  for (const RunSummary& r : runs) {
    const std::string key = r.round ? "fixed_" + std::to_string(std::chrono::duration_cast<std::chrono::seconds>(*r.round).count())
                                    : std::string("adaptive");
    os << key << ".resyncs=" << r.resyncs << '\n'
       << key << ".violations=" << r.violations << '\n'
       << key << ".overhead_bytes=" << r.overhead_bytes << '\n'
       << key << ".duty_cycle_fraction=" << std::setprecision(9) << r.duty_cycle_fraction << '\n';
    if (&r != &runs.front())
      if (auto ratio = overhead_ratio(runs.front(), r))
        os << key << ".resync_ratio=" << ratio->resyncs << '\n' << key << ".byte_ratio=" << ratio->bytes << '\n';
  }
}

}  // namespace lorasync
