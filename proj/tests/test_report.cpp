#include <doctest.h>

#include <sstream>

#include "lorasync/report.hpp"

using namespace lorasync;

namespace {

Trace sample_trace() {
  Trace t;
  t.push_back({0, "feather", ServerTime(Nanos(27'951'171'234)), Nanos(1'596'171'234), Nanos(466'828'766), false, true,
               161u, SyncStrategy::adaptive});
  t.push_back({1, "ttgo", ServerTime(Nanos(56'640'887'000)), Nanos(416'887'000), -Nanos(110'887'000), true, false,
               std::nullopt, SyncStrategy::adaptive});
  return t;
}

}  // namespace

TEST_CASE("trace CSV golden output") {
  const std::string expected =
      "frame_index,device_id,true_time_ms,arrival_position_ms,signed_drift_ms,in_sync,action,remaining_ms,strategy\n"
      "0,feather,27951.171,1596.171,466.829,0,resync,161,adaptive\n"
      "1,ttgo,56640.887,416.887,-110.887,1,none,,adaptive\n";
  CHECK(trace_csv(sample_trace()) == expected);
}

TEST_CASE("trace hash follows the content") {
  Trace a = sample_trace();
  Trace b = sample_trace();
  CHECK(trace_hash(a) == trace_hash(b));
  b[1].signed_drift += Nanos(1000);
  CHECK(trace_hash(a) != trace_hash(b));
}

TEST_CASE("summary and comparison") {
  RunSummary adaptive;
  adaptive.resyncs = 5;
  adaptive.overhead_bytes = 10;
  adaptive.ideal_arrival = from_ms(306);
  adaptive.upper_bound = from_ms(486);
  adaptive.lower_bound = from_ms(126);
  RunSummary fixed;
  fixed.strategy = SyncStrategy::fixed_rate;
  fixed.round = from_s(3600);
  fixed.resyncs = 12;
  fixed.overhead_bytes = 96;

  const auto ratio = overhead_ratio(adaptive, fixed);
  REQUIRE(ratio.has_value());
  CHECK(ratio->resyncs == doctest::Approx(2.4));
  CHECK(ratio->bytes == doctest::Approx(9.6));

  RunSummary none;
  CHECK_FALSE(overhead_ratio(none, fixed).has_value());

  std::ostringstream os;
  print_summary(os, adaptive);
  CHECK(os.str().find("resyncs=5\n") != std::string::npos);
  CHECK(os.str().find("upper_bound_ms=486.000\n") != std::string::npos);
  CHECK(os.str().find("ideal_arrival_ms=306.000\n") != std::string::npos);

  std::ostringstream table;
  print_comparison(table, {adaptive, fixed});
  CHECK(table.str().find("fixed_3600.resyncs=12\n") != std::string::npos);
  CHECK(table.str().find("fixed_3600.resync_ratio=2.4\n") != std::string::npos);

  std::ostringstream single;
  print_comparison(single, {adaptive});
  CHECK(single.str().find("fixed_") == std::string::npos);
}
