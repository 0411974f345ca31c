#include <doctest.h>

#include <random>

#include "lorasync/clock.hpp"
#include "lorasync/errors.hpp"

using namespace lorasync;

namespace {
ServerTime at_s(double s) { return ServerTime(Nanos(static_cast<std::int64_t>(s * 1e9))); }
}  // namespace

TEST_CASE("ideal clock is the identity") {
  SimClock c(IdealClock{});
  CHECK(c.local_time(ServerTime(Nanos(1'000'000'000))) == DeviceTime(Nanos(1'000'000'000)));
  CHECK(c.drift(at_s(5000)) == Nanos::zero());
  CHECK(c.server_time_at(DeviceTime(from_s(6000))) == ServerTime(from_s(6000)));
}

TEST_CASE("constant offset accumulates linearly") {
  SUBCASE("fast clock runs ahead, so drift is negative") {
    SimClock c(ConstantPpm{33.0});
    CHECK(c.local_time(at_s(5400)) - DeviceTime(from_s(5400)) == from_ms(178) + std::chrono::microseconds(200));
    CHECK(c.drift(at_s(5400)) == -(from_ms(178) + std::chrono::microseconds(200)));
  }
  SUBCASE("slow clock falls behind") {
    SimClock c(ConstantPpm{-10.0});
    CHECK(c.drift(at_s(1000)) == from_ms(10));
  }
  SUBCASE("drift equals -ppm * t for integral ppm") {
    for (int ppm : {-50, -3, 1, 7, 40}) {
      SimClock c(ConstantPpm{double(ppm)});
      for (std::int64_t s = 0; s <= 24 * 3600; s += 977)
        REQUIRE(c.drift(ServerTime(from_s(s))) == Nanos(-ppm * s * 1000));
    }
  }
}

TEST_CASE("piecewise offsets cancel") {
  SimClock c(PiecewisePpm{{{from_s(0), 20.0}, {from_s(3600), -20.0}}});
  CHECK(c.drift(at_s(3600)) == -from_ms(72));
  CHECK(c.drift(at_s(7200)) == Nanos::zero());
}

TEST_CASE("piecewise clock is ideal before its first segment") {
  SimClock c(PiecewisePpm{{{from_s(100), 10.0}}});
  CHECK(c.drift(at_s(100)) == Nanos::zero());
  CHECK(c.drift(at_s(200)) == -from_ms(1));
}

TEST_CASE("readings do not depend on query history") {
  const ClockModel models[] = {ConstantPpm{12.5}, RandomWalkPpm{from_s(60), 3.0, 25.0, 99},
                               PiecewisePpm{{{from_s(0), 5.0}, {from_s(500), -7.5}, {from_s(1300), 40.0}}}};
  std::mt19937_64 rng(5);
  for (const ClockModel& m : models) {
    for (int trial = 0; trial < 50; ++trial) {
      const std::int64_t t2 = std::uniform_int_distribution<std::int64_t>(1, 4'000'000'000'000)(rng);
      const std::int64_t t1 = std::uniform_int_distribution<std::int64_t>(0, t2)(rng);
      SimClock direct(m), stepped(m);
      stepped.local_time(ServerTime(Nanos(t1)));
      REQUIRE(stepped.local_time(ServerTime(Nanos(t2))) == direct.local_time(ServerTime(Nanos(t2))));
    }
  }
}

TEST_CASE("random walk is reproducible for a fixed seed") {
  const RandomWalkPpm m{from_s(60), 4.0, 30.0, 1234};
  SimClock a(m), b(m), other(RandomWalkPpm{from_s(60), 4.0, 30.0, 1235});
  for (std::int64_t s = 0; s < 6 * 3600; s += 17) {
    const ServerTime t(from_s(s));
    REQUIRE(a.local_time(t) == b.local_time(t));
  }
  CHECK(other.local_time(ServerTime(from_s(6 * 3600))) != a.local_time(ServerTime(from_s(6 * 3600))));
}

TEST_CASE("local time is strictly increasing") {
  SimClock c(RandomWalkPpm{from_s(1), 50.0, -200.0, 3});
  DeviceTime prev = c.local_time(ServerTime{});
  for (std::int64_t ms = 1; ms < 600'000; ms += 7) {
    const DeviceTime now = c.local_time(ServerTime(from_ms(ms)));
    REQUIRE(now > prev);
    prev = now;
  }
}

TEST_CASE("server_time_at inverts local_time") {
  std::mt19937_64 rng(11);
  for (const ClockModel& m : {ClockModel{ConstantPpm{-37.0}}, ClockModel{RandomWalkPpm{from_s(10), 5.0, 30.0, 8}},
                              ClockModel{PiecewisePpm{{{from_s(0), 100.0}, {from_s(50), -100.0}}}}}) {
    SimClock inv(m);
    std::int64_t local = 0;
    for (int i = 0; i < 400; ++i) {
      local += std::uniform_int_distribution<std::int64_t>(1, 2'000'000'000)(rng);
      const ServerTime t = inv.server_time_at(DeviceTime(Nanos(local)));
      SimClock fwd(m);
      REQUIRE(fwd.local_time(t) >= DeviceTime(Nanos(local)));
      if (t > ServerTime{}) {
        SimClock before(m);
        REQUIRE(before.local_time(t - Nanos(1)) < DeviceTime(Nanos(local)));
      }
    }
  }
}

TEST_CASE("backwards queries are rejected") {
  SimClock c(ConstantPpm{1.0});
  c.local_time(at_s(10));
  CHECK_THROWS_AS(c.local_time(at_s(9)), UsageError);
  CHECK_NOTHROW(c.local_time(at_s(10)));
}

TEST_CASE("in-sync window is open on both sides") {
  const Nanos tb = from_ms(180);
  CHECK(is_in_sync(Nanos::zero(), tb, tb));
  CHECK_FALSE(is_in_sync(from_ms(180), tb, tb));
  CHECK_FALSE(is_in_sync(-from_ms(180), tb, tb));
  CHECK(is_in_sync(-from_ms(179), tb, tb));
  CHECK(is_in_sync(from_ms(180) - Nanos(1), tb, tb));
  CHECK_THROWS_AS(is_in_sync(Nanos::zero(), -tb, tb), ParameterError);
}

TEST_CASE("model validation") {
  CHECK_THROWS_AS(SimClock(RandomWalkPpm{Nanos::zero(), 1.0, 0.0, 1}), ParameterError);
  CHECK_THROWS_AS(SimClock(RandomWalkPpm{from_s(1), -1.0, 0.0, 1}), ParameterError);
  CHECK_THROWS_AS(SimClock(PiecewisePpm{{{from_s(10), 1.0}, {from_s(10), 2.0}}}), ParameterError);
  CHECK_THROWS_AS(SimClock(ConstantPpm{2e6}), ParameterError);
  CHECK_THROWS_AS(clock_preset("quartz"), ParameterError);
  CHECK(std::holds_alternative<RandomWalkPpm>(clock_preset("feather-like", 4)));
  CHECK(std::get<ConstantPpm>(clock_preset("ttgo-like")).offset_ppm == 2.0);
}
