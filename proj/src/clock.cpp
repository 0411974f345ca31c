#include "lorasync/clock.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lorasync/errors.hpp"

namespace lorasync {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_ppm(double ppm) {
  if (!std::isfinite(ppm) || std::fabs(ppm) >= 1e6)
    throw ParameterError("frequency offset must be finite and below 1e6 ppm");
}

}  // namespace

void validate(const ClockModel& model) {
  std::visit(overloaded{
                 [](const IdealClock&) {},
                 [](const ConstantPpm& m) { check_ppm(m.offset_ppm); },
                 [](const RandomWalkPpm& m) {
                   if (m.step_interval <= Nanos::zero())
                     throw ParameterError("random walk step interval must be positive");
                   if (!std::isfinite(m.step_std_ppm) || m.step_std_ppm < 0)
                     throw ParameterError("random walk step std must be non-negative");
                   check_ppm(m.initial_ppm);
                 },
                 [](const PiecewisePpm& m) {
                   for (std::size_t i = 0; i < m.segments.size(); ++i) {
                     check_ppm(m.segments[i].offset_ppm);
                     if (m.segments[i].from < Nanos::zero())
                       throw ParameterError("piecewise segment starts before time 0");
                     if (i > 0 && m.segments[i].from <= m.segments[i - 1].from)
                       throw ParameterError("piecewise segments must be strictly increasing in time");
                   }
                 },
             },
             model);
}

ClockModel clock_preset(std::string_view name, std::uint64_t seed) {
  if (name == "ideal") return IdealClock{};
  if (name == "feather-like")
    return RandomWalkPpm{.step_interval = from_s(60), .step_std_ppm = 0.5, .initial_ppm = 30.0, .seed = seed};
  if (name == "ttgo-like") return ConstantPpm{2.0};
  throw ParameterError("unknown clock preset '" + std::string(name) + "'");
}

std::string describe(const ClockModel& model) {
  std::ostringstream os;
  std::visit(overloaded{
                 [&](const IdealClock&) { os << "ideal"; },
                 [&](const ConstantPpm& m) { os << "constant_ppm(" << m.offset_ppm << ")"; },
                 [&](const RandomWalkPpm& m) {
                   os << "random_walk(step=" << std::chrono::duration<double>(m.step_interval).count()
                      << "s, std=" << m.step_std_ppm << "ppm, initial=" << m.initial_ppm
                      << "ppm, seed=" << m.seed << ")";
                 },
                 [&](const PiecewisePpm& m) {
                   os << "piecewise(";
                   for (std::size_t i = 0; i < m.segments.size(); ++i)
                     os << (i ? ", " : "") << std::chrono::duration<double>(m.segments[i].from).count()
                        << "s:" << m.segments[i].offset_ppm;
                   os << ")";
                 },
             },
             model);
  return os.str();
}

SimClock::SimClock(ClockModel model) : model_(std::move(model)) {
  validate(model_);
  std::visit(overloaded{
                 [](const IdealClock&) {},
                 [&](const ConstantPpm& m) { segment_.ppm = m.offset_ppm; },
                 [&](const RandomWalkPpm& m) {
                   rng_.seed(m.seed);
                   step_ = std::normal_distribution<double>(0.0, m.step_std_ppm);
                   segment_.ppm = m.initial_ppm;
                   segment_.end = ServerTime(m.step_interval);
                 },
                 [&](const PiecewisePpm& m) {
                   // Segment 0 is the implicit 0 ppm stretch before the first entry.
                   if (!m.segments.empty() && m.segments.front().from == Nanos::zero()) {
                     segment_.ppm = m.segments.front().offset_ppm;
                     piece_index_ = 1;
                   }
                   if (piece_index_ < m.segments.size())
                     segment_.end = ServerTime(m.segments[piece_index_].from);
                 },
             },
             model_);
}

Nanos SimClock::scaled(Nanos elapsed, double ppm) {
  const long double extra = static_cast<long double>(ppm) * elapsed.count() / 1e6L;
  return elapsed + Nanos(std::llround(extra));
}

DeviceTime SimClock::local_in_segment(ServerTime t) const {
  return segment_.local_start + scaled(t - segment_.start, segment_.ppm);
}

void SimClock::enter_next_segment() {
  const ServerTime boundary = *segment_.end;
  const DeviceTime local_boundary = local_in_segment(boundary);
  segment_.start = boundary;
  segment_.local_start = local_boundary;
  std::visit(overloaded{
                 [](const IdealClock&) {},
                 [](const ConstantPpm&) {},
                 [&](const RandomWalkPpm& m) {
                   segment_.ppm += step_(rng_);
                   // Keep the oscillator physical: frequency stays positive.
                   segment_.ppm = std::clamp(segment_.ppm, -999'999.0, 999'999.0);
                   segment_.end = boundary + m.step_interval;
                 },
                 [&](const PiecewisePpm& m) {
                   segment_.ppm = m.segments[piece_index_].offset_ppm;
                   ++piece_index_;
                   if (piece_index_ < m.segments.size())
                     segment_.end = ServerTime(m.segments[piece_index_].from);
                   else
                     segment_.end.reset();
                 },
             },
             model_);
}

void SimClock::check_monotone(ServerTime t) {
  if (t < last_query_)
    throw UsageError("clock queried backwards in time (" + std::to_string(t.time_since_epoch().count()) +
                     " ns < " + std::to_string(last_query_.time_since_epoch().count()) + " ns)");
  last_query_ = t;
}

DeviceTime SimClock::local_time(ServerTime t) {
  if (t < ServerTime{}) throw UsageError("clock queried before the time origin");
  check_monotone(t);
  while (segment_.end && t >= *segment_.end) enter_next_segment();
  return local_in_segment(t);
}

Nanos SimClock::drift(ServerTime t) {
  return t.time_since_epoch() - local_time(t).time_since_epoch();
}

ServerTime SimClock::server_time_at(DeviceTime local) {
  if (local < local_in_segment(last_query_))
    throw UsageError("clock inverse queried for a local time already passed");
  while (segment_.end && local >= local_in_segment(*segment_.end)) enter_next_segment();

  const Nanos target = local - segment_.local_start;
  const long double rate = 1.0L + static_cast<long double>(segment_.ppm) / 1e6L;
  Nanos dt(std::llround(static_cast<long double>(target.count()) / rate));
  if (dt < Nanos::zero()) dt = Nanos::zero();
  while (scaled(dt, segment_.ppm) < target) ++dt;
  while (dt > Nanos::zero() && scaled(dt - Nanos(1), segment_.ppm) >= target) --dt;

  ServerTime t = segment_.start + dt;
  if (t < last_query_) t = last_query_;
  last_query_ = t;
  return t;
}

bool is_in_sync(Nanos drift, Nanos tb1, Nanos tb2) {
  if (tb1 < Nanos::zero() || tb2 < Nanos::zero())
    throw ParameterError("guard intervals must be non-negative");
  return -tb2 < drift && drift < tb1;
}

}  // namespace lorasync
