#include "lorasync/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lorasync/errors.hpp"

namespace lorasync {

namespace {

struct Entry {
  std::string value;
  std::size_t line = 0;
};

struct Section {
  std::string kind;
  std::string name;  // device id for [device NAME]
  std::size_t line = 0;
  std::vector<std::pair<std::string, Entry>> entries;
};

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<Section> tokenize(std::string_view text) {
  std::vector<Section> sections;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    if (const auto c = line.find_first_of("#;"); c != std::string_view::npos) line = line.substr(0, c);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("unterminated section header", line_no);
      std::string_view inner = trim(line.substr(1, line.size() - 2));
      Section s;
      s.line = line_no;
      const auto sp = inner.find_first_of(" \t");
      s.kind = std::string(inner.substr(0, sp));
      if (sp != std::string_view::npos) s.name = std::string(trim(inner.substr(sp)));
      if (s.kind == "device" && s.name.empty()) throw ConfigError("device section needs an id", line_no);
      if (s.kind != "device" && !s.name.empty())
        throw ConfigError("section [" + s.kind + "] takes no name", line_no);
      if (s.kind != "scenario" && s.kind != "slot" && s.kind != "uplink" && s.kind != "downlink" &&
          s.kind != "device")
        throw ConfigError("unknown section [" + s.kind + "]", line_no);
      sections.push_back(std::move(s));
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected key = value", line_no);
    if (sections.empty()) throw ConfigError("key outside of any section", line_no);
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw ConfigError("empty key", line_no);
    for (const auto& [k, e] : sections.back().entries)
      if (k == key) throw ConfigError("duplicate key '" + key + "' (first on line " + std::to_string(e.line) + ")", line_no);
    sections.back().entries.emplace_back(key, Entry{value, line_no});
  }
  return sections;
}

std::int64_t parse_int(const Entry& e) {
  std::string_view v = e.value;
  int base = 10;
  if (v.starts_with("0x") || v.starts_with("0X")) {
    v.remove_prefix(2);
    base = 16;
  } else if (v.starts_with("+")) {
    v.remove_prefix(1);
  }
  std::int64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out, base);
  if (ec != std::errc() || p != v.data() + v.size() || v.empty())
    throw ConfigError("expected an integer, got '" + e.value + "'", e.line);
  return out;
}

double parse_real(const Entry& e) {
  std::string_view v = e.value;
  if (v.starts_with("+")) v.remove_prefix(1);
  double out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || v.empty())
    throw ConfigError("expected a number, got '" + e.value + "'", e.line);
  return out;
}

bool parse_bool(const Entry& e) {
  if (e.value == "1" || e.value == "true" || e.value == "on" || e.value == "yes") return true;
  if (e.value == "0" || e.value == "false" || e.value == "off" || e.value == "no") return false;
  throw ConfigError("expected a boolean, got '" + e.value + "'", e.line);
}

// Exact decimal parse: "1.5" in seconds -> 1'500'000'000 ns.
Nanos parse_decimal(std::string_view v, std::int64_t unit_ns, std::size_t line, const std::string& raw) {
  bool negative = false;
  if (!v.empty() && (v.front() == '-' || v.front() == '+')) {
    negative = v.front() == '-';
    v.remove_prefix(1);
  }
  const auto dot = v.find('.');
  const std::string_view whole = v.substr(0, dot);
  const std::string_view frac = dot == std::string_view::npos ? std::string_view{} : v.substr(dot + 1);
  auto digits = [](std::string_view s) { return s.find_first_not_of("0123456789") == std::string_view::npos; };
  if ((whole.empty() && frac.empty()) || !digits(whole) || !digits(frac))
    throw ConfigError("expected a duration, got '" + raw + "'", line);

  std::int64_t w = 0;
  if (!whole.empty()) std::from_chars(whole.data(), whole.data() + whole.size(), w);
  std::int64_t ns = w * unit_ns;
  std::int64_t place = unit_ns;
  for (char c : frac) {
    if (place % 10 != 0) {
      if (c != '0') throw ConfigError("duration '" + raw + "' is finer than 1 ns", line);
      continue;
    }
    place /= 10;
    ns += (c - '0') * place;
  }
  return Nanos(negative ? -ns : ns);
}

Nanos parse_duration(const Entry& e, std::int64_t unit_ns) { return parse_decimal(e.value, unit_ns, e.line, e.value); }

constexpr std::int64_t kMs = 1'000'000;
constexpr std::int64_t kSec = 1'000'000'000;

class SectionReader {
 public:
  explicit SectionReader(const Section& s) : s_(s) {}

  const Entry* get(const std::string& key) {
    for (const auto& [k, e] : s_.entries)
      if (k == key) {
        used_.push_back(key);
        return &e;
      }
    return nullptr;
  }

  void reject_unused() const {
    for (const auto& [k, e] : s_.entries)
      if (std::find(used_.begin(), used_.end(), k) == used_.end())
        throw ConfigError("unknown key '" + k + "' in [" + s_.kind + "]", e.line);
  }

 private:
  const Section& s_;
  std::vector<std::string> used_;
};

RadioParams read_radio(const Section& s) {
  SectionReader r(s);
  RadioParams p;
  if (auto* e = r.get("sf")) p.sf = static_cast<int>(parse_int(*e));
  if (auto* e = r.get("bw_khz")) p.bw_hz = static_cast<int>(parse_int(*e) * 1000);
  if (auto* e = r.get("cr")) p.cr = static_cast<int>(parse_int(*e));
  if (auto* e = r.get("preamble")) p.n_preamble = static_cast<int>(parse_int(*e));
  if (auto* e = r.get("pl")) p.pl_bytes = static_cast<int>(parse_int(*e));
  if (auto* e = r.get("crc")) p.crc_on = parse_bool(*e);
  if (auto* e = r.get("ih")) p.implicit_header = parse_bool(*e);
  if (auto* e = r.get("de")) p.low_datarate_opt = parse_bool(*e);
  r.reject_unused();
  try {
    validate(p);
  } catch (const ParameterError& ex) {
    throw ConfigError(std::string("[") + s.kind + "]: " + ex.what(), s.line);
  }
  return p;
}

std::vector<PpmSegment> parse_segments(const Entry& e) {
  std::vector<PpmSegment> out;
  std::string_view rest = e.value;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string_view item = trim(rest.substr(0, comma));
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    const auto colon = item.find(':');
    if (colon == std::string_view::npos) throw ConfigError("segment '" + std::string(item) + "' must be time_s:ppm", e.line);
    const Entry from{std::string(trim(item.substr(0, colon))), e.line};
    const Entry ppm{std::string(trim(item.substr(colon + 1))), e.line};
    out.push_back({parse_duration(from, kSec), parse_real(ppm)});
  }
  return out;
}

ClockModel read_clock(SectionReader& r, const Section& s) {
  const Entry* kind = r.get("clock");
  const std::string name = kind ? kind->value : "ideal";
  const std::size_t line = kind ? kind->line : s.line;

  ClockModel model;
  if (name == "ideal") model = IdealClock{};
  else if (name == "constant_ppm") model = ConstantPpm{};
  else if (name == "random_walk") model = RandomWalkPpm{};
  else if (name == "piecewise") model = PiecewisePpm{};
  else {
    try {
      model = clock_preset(name);
    } catch (const ParameterError& ex) {
      throw ConfigError(ex.what(), line);
    }
  }

  auto take = [&](const char* key, auto&& apply, bool allowed) {
    if (const Entry* e = r.get(key)) {
      if (!allowed) throw ConfigError("key '" + std::string(key) + "' does not apply to clock '" + name + "'", e->line);
      apply(*e);
    }
  };
  auto* constant = std::get_if<ConstantPpm>(&model);
  auto* walk = std::get_if<RandomWalkPpm>(&model);
  auto* pieces = std::get_if<PiecewisePpm>(&model);
  take("offset_ppm", [&](const Entry& e) { constant->offset_ppm = parse_real(e); }, constant != nullptr);
  take("initial_ppm", [&](const Entry& e) { walk->initial_ppm = parse_real(e); }, walk != nullptr);
  take("step_interval_s", [&](const Entry& e) { walk->step_interval = parse_duration(e, kSec); }, walk != nullptr);
  take("step_std_ppm", [&](const Entry& e) { walk->step_std_ppm = parse_real(e); }, walk != nullptr);
  take("segments", [&](const Entry& e) { pieces->segments = parse_segments(e); }, pieces != nullptr);

  try {
    validate(model);
  } catch (const ParameterError& ex) {
    throw ConfigError(ex.what(), line);
  }
  return model;
}

}  // namespace

Scenario parse_scenario(std::string_view text) {
  const std::vector<Section> sections = tokenize(text);
  Scenario sc;

  auto find = [&](const std::string& kind) -> const Section* {
    const Section* found = nullptr;
    for (const Section& s : sections)
      if (s.kind == kind && kind != "device") {
        if (found) throw ConfigError("section [" + kind + "] appears twice", s.line);
        found = &s;
      }
    return found;
  };

  const Section* scen = find("scenario");
  const Section* slot = find("slot");
  const Section* uplink = find("uplink");
  const Section* downlink = find("downlink");
  if (!scen) throw ConfigError("missing [scenario] section", 0);
  if (!slot) throw ConfigError("missing [slot] section", 0);

  {
    SectionReader r(*scen);
    const Entry* duration = r.get("duration_s");
    if (!duration) throw ConfigError("[scenario] needs duration_s", scen->line);
    sc.duration = parse_duration(*duration, kSec);
    if (auto* e = r.get("seed")) sc.seed = static_cast<std::uint64_t>(parse_int(*e));
    if (auto* e = r.get("strategy")) {
      if (e->value == "adaptive") sc.strategy = SyncStrategy::adaptive;
      else if (e->value == "fixed_rate") sc.strategy = SyncStrategy::fixed_rate;
      else throw ConfigError("strategy must be adaptive or fixed_rate", e->line);
    }
    if (auto* e = r.get("round_s")) sc.round = parse_duration(*e, kSec);
    if (auto* e = r.get("duty_cycle_limit")) sc.duty_cycle_limit = parse_real(*e);
    if (auto* e = r.get("downlink_loss")) sc.downlink_loss = parse_real(*e);
    if (auto* e = r.get("slot_pick")) {
      if (e->value == "first") sc.slot_pick = SlotPick::first;
      else if (e->value == "random") sc.slot_pick = SlotPick::random;
      else throw ConfigError("slot_pick must be first or random", e->line);
    }
    if (auto* e = r.get("ref_ms")) sc.ref = ServerTime(parse_duration(*e, kMs));
    r.reject_unused();
  }

  std::optional<RadioParams> up_radio, down_radio;
  if (uplink) up_radio = read_radio(*uplink);
  if (downlink) down_radio = read_radio(*downlink);
  sc.downlink = down_radio;

  {
    SectionReader r(*slot);
    auto required = [&](const char* key) -> Nanos {
      const Entry* e = r.get(key);
      if (!e) throw ConfigError(std::string("[slot] needs ") + key, slot->line);
      return parse_duration(*e, kMs);
    };
    auto from_radio = [&](const char* key, const std::optional<RadioParams>& radio, const char* section) -> Nanos {
      if (const Entry* e = r.get(key)) return parse_duration(*e, kMs);
      if (!radio) throw ConfigError(std::string("[slot] needs ") + key + " or a [" + section + "] section", slot->line);
      return time_on_air(*radio).packet;
    };
    sc.slot.t_tx = from_radio("t_tx_ms", up_radio, "uplink");
    sc.slot.rx_delay = required("rx_delay_ms");
    sc.slot.t_rx = from_radio("t_rx_ms", down_radio, "downlink");
    sc.slot.tb1 = required("tb1_ms");
    sc.slot.tb2 = required("tb2_ms");
    r.reject_unused();
    try {
      validate(sc.slot);
    } catch (const ParameterError& ex) {
      throw ConfigError(std::string("[slot]: ") + ex.what(), slot->line);
    }
  }

  std::uint32_t next_addr = 1;
  for (const Section& s : sections) {
    if (s.kind != "device") continue;
    SectionReader r(s);
    DeviceSpec d;
    d.id = s.name;
    if (auto* e = r.get("dev_addr")) {
      const std::int64_t v = parse_int(*e);
      if (v < 0 || v > 0xFFFFFFFFLL) throw ConfigError("dev_addr must fit in 32 bits", e->line);
      d.dev_addr = static_cast<std::uint32_t>(v);
    } else {
      d.dev_addr = next_addr;
    }
    next_addr = d.dev_addr + 1;
    d.clock = read_clock(r, s);
    if (auto* e = r.get("clock_seed")) {
      auto* walk = std::get_if<RandomWalkPpm>(&d.clock);
      if (!walk) throw ConfigError("clock_seed applies to random-walk clocks only", e->line);
      walk->seed = static_cast<std::uint64_t>(parse_int(*e));
    } else {
      d.derive_clock_seed = std::holds_alternative<RandomWalkPpm>(d.clock);
    }
    if (auto* e = r.get("tx_period_s")) d.tx_period = parse_duration(*e, kSec);
    if (auto* e = r.get("payload_bytes")) d.payload_bytes = static_cast<int>(parse_int(*e));
    if (auto* e = r.get("first_tx_ms")) d.first_tx = parse_duration(*e, kMs);
    r.reject_unused();
    sc.devices.push_back(std::move(d));
  }

  validate(sc);
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open scenario file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

}  // namespace lorasync
