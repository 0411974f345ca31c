// lorasync: air-time calculator and slotted-Aloha synchronization simulator.
//
//   lorasync airtime --sf 12 --bw 125 --cr 4 --pl 255
//   lorasync simulate configs/field_experiment.ini --out trace.csv --seed 7
//   lorasync compare configs/field_experiment.ini --rounds 3600,1800
//
// Exit codes: 0 ok, 1 usage/config error, 2 runtime error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "lorasync/airtime.hpp"
#include "lorasync/config.hpp"
#include "lorasync/errors.hpp"
#include "lorasync/report.hpp"
#include "lorasync/sim.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

struct AirtimeArgs {
  lorasync::RadioParams radio;
  int bw_khz = 125;
  bool max = false;
};

struct RunArgs {
  std::string config;
  std::string out = "trace.csv";
  std::optional<std::uint64_t> seed;
  std::vector<std::int64_t> rounds;
};

int cmd_airtime(const AirtimeArgs& a) {
  lorasync::RadioParams p = a.max ? lorasync::longest_airtime_params() : a.radio;
  if (!a.max) p.bw_hz = a.bw_khz * 1000;
  const lorasync::AirTime at = lorasync::time_on_air(p);
  using lorasync::format_ms;
  std::cout << "SF" << p.sf << " BW" << p.bw_hz / 1000 << "kHz CR4/" << p.cr + 4 << " PL" << p.pl_bytes
            << " preamble " << p.n_preamble << " CRC " << (p.crc_on ? "on" : "off") << " IH " << p.implicit_header
            << " DE " << p.low_datarate_opt << '\n'
            << "symbol period    " << format_ms(lorasync::symbol_period(p)) << " ms\n"
            << "payload symbols  " << at.n_payload_symbols << '\n'
            << "preamble         " << format_ms(at.preamble) << " ms\n"
            << "payload          " << format_ms(at.payload) << " ms\n"
            << "total            " << format_ms(at.packet) << " ms\n"
            << "total (rounded)  " << lorasync::round_ms(at.packet) << " ms\n";
  if (a.max)
    std::cout << "remaining-time bits " << lorasync::remaining_time_bit_width(lorasync::round_ms(at.packet)) << '\n';
  return kExitOk;
}

lorasync::Scenario load(const RunArgs& a) {
  lorasync::Scenario sc = lorasync::load_scenario(a.config);
  if (a.seed) sc.seed = *a.seed;
  return sc;
}

int cmd_simulate(const RunArgs& a) {
  const lorasync::Scenario sc = load(a);
  const lorasync::RunResult r = lorasync::run(sc);
  std::ofstream out(a.out);
  if (!out) throw std::runtime_error("cannot write trace to '" + a.out + "'");
  lorasync::write_trace_csv(out, r.trace);
  if (!out) throw std::runtime_error("error while writing '" + a.out + "'");
  lorasync::print_summary(std::cout, lorasync::summarize(sc, r.metrics));
  std::cout << "trace=" << a.out << '\n';
  return kExitOk;
}

int cmd_compare(const RunArgs& a) {
  lorasync::Scenario sc = load(a);
  std::vector<lorasync::RunSummary> runs;
  sc.strategy = lorasync::SyncStrategy::adaptive;
  runs.push_back(lorasync::summarize(sc, lorasync::run(sc).metrics));
  for (std::int64_t round_s : a.rounds) {
    if (round_s <= 0) throw lorasync::ConfigError("--rounds values must be positive", 0);
    lorasync::Scenario fixed = sc;
    fixed.strategy = lorasync::SyncStrategy::fixed_rate;
    fixed.round = lorasync::from_s(round_s);
    runs.push_back(lorasync::summarize(fixed, lorasync::run(fixed).metrics));
  }
  lorasync::print_comparison(std::cout, runs);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LoRaWAN slotted-Aloha synchronization toolkit"};
  app.require_subcommand(1);

  AirtimeArgs air;
  auto* airtime = app.add_subcommand("airtime", "LoRa time-on-air calculator");
  airtime->add_option("--sf", air.radio.sf, "spreading factor")->check(CLI::Range(5, 12));
  airtime->add_option("--bw", air.bw_khz, "bandwidth in kHz")->check(CLI::IsMember({125, 250, 500}));
  airtime->add_option("--cr", air.radio.cr, "coding rate index (1..4 for 4/5..4/8)")->check(CLI::Range(1, 4));
  airtime->add_option("--pl", air.radio.pl_bytes, "payload bytes")->check(CLI::Range(0, 255));
  airtime->add_option("--preamble", air.radio.n_preamble, "preamble symbols")->check(CLI::PositiveNumber);
  airtime->add_flag("--crc,!--no-crc", air.radio.crc_on, "payload CRC (default on)");
  airtime->add_flag("--ih", air.radio.implicit_header, "implicit header");
  airtime->add_flag("--de", air.radio.low_datarate_opt, "low data-rate optimization");
  airtime->add_flag("--max", air.max, "longest LoRaWAN uplink (SF12, 125 kHz, CR 4/8, 255 bytes)");

  RunArgs sim;
  auto* simulate = app.add_subcommand("simulate", "run one scenario and write its per-frame trace");
  simulate->add_option("config", sim.config, "scenario file")->required();
  simulate->add_option("--out", sim.out, "trace CSV path");
  simulate->add_option("--seed", sim.seed, "override the scenario seed");

  RunArgs cmp;
  auto* compare = app.add_subcommand("compare", "adaptive vs fixed-rate synchronization on one scenario");
  compare->add_option("config", cmp.config, "scenario file")->required();
  compare->add_option("--rounds", cmp.rounds, "fixed-rate round lengths in seconds")->delimiter(',');
  compare->add_option("--seed", cmp.seed, "override the scenario seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*airtime) return cmd_airtime(air);
    if (*simulate) return cmd_simulate(sim);
    if (*compare) return cmd_compare(cmp);
  } catch (const lorasync::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const lorasync::ParameterError& e) {
    std::cerr << "invalid parameter: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}
