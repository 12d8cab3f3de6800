// roadrel: importance ranking of road segments from simulated delays.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "roadrel/error.hpp"
#include "roadrel/importance.hpp"
#include "roadrel/intersection.hpp"
#include "roadrel/pipeline.hpp"
#include "roadrel/report.hpp"
#include "roadrel/scenario.hpp"

namespace fs = std::filesystem;
using namespace roadrel;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

/// "a,b,c" or "start:stop:step".
std::vector<double> parse_intensities(const std::string& text) {
  std::vector<double> out;
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size()) throw ValidationError("bad intensity '" + s + "'");
    return x;
  };
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw ValidationError("intensity range must be start:stop:step");
    return intensity_grid(number(parts[0]), number(parts[1]), number(parts[2]));
  }
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ',');) {
    double x = number(p);
    if (!(x >= 0.0 && x <= 1.0)) throw ValidationError("intensity must lie in [0, 1]");
    out.push_back(x);
  }
  if (out.empty()) throw ValidationError("empty intensity list");
  return out;
}

/// Opens DIR/name, creating DIR.
std::ofstream open_output(const std::string& dir, const std::string& name) {
  fs::create_directories(dir);
  fs::path path = fs::path(dir) / name;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

struct Globals {
  std::string scenario = kDefaultScenario;
  std::string out;
};

int run_structural(const Globals& g, const std::string& mode_text, const std::string& measure_text,
                   const std::string& format) {
  Scenario sc = load_scenario(g.scenario);
  EvaluationMode mode = parse_evaluation_mode(mode_text);
  Measure measure = parse_measure(measure_text);
  ImportanceReport rep = structural_report(sc.structure(), mode, measure);
  if (g.out.empty()) {
    if (format == "csv") {
      write_structural_csv(std::cout, sc, rep);
    } else {
      write_structural_text(std::cout, sc, rep);
    }
    return 0;
  }
  auto csv = open_output(g.out, "structural.csv");
  write_structural_csv(csv, sc, rep);
  auto txt = open_output(g.out, "structural.txt");
  write_structural_text(txt, sc, rep);
  write_structural_text(std::cout, sc, rep);
  return 0;
}

struct SimulateArgs {
  int segment = 0;
  double intensity = 0.1;
  int steps = 1000;
  std::uint64_t seed = 1;
  std::string trace;
  bool log_decisions = false;
};

int run_simulate(const Globals& g, const SimulateArgs& a) {
  Scenario sc = load_scenario(g.scenario);
  if (!(a.intensity >= 0.0 && a.intensity <= 1.0)) throw ValidationError("intensity must lie in [0, 1]");
  const Segment& seg = sc.segments.at(a.segment == 0 ? 0 : sc.index_of(a.segment));
  Road road(seg.length_cells, sc.sim, derive_seed({a.seed, 0}));
  IntersectionControl control(seg.maneuver, seg.light, sc.sim, a.intensity, derive_seed({a.seed, 1}));
  control.set_logging(a.log_decisions);
  road.set_control(&control);
  std::vector<std::pair<Turn, double>> mix;
  for (const Branch& b : seg.maneuver.branches) mix.emplace_back(b.turn, b.probability);
  road.set_routes(mix);

  std::ofstream trace;
  if (!a.trace.empty()) {
    trace.open(a.trace);
    if (!trace) throw std::runtime_error("cannot write " + a.trace);
    trace << "time,vehicle,position,velocity\n";
    road.set_trace(&trace);
  }
  for (int t = 0; t < a.steps; ++t) road.step(a.intensity);

  const auto& exits = road.exits();
  double mean = 0.0;
  long lo = 0, hi = 0;
  for (std::size_t k = 0; k < exits.size(); ++k) {
    long tt = exits[k].travel_time();
    mean += static_cast<double>(tt);
    lo = k == 0 ? tt : std::min(lo, tt);
    hi = k == 0 ? tt : std::max(hi, tt);
  }
  if (!exits.empty()) mean /= static_cast<double>(exits.size());
  const RoadStats& st = road.stats();
  std::cout << "segment " << seg.id << " (" << seg.name << "), " << seg.length_cells << " cells, "
            << to_string(seg.maneuver.kind) << "\n";
  std::cout << "steps " << a.steps << " intensity " << a.intensity << " seed " << a.seed << "\n";
  std::cout << "spawned " << st.spawned << " blocked " << st.spawn_blocked << " exited " << exits.size()
            << " on_road " << road.vehicles().size() << "\n";
  std::cout << "travel_time_steps min " << lo << " mean " << fmt_number(mean, 2) << " max " << hi << "\n";
  std::cout << "vehicle_steps " << st.vehicle_steps << " emergency_brakes " << st.emergency_brakes
            << " gap_violations " << st.min_gap_violations << " red_violations " << control.red_violations()
            << "\n";
  if (a.log_decisions) {
    std::size_t granted = 0;
    for (const Decision& d : control.decisions()) granted += d.permitted ? 1 : 0;
    std::cout << "decisions " << control.decisions().size() << " permitted " << granted << "\n";
  }
  return 0;
}

struct SweepArgs {
  std::optional<std::uint64_t> seed;
  std::optional<int> replications;
  std::string intensities;
  std::string mode;
  std::string reliability_from;
  bool progress = false;
};

int run_sweep_cmd(const Globals& g, const SweepArgs& a) {
  Scenario sc = load_scenario(g.scenario);
  if (a.seed) sc.sweep.seed = *a.seed;
  if (a.replications) {
    if (*a.replications < 1) throw ValidationError("replications must be at least 1");
    sc.sweep.replications = *a.replications;
  }
  if (!a.intensities.empty()) sc.sweep.intensities = parse_intensities(a.intensities);
  if (!a.mode.empty()) sc.sweep.mode = parse_evaluation_mode(a.mode);
  if (!a.reliability_from.empty()) {
    if (a.reliability_from == "q_of_mean_delay") {
      sc.sweep.reliability = ReliabilityRule::q_of_mean_delay;
    } else if (a.reliability_from == "mean_of_q") {
      sc.sweep.reliability = ReliabilityRule::mean_of_q;
    } else {
      throw ValidationError("--reliability-from must be q_of_mean_delay or mean_of_q");
    }
  }
  Progress progress;
  if (a.progress) {
    progress = [](std::size_t done, std::size_t total) {
      if (done % 500 == 0 || done == total) std::cerr << "\r" << done << "/" << total << std::flush;
      if (done == total) std::cerr << "\n";
    };
  }
  SweepResult res = run_sweep(sc, progress);
  const std::string dir = g.out.empty() ? "results" : g.out;
  auto delays = open_output(dir, "delays.csv");
  write_delays_csv(delays, res);
  auto rel = open_output(dir, "reliability.csv");
  write_reliability_csv(rel, res);
  auto imp = open_output(dir, "importance.csv");
  write_importance_csv(imp, res);
  auto summary = open_output(dir, "summary.txt");
  write_sweep_summary(summary, res);
  write_sweep_summary(std::cout, res);
  std::cout << "\nwrote " << dir << "/{delays,reliability,importance}.csv and summary.txt\n";
  return 0;
}

int run_validate(const Globals& g) {
  Scenario sc = load_scenario(g.scenario);
  StructureFunction phi = sc.structure();
  std::cout << "scenario " << sc.name << ": " << sc.segments.size() << " segments, " << phi.min_paths().size()
            << " minimal paths, " << minimal_cuts(phi).size() << " minimal cuts, " << sc.routes.size()
            << " routes\n";
  for (const Segment& s : sc.segments) {
    std::cout << "  " << s.id << " " << s.name << ": " << s.length_m << " m = " << s.length_cells << " cells, "
              << to_string(s.maneuver.kind) << (s.light ? ", light" : "") << "\n";
  }
  for (const auto& w : sc.warnings) std::cout << "warning: " << w << "\n";
  std::cout << "ok\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rank road segments by importance using simulated delays and driver satisfaction"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--scenario", g.scenario, "Scenario file, or builtin:NAME")->capture_default_str();
  app.add_option("--out", g.out, "Output directory");

  std::string mode = "exact", measure = "birnbaum", format = "text";
  auto* structural = app.add_subcommand("structural", "Structural importance at p = 1/2 (no simulation)");
  structural->add_option("--mode", mode, "exact | paper-naive")->capture_default_str();
  structural->add_option("--measure", measure, "Ranking measure: birnbaum | barlow-proschan")->capture_default_str();
  structural->add_option("--format", format, "text | csv (stdout only)")
      ->check(CLI::IsMember({"text", "csv"}))
      ->capture_default_str();

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run one segment for a number of steps");
  simulate->add_option("--segment", sim.segment, "Segment id (default: first)");
  simulate->add_option("--intensity", sim.intensity, "Entry probability per step")->capture_default_str();
  simulate->add_option("--steps", sim.steps, "Steps to run")->check(CLI::PositiveNumber)->capture_default_str();
  simulate->add_option("--seed", sim.seed)->capture_default_str();
  simulate->add_option("--trace", sim.trace, "Write time,vehicle,position,velocity CSV");
  simulate->add_flag("--log-decisions", sim.log_decisions, "Record right-of-way decisions");

  SweepArgs sw;
  auto* sweep = app.add_subcommand("sweep", "Full pipeline over the intensity grid");
  sweep->add_option("--seed", sw.seed, "Overrides the scenario seed");
  sweep->add_option("--replications", sw.replications, "Overrides the scenario replication count");
  sweep->add_option("--intensities", sw.intensities, "a,b,c or start:stop:step");
  sweep->add_option("--mode", sw.mode, "exact | paper-naive");
  sweep->add_option("--reliability-from", sw.reliability_from, "q_of_mean_delay | mean_of_q");
  sweep->add_flag("--progress", sw.progress, "Report progress on stderr");

  auto* validate = app.add_subcommand("validate", "Check a scenario file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*structural) return run_structural(g, mode, measure, format);
    if (*simulate) return run_simulate(g, sim);
    if (*sweep) return run_sweep_cmd(g, sw);
    if (*validate) return run_validate(g);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitRuntime;
}
