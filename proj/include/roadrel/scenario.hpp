#pragma once

// Scenario files: road segments, maneuvers, network structure, sweep setup.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "roadrel/intersection.hpp"
#include "roadrel/lai.hpp"
#include "roadrel/satisfaction.hpp"
#include "roadrel/structure.hpp"

namespace roadrel {

inline constexpr int kScenarioSchemaVersion = 1;

struct Segment {
  int id = 0;  ///< user-facing id, as written in the file
  std::string name;
  double length_m = 0.0;
  int length_cells = 0;
  ManeuverSpec maneuver;
  std::optional<TrafficLight> light;
};

struct Route {
  std::string name;
  std::vector<int> segment_ids;
};

/// How a segment's delays become its reliability.
enum class ReliabilityRule { q_of_mean_delay, mean_of_q };

struct SweepSettings {
  std::vector<double> intensities;
  int replications = 1000;
  std::uint64_t seed = 1;
  int warmup_steps = 500;
  int measure_steps = 2000;
  int drain_steps = 3000;
  EvaluationMode mode = EvaluationMode::exact;
  ReliabilityRule reliability = ReliabilityRule::q_of_mean_delay;
};

struct Scenario {
  std::string name;
  std::string description;
  SimParams sim;
  WeibullPatience patience;
  SweepSettings sweep;
  std::vector<Segment> segments;       ///< in component order
  std::vector<std::vector<int>> paths;  ///< minimal paths over segment ids
  std::vector<Route> routes;
  /// Non-fatal findings from validation (e.g. dropped non-minimal paths).
  std::vector<std::string> warnings;

  /// Component index of a segment id; throws for unknown ids.
  std::size_t index_of(int segment_id) const;
  StructureFunction structure() const;
  /// Component-index masks for each route, in route order.
  std::vector<ComponentMask> route_masks() const;
  std::vector<int> segment_ids() const;
};

/// Parses and validates; errors carry the source name and line.
Scenario parse_scenario(const std::string& text, const std::string& source_name);
Scenario load_scenario_file(const std::string& path);
/// `builtin:NAME` selects a bundled scenario; anything else is a file path.
Scenario load_scenario(const std::string& spec);

std::vector<std::string> bundled_scenario_names();
/// Raw YAML of a bundled scenario, or nothing.
std::optional<std::string> bundled_scenario_text(const std::string& name);

inline constexpr const char* kDefaultScenario = "builtin:zdunska-wola";

/// start, start+step, ..., up to stop inclusive (with a half-step tolerance).
std::vector<double> intensity_grid(double start, double stop, double step);

}  // namespace roadrel
