#pragma once

// Experiment orchestration: per-segment simulation, delay aggregation and the
// intensity sweep that turns delays into reliabilities and importances.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "roadrel/scenario.hpp"

namespace roadrel {

/// Step budgets of one replication.
struct RunBudget {
  int warmup_steps = 500;
  int measure_steps = 2000;
  int drain_steps = 3000;

  static RunBudget from(const SweepSettings& s) { return {s.warmup_steps, s.measure_steps, s.drain_steps}; }
};

/// Raw outcome of one or more replications on one segment.
struct SegmentRun {
  /// travel_hist[t] = number of measured vehicles with travel time t steps.
  std::vector<std::uint64_t> travel_hist;
  std::uint64_t completed = 0;
  std::uint64_t censored = 0;  ///< measured vehicles still on the road when the drain budget ran out
  std::uint64_t red_violations = 0;
  RoadStats road;

  void merge(const SegmentRun& other);
  /// Smallest observed travel time, or -1 when nothing completed.
  long min_travel_time() const;
};

/// One replication. Vehicles entering during the warm-up are discarded; those
/// entering during the measurement window are followed until they leave.
/// Intensity 0 runs a single probe vehicle from the entrance instead.
SegmentRun simulate_segment(const Scenario& sc, std::size_t segment, double intensity, std::uint64_t seed,
                            const RunBudget& budget);

/// Seed of replication `rep` of `segment` at `intensity`.
std::uint64_t replication_seed(std::uint64_t seed, int segment_id, double intensity, int rep);

struct DelayStats {
  std::uint64_t completed = 0;
  std::uint64_t censored = 0;
  bool saturated = false;   ///< nothing completed; delays are reported as +inf
  long baseline_steps = 0;  ///< travel time counted as zero delay
  double mean_delay = 0.0;  ///< seconds
  double p50 = 0.0, p90 = 0.0, p99 = 0.0;
  double mean_satisfaction = 0.0;  ///< vehicle average of Q(delay)
};

/// Delay = travel time minus baseline, in seconds.
DelayStats delay_stats(const SegmentRun& run, long baseline_steps, const SimParams& sim,
                       const WeibullPatience& patience);

/// Reliability of a segment from its delays under the chosen rule.
double segment_reliability(const DelayStats& d, const WeibullPatience& patience, ReliabilityRule rule);

/// Worker threads: ROADREL_THREADS if set and positive, else hardware concurrency.
unsigned thread_count();

struct SegmentDelays {
  int segment_id = 0;
  std::string name;
  DelayStats delays;
  SegmentRun run;
};

/// All segments at one intensity. The baseline is the smallest travel time of
/// each segment's batch.
std::vector<SegmentDelays> measure_delays(const Scenario& sc, double intensity, int replications,
                                          std::uint64_t seed);

struct IntensityRow {
  double intensity = 0.0;
  std::vector<DelayStats> delays;  ///< per segment, component order
  std::vector<double> p;
  double system = 0.0;
  std::vector<double> routes;
  std::vector<double> birnbaum;
};

struct SweepResult {
  std::string scenario;
  std::uint64_t seed = 0;
  int replications = 0;
  EvaluationMode mode = EvaluationMode::exact;
  ReliabilityRule rule = ReliabilityRule::q_of_mean_delay;
  RunBudget budget;
  SimParams sim;
  WeibullPatience patience;
  std::vector<int> segment_ids;
  std::vector<std::string> segment_names;
  std::vector<std::string> route_names;
  std::vector<IntensityRow> rows;
  /// Aggregate simulator counters over every replication.
  RoadStats road;
  std::uint64_t red_violations = 0;
};

using Progress = std::function<void(std::size_t done, std::size_t total)>;

/// Full pipeline over sc.sweep. The delay baseline of a segment is its smallest
/// travel time across the whole sweep.
SweepResult run_sweep(const Scenario& sc, const Progress& progress = {});

/// Reliability evaluation of one row from its p vector.
void evaluate_row(const Scenario& sc, EvaluationMode mode, IntensityRow& row);

const char* to_string(ReliabilityRule r);

}  // namespace roadrel
