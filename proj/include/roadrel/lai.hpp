#pragma once

// Single-lane LAI cellular automaton with open boundaries.

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <utility>
#include <vector>

#include "roadrel/random.hpp"

namespace roadrel {

/// Units are cells and steps (one cell = cell_m metres, one step = step_s seconds).
struct SimParams {
  int v_max = 5;
  int delta_v = 1;
  int M = 2;  ///< emergency deceleration
  double R0 = 0.8;
  double Rd = 1.0;
  int v_s = 3;
  double R_s = 0.1;  ///< random slow-down probability; not given a value in the source model
  int l_s = 2;
  double cell_m = 2.5;
  double step_s = 1.0;

  void validate() const;
};

enum class Turn : std::uint8_t { straight, left, right };
const char* to_string(Turn t);

struct Vehicle {
  std::uint64_t id = 0;
  int position = 0;  ///< front bumper cell; occupies [position - l_s + 1, position]
  int velocity = 0;
  long entry_time = 0;
  Turn route = Turn::straight;
  bool committed = false;  ///< passes the stop line regardless of a light blocker
};

struct SafeDistances {
  int d_acc = 0;
  int d_keep = 0;
  int d_dec = 0;
};

/// d_n = x_{n+1} - x_n - l_s for follower n behind leader n+1.
int gap(const Vehicle& follower, const Vehicle& leader, const SimParams& params);

/// sum_{i=0}^{floor(v/M)} (v - i M); zero for v < 0.
int stopping_distance(int v, int M);

/// Follower stopping distance at speeds min(v+dv, v_max), v and v-dv, minus
/// the leader's stopping distance from v_next - M, each floored at zero.
SafeDistances safe_distances(int v, int v_next, const SimParams& params);

/// R_a = min(R_d, R_0 + v (R_d - R_0) / v_s).
double acceleration_probability(int v, const SimParams& params);

struct Leader {
  int gap = 0;
  int speed = 0;
};

/// One LAI speed update from uniform draw u. With no leader the road ahead is
/// free. Regimes: gap >= d_acc accelerates with probability R_a;
/// d_acc > gap >= d_keep slows by dv with probability R_s;
/// d_keep > gap >= d_dec slows by dv; gap < d_dec brakes by M.
int next_speed(int v, std::optional<Leader> leader, double u, const SimParams& params);

/// Table-driven form of next_speed used in the stepping loop.
class SpeedRule {
 public:
  explicit SpeedRule(const SimParams& params);
  int free(int v, double u) const { return u < accel_[v] ? std::min(v + dv_, vmax_) : v; }
  int follow(int v, int gap, int v_leader, double u) const;
  const SafeDistances& safe(int v, int v_next) const { return safe_[v][v_next]; }

 private:
  static constexpr int kMaxSpeed = 16;
  int vmax_, dv_, M_;
  double rs_;
  std::array<double, kMaxSpeed + 1> accel_{};
  std::array<std::array<SafeDistances, kMaxSpeed + 1>, kMaxSpeed + 1> safe_{};
};

class Road;

/// Hooks an intersection uses to act on the end of a road.
class RoadControl {
 public:
  virtual ~RoadControl() = default;
  virtual void begin_step(long step, Road& road) { (void)step, (void)road; }
  /// Speed the vehicle must be at or below when it crosses the stop line.
  virtual std::optional<int> approach_speed_limit(const Vehicle& v) const {
    (void)v;
    return std::nullopt;
  }
  /// True when a stationary obstacle sits just past the stop line for v.
  virtual bool line_blocked_for(const Vehicle& v) const {
    (void)v;
    return false;
  }
  /// Asked once when v would cross the line this step at new_speed.
  virtual bool permit_crossing(const Vehicle& v, int new_speed, long step) {
    (void)v, (void)new_speed, (void)step;
    return true;
  }
  virtual void on_exit(const Vehicle& v, long step) { (void)v, (void)step; }
  virtual void end_step(long step) { (void)step; }
};

struct ExitRecord {
  std::uint64_t id;
  long entry_time;
  long exit_time;
  Turn route;
  long travel_time() const { return exit_time - entry_time; }
};

struct RoadStats {
  std::uint64_t vehicle_steps = 0;
  std::uint64_t spawn_attempts = 0;
  std::uint64_t spawned = 0;
  std::uint64_t spawn_blocked = 0;
  std::uint64_t emergency_brakes = 0;
  std::uint64_t min_gap_violations = 0;  ///< negative gaps seen; always zero unless an invariant broke
  /// Histogram of per-step speed changes, index = change + M.
  std::vector<std::uint64_t> speed_changes;
};

/// A single lane of length_cells cells. Vehicles are kept front first.
///
/// Each step: speeds update in parallel from the time-t state, positions
/// advance, vehicles with position >= length leave, then one spawn attempt
/// is made.
class Road {
 public:
  Road(int length_cells, const SimParams& params, std::uint64_t seed);

  void set_control(RoadControl* control) { control_ = control; }
  /// Route probabilities for spawned vehicles; default is straight only.
  void set_routes(std::vector<std::pair<Turn, double>> routes);
  void set_trace(std::ostream* trace) { trace_ = trace; }

  void step(double intensity);
  void update_speeds();
  void update_positions();
  /// One spawn attempt with probability `intensity`; returns true on insertion.
  bool spawn(double intensity);

  /// Inserts a vehicle behind the current last one (tests, probes).
  const Vehicle& place_vehicle(int position, int velocity, Turn route = Turn::straight);

  int length() const { return length_; }
  long time() const { return time_; }
  const SimParams& params() const { return params_; }
  const SpeedRule& rule() const { return rule_; }
  const std::vector<Vehicle>& vehicles() const { return vehicles_; }
  std::vector<Vehicle>& mutable_vehicles() { return vehicles_; }
  const RoadStats& stats() const { return stats_; }
  /// Exit records accumulated since the last take_exits().
  std::vector<ExitRecord> take_exits();
  const std::vector<ExitRecord>& exits() const { return exits_; }

 private:
  int length_;
  SimParams params_;
  SpeedRule rule_;
  Rng rng_;
  long time_ = 0;
  std::uint64_t next_id_ = 0;
  std::vector<Vehicle> vehicles_;
  std::vector<int> new_speed_;
  std::vector<std::pair<Turn, double>> routes_{{Turn::straight, 1.0}};
  std::vector<ExitRecord> exits_;
  RoadControl* control_ = nullptr;
  std::ostream* trace_ = nullptr;
  RoadStats stats_;
};

}  // namespace roadrel
