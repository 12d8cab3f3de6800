#pragma once

// Right of way at the end of a road: merging, crossing, slow zones, lights.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "roadrel/lai.hpp"

namespace roadrel {

enum class ManeuverKind {
  merge_right,            ///< join a main road from the right (rule 1)
  merge_left_cross,       ///< right: rule 1 on the near stream; left: rule 2 near, rule 1 far
  turn_with_priority,     ///< priority road; a left turn still yields to oncoming traffic (rule 2)
  straight_priority,      ///< no conflict checks
  signalized_straight,    ///< traffic light only
  signalized_left_cross,  ///< traffic light; left turns also need rule 2 against oncoming traffic
};

const char* to_string(ManeuverKind k);
ManeuverKind parse_maneuver_kind(const std::string& text);

struct Branch {
  Turn turn = Turn::straight;
  double probability = 1.0;
  std::optional<int> slow_to;  ///< speed cap at the stop line, in {0, 1, 2}
};

struct ManeuverSpec {
  ManeuverKind kind = ManeuverKind::straight_priority;
  std::vector<Branch> branches{Branch{}};

  void validate() const;
  const Branch* branch_for(Turn t) const;
  /// Number of independent conflict streams the maneuver needs.
  int conflict_stream_count() const;
  bool signalized() const;
};

/// True when a vehicle taking turn t must pass rule 1 or rule 2 checks.
bool needs_rules_for(ManeuverKind kind, Turn t);

enum class LightState { red, red_yellow, green, yellow };
const char* to_string(LightState s);

struct TrafficLight {
  int red = 60;
  int red_yellow = 1;
  int green = 60;
  int yellow = 3;
  int offset = 0;  ///< seconds added to the clock before looking up the phase

  int cycle() const { return red + red_yellow + green + yellow; }
  void validate() const;
};

LightState light_state(const TrafficLight& light, long step);

/// Distance covered when braking by delta_v each step from v to rest.
int comfortable_stopping_distance(int v, const SimParams& params);

/// Red and red-yellow never let a vehicle pass; green always does; on yellow
/// only a vehicle that cannot stop comfortably within distance_to_line passes.
bool may_pass_light(LightState state, int distance_to_line, int v, const SimParams& params);

/// Time to cross the opposing carriageway from speed 0, 1 or 2.
int crossing_time(int v);

/// Rule 1: l_x - v_x - sum_{k=2}^{v_max} min(v_max, v_x+k-1) + sum_{k=2}^{v_max} k > d_keep_x.
bool can_merge(int l_x, int v_x, int d_keep_x, const SimParams& params);
/// Rule 2: l_x - sum_{k=0}^{tau(v_n)} min(v_max, v_x+k-1) > d_dec_x, terms floored at zero.
bool can_cross(int l_x, int v_x, int v_n, int d_dec_x, const SimParams& params);

/// What a merging or crossing vehicle sees of one main-road stream.
struct ConflictView {
  bool junction_occupied = false;
  std::optional<int> distance;  ///< l_x of the nearest upstream vehicle
  int speed = 0;                ///< v_x of that vehicle
};

/// Independent free-flow traffic on a conflicting road, junction at a fixed
/// cell. Steps after the subject road has made its decisions.
class ConflictStream {
 public:
  static constexpr int kJunctionCell = 100;

  ConflictStream(const SimParams& params, double intensity, std::uint64_t seed, int junction = kJunctionCell);
  void step();
  ConflictView view() const;
  const Road& road() const { return road_; }
  Road& road() { return road_; }

 private:
  Road road_;
  double intensity_;
  int junction_;
};

enum class RuleKind { merge, cross, light, one_per_step };
const char* to_string(RuleKind r);

struct Decision {
  long step = 0;
  std::uint64_t vehicle = 0;
  Turn route = Turn::straight;
  RuleKind rule = RuleKind::merge;
  int stream = 0;
  bool junction_occupied = false;
  std::optional<int> l_x;
  int v_x = 0;
  int v_n = 0;
  int threshold = 0;  ///< d_keep_x or d_dec_x
  bool permitted = false;
};

struct CrossingEvent {
  long step = 0;
  std::uint64_t vehicle = 0;
  std::optional<LightState> light;
  bool committed = false;
};

/// RoadControl for one road end. Owns the conflict streams it needs.
class IntersectionControl : public RoadControl {
 public:
  /// Number of steps the conflict streams run before the subject road starts.
  static constexpr int kStreamWarmup = 200;

  IntersectionControl(ManeuverSpec maneuver, std::optional<TrafficLight> light, const SimParams& params,
                      double intensity, std::uint64_t seed);

  void begin_step(long step, Road& road) override;
  std::optional<int> approach_speed_limit(const Vehicle& v) const override;
  bool line_blocked_for(const Vehicle& v) const override;
  bool permit_crossing(const Vehicle& v, int new_speed, long step) override;
  void on_exit(const Vehicle& v, long step) override;
  void end_step(long step) override;

  /// Cell of the virtual stationary obstacle for v (the road length) when v
  /// would have to wait at the line now, or nothing when it may go.
  std::optional<int> end_of_road_constraint(const Road& road, const Vehicle& v) const;

  void set_logging(bool on) { logging_ = on; }
  const std::vector<Decision>& decisions() const { return decisions_; }
  const std::vector<CrossingEvent>& crossings() const { return crossings_; }
  /// Crossings made on red or red-yellow by a vehicle that had not committed.
  std::uint64_t red_violations() const { return red_violations_; }
  std::optional<LightState> current_light() const { return state_; }
  const std::vector<ConflictStream>& streams() const { return streams_; }
  const ManeuverSpec& maneuver() const { return maneuver_; }

 private:
  bool rules_allow(const Vehicle& v, long step, std::vector<Decision>* log) const;
  Decision evaluate_merge(const Vehicle& v, int stream, long step) const;
  Decision evaluate_cross(const Vehicle& v, int stream, long step) const;
  bool needs_rules(Turn t) const;

  ManeuverSpec maneuver_;
  std::optional<TrafficLight> light_;
  SimParams params_;
  std::vector<ConflictStream> streams_;
  std::optional<LightState> state_;
  bool crossed_this_step_ = false;
  bool logging_ = false;
  std::vector<Decision> decisions_;
  std::vector<CrossingEvent> crossings_;
  std::uint64_t red_violations_ = 0;
};

}  // namespace roadrel
