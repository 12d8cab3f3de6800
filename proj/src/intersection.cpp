#include "roadrel/intersection.hpp"

#include <cmath>
#include <sstream>

#include "roadrel/error.hpp"

namespace roadrel {

const char* to_string(ManeuverKind k) {
  switch (k) {
    case ManeuverKind::merge_right: return "merge_right";
    case ManeuverKind::merge_left_cross: return "merge_left_cross";
    case ManeuverKind::turn_with_priority: return "turn_with_priority";
    case ManeuverKind::straight_priority: return "straight_priority";
    case ManeuverKind::signalized_straight: return "signalized_straight";
    case ManeuverKind::signalized_left_cross: return "signalized_left_cross";
  }
  return "?";
}

ManeuverKind parse_maneuver_kind(const std::string& text) {
  for (auto k : {ManeuverKind::merge_right, ManeuverKind::merge_left_cross, ManeuverKind::turn_with_priority,
                 ManeuverKind::straight_priority, ManeuverKind::signalized_straight,
                 ManeuverKind::signalized_left_cross}) {
    if (text == to_string(k)) return k;
  }
  throw ValidationError("unknown maneuver kind '" + text + "'");
}

void ManeuverSpec::validate() const {
  if (branches.empty()) throw ValidationError("maneuver needs at least one branch");
  double total = 0.0;
  for (std::size_t i = 0; i < branches.size(); ++i) {
    const Branch& b = branches[i];
    if (!(b.probability >= 0.0)) throw ValidationError("branch probabilities must be non-negative");
    if (b.slow_to && (*b.slow_to < 0 || *b.slow_to > 2)) throw ValidationError("slow_to must be 0, 1 or 2");
    for (std::size_t j = 0; j < i; ++j) {
      if (branches[j].turn == b.turn) throw ValidationError(std::string("duplicate branch ") + to_string(b.turn));
    }
    total += b.probability;
    if (needs_rules_for(kind, b.turn) && !b.slow_to) {
      throw ValidationError(std::string("branch ") + to_string(b.turn) + " of a " + to_string(kind) +
                            " maneuver yields right of way and needs slow_to");
    }
    if (kind == ManeuverKind::merge_left_cross && b.turn == Turn::straight) {
      throw ValidationError("merge_left_cross supports only left and right branches");
    }
  }
  if (std::abs(total - 1.0) > 1e-9) throw ValidationError("branch probabilities must sum to 1");
}

bool needs_rules_for(ManeuverKind kind, Turn t) {
  switch (kind) {
    case ManeuverKind::merge_right:
    case ManeuverKind::merge_left_cross: return true;
    case ManeuverKind::turn_with_priority:
    case ManeuverKind::signalized_left_cross: return t == Turn::left;
    default: return false;
  }
}

const Branch* ManeuverSpec::branch_for(Turn t) const {
  for (const Branch& b : branches) {
    if (b.turn == t) return &b;
  }
  return nullptr;
}

int ManeuverSpec::conflict_stream_count() const {
  switch (kind) {
    case ManeuverKind::merge_right:
    case ManeuverKind::signalized_left_cross: return 1;
    case ManeuverKind::merge_left_cross: return 2;
    case ManeuverKind::turn_with_priority: return branch_for(Turn::left) ? 1 : 0;
    default: return 0;
  }
}

bool ManeuverSpec::signalized() const {
  return kind == ManeuverKind::signalized_straight || kind == ManeuverKind::signalized_left_cross;
}

const char* to_string(LightState s) {
  switch (s) {
    case LightState::red: return "red";
    case LightState::red_yellow: return "red_yellow";
    case LightState::green: return "green";
    case LightState::yellow: return "yellow";
  }
  return "?";
}

void TrafficLight::validate() const {
  if (red <= 0 || red_yellow < 0 || green <= 0 || yellow < 0) throw ValidationError("light phase durations invalid");
  if (offset < 0 || offset >= cycle()) throw ValidationError("light offset must lie in [0, cycle)");
}

LightState light_state(const TrafficLight& light, long step) {
  if (step < 0) throw ValidationError("light state needs a non-negative time");
  long phase = (step + light.offset) % light.cycle();
  if (phase < light.red) return LightState::red;
  phase -= light.red;
  if (phase < light.red_yellow) return LightState::red_yellow;
  phase -= light.red_yellow;
  if (phase < light.green) return LightState::green;
  return LightState::yellow;
}

int comfortable_stopping_distance(int v, const SimParams& params) {
  int d = 0;
  for (int w = v - params.delta_v; w > 0; w -= params.delta_v) d += w;
  return d;
}

bool may_pass_light(LightState state, int distance_to_line, int v, const SimParams& params) {
  switch (state) {
    case LightState::red:
    case LightState::red_yellow: return false;
    case LightState::green: return true;
    case LightState::yellow: return comfortable_stopping_distance(v, params) > distance_to_line;
  }
  return false;
}

int crossing_time(int v) {
  switch (v) {
    case 0: return 3;
    case 1: return 2;
    case 2: return 1;
    default: throw ValidationError("crossing speed " + std::to_string(v) + " has no crossing time; expected 0, 1 or 2");
  }
}

bool can_merge(int l_x, int v_x, int d_keep_x, const SimParams& params) {
  int lhs = l_x - v_x;
  for (int k = 2; k <= params.v_max; ++k) lhs += k - std::min(params.v_max, v_x + k - 1);
  return lhs > d_keep_x;
}

bool can_cross(int l_x, int v_x, int v_n, int d_dec_x, const SimParams& params) {
  int tau = crossing_time(v_n);
  int lhs = l_x;
  for (int k = 0; k <= tau; ++k) lhs -= std::max(0, std::min(params.v_max, v_x + k - 1));
  return lhs > d_dec_x;
}

ConflictStream::ConflictStream(const SimParams& params, double intensity, std::uint64_t seed, int junction)
    : road_(junction + 10, params, seed), intensity_(intensity), junction_(junction) {}

void ConflictStream::step() { road_.step(intensity_); }

ConflictView ConflictStream::view() const {
  ConflictView out;
  const int l_s = road_.params().l_s;
  for (const Vehicle& veh : road_.vehicles()) {
    if (veh.position - l_s + 1 > junction_) continue;
    if (veh.position >= junction_) {
      out.junction_occupied = true;
      return out;
    }
    out.distance = junction_ - veh.position;
    out.speed = veh.velocity;
    return out;
  }
  return out;
}

const char* to_string(RuleKind r) {
  switch (r) {
    case RuleKind::merge: return "merge";
    case RuleKind::cross: return "cross";
    case RuleKind::light: return "light";
    case RuleKind::one_per_step: return "one_per_step";
  }
  return "?";
}

IntersectionControl::IntersectionControl(ManeuverSpec maneuver, std::optional<TrafficLight> light,
                                         const SimParams& params, double intensity, std::uint64_t seed)
    : maneuver_(std::move(maneuver)), light_(light), params_(params) {
  maneuver_.validate();
  if (maneuver_.signalized() && !light_) throw ValidationError("signalized maneuver needs a traffic light");
  if (light_) light_->validate();
  for (int k = 0; k < maneuver_.conflict_stream_count(); ++k) {
    streams_.emplace_back(params, intensity, derive_seed({seed, static_cast<std::uint64_t>(k)}));
  }
  for (int t = 0; t < kStreamWarmup; ++t) {
    for (auto& s : streams_) s.step();
  }
}

bool IntersectionControl::needs_rules(Turn t) const { return needs_rules_for(maneuver_.kind, t); }

void IntersectionControl::begin_step(long step, Road& road) {
  crossed_this_step_ = false;
  if (!light_) return;
  state_ = light_state(*light_, step);
  if (*state_ != LightState::yellow) return;
  // Commit front to back; nobody commits behind a vehicle that is stopping.
  const int reach = comfortable_stopping_distance(params_.v_max, params_);
  for (Vehicle& veh : road.mutable_vehicles()) {
    if (veh.committed) continue;
    int to_line = road.length() - 1 - veh.position;
    if (to_line > reach) break;
    if (!may_pass_light(*state_, to_line, veh.velocity, params_)) break;
    veh.committed = true;
  }
}

std::optional<int> IntersectionControl::approach_speed_limit(const Vehicle& v) const {
  const Branch* b = maneuver_.branch_for(v.route);
  return b ? b->slow_to : std::nullopt;
}

bool IntersectionControl::line_blocked_for(const Vehicle& v) const {
  (void)v;
  return state_ && *state_ != LightState::green;
}

Decision IntersectionControl::evaluate_merge(const Vehicle& v, int stream, long step) const {
  Decision d;
  d.step = step;
  d.vehicle = v.id;
  d.route = v.route;
  d.rule = RuleKind::merge;
  d.stream = stream;
  d.v_n = v.velocity;
  ConflictView view = streams_[static_cast<std::size_t>(stream)].view();
  d.junction_occupied = view.junction_occupied;
  d.l_x = view.distance;
  d.v_x = view.speed;
  if (view.junction_occupied) return d;
  if (!view.distance) {
    d.permitted = true;
    return d;
  }
  // Main-road driver with the merged vehicle ahead of it at speed 1.
  d.threshold = safe_distances(view.speed, 1, params_).d_keep;
  d.permitted = can_merge(*view.distance, view.speed, d.threshold, params_);
  return d;
}

Decision IntersectionControl::evaluate_cross(const Vehicle& v, int stream, long step) const {
  Decision d;
  d.step = step;
  d.vehicle = v.id;
  d.route = v.route;
  d.rule = RuleKind::cross;
  d.stream = stream;
  d.v_n = v.velocity;
  ConflictView view = streams_[static_cast<std::size_t>(stream)].view();
  d.junction_occupied = view.junction_occupied;
  d.l_x = view.distance;
  d.v_x = view.speed;
  if (view.junction_occupied) return d;
  if (!view.distance) {
    d.permitted = true;
    return d;
  }
  d.threshold = safe_distances(view.speed, v.velocity, params_).d_dec;
  d.permitted = can_cross(*view.distance, view.speed, v.velocity, d.threshold, params_);
  return d;
}

bool IntersectionControl::rules_allow(const Vehicle& v, long step, std::vector<Decision>* log) const {
  auto record = [&](Decision d) {
    if (log) log->push_back(d);
    return d.permitted;
  };
  switch (maneuver_.kind) {
    case ManeuverKind::merge_right: return record(evaluate_merge(v, 0, step));
    case ManeuverKind::merge_left_cross:
      if (v.route == Turn::right) return record(evaluate_merge(v, 0, step));
      return record(evaluate_cross(v, 0, step)) && record(evaluate_merge(v, 1, step));
    case ManeuverKind::turn_with_priority:
    case ManeuverKind::signalized_left_cross:
      if (v.route == Turn::left) return record(evaluate_cross(v, 0, step));
      return true;
    default: return true;
  }
}

bool IntersectionControl::permit_crossing(const Vehicle& v, int new_speed, long step) {
  (void)new_speed;
  if (state_ && !v.committed && *state_ != LightState::green) {
    if (logging_) decisions_.push_back({step, v.id, v.route, RuleKind::light, 0, false, {}, 0, v.velocity, 0, false});
    return false;
  }
  if (!needs_rules(v.route)) return true;
  if (crossed_this_step_) {
    if (logging_) {
      decisions_.push_back({step, v.id, v.route, RuleKind::one_per_step, 0, false, {}, 0, v.velocity, 0, false});
    }
    return false;
  }
  bool ok = rules_allow(v, step, logging_ ? &decisions_ : nullptr);
  if (ok) crossed_this_step_ = true;
  return ok;
}

void IntersectionControl::on_exit(const Vehicle& v, long step) {
  // `step` is the time after the move; the decision was taken at step - 1.
  if (state_ && !v.committed && (*state_ == LightState::red || *state_ == LightState::red_yellow)) ++red_violations_;
  if (logging_) crossings_.push_back({step - 1, v.id, state_, v.committed});
}

void IntersectionControl::end_step(long step) {
  (void)step;
  for (auto& s : streams_) s.step();
}

std::optional<int> IntersectionControl::end_of_road_constraint(const Road& road, const Vehicle& v) const {
  if (!v.committed && line_blocked_for(v)) return road.length();
  if (needs_rules(v.route) && (crossed_this_step_ || !rules_allow(v, road.time(), nullptr))) return road.length();
  return std::nullopt;
}

}  // namespace roadrel
