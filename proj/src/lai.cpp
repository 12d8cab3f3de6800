#include "roadrel/lai.hpp"

#include <cmath>
#include <sstream>

#include "roadrel/error.hpp"

namespace roadrel {
namespace {

constexpr int kSpawnSpeed = 2;

// Largest new speed up to `cap` compatible with reaching the stop line at
// speed <= s, slowing by at most one per step. Crossing is allowed only from
// v <= s, so the admissible set need not be an interval.
int max_admissible_speed(int v, int distance_to_line, int s, int cap) {
  for (int u = cap; u > 0; --u) {
    if (u > distance_to_line) {
      if (v <= s) return u;
      continue;
    }
    if (u <= s) return u;
    int need = 0;
    for (int w = s; w < u; ++w) need += w;
    if (distance_to_line - u >= need) return u;
  }
  return 0;
}

}  // namespace

void SimParams::validate() const {
  auto fail = [](const std::string& msg) { throw ValidationError("simulation parameters: " + msg); };
  if (!(delta_v > 0 && delta_v <= M && M <= v_max)) fail("need 0 < delta_v <= M <= v_max");
  if (v_max > 16) fail("v_max above 16 is not supported");
  if (!(R0 >= 0.0 && R0 <= 1.0 && Rd >= 0.0 && Rd <= 1.0 && R_s >= 0.0 && R_s <= 1.0)) {
    fail("probabilities must lie in [0,1]");
  }
  if (v_s <= 0) fail("v_s must be positive");
  if (l_s < 1) fail("vehicle length must be at least one cell");
  if (!(cell_m > 0.0 && step_s > 0.0)) fail("cell size and step length must be positive");
}

const char* to_string(Turn t) {
  switch (t) {
    case Turn::straight: return "straight";
    case Turn::left: return "left";
    case Turn::right: return "right";
  }
  return "?";
}

int gap(const Vehicle& follower, const Vehicle& leader, const SimParams& params) {
  int d = leader.position - follower.position - params.l_s;
  if (d < 0) {
    std::ostringstream os;
    os << "vehicle " << follower.id << " at " << follower.position << " overlaps vehicle " << leader.id << " at "
       << leader.position;
    throw InvariantBreach(os.str());
  }
  return d;
}

int stopping_distance(int v, int M) {
  int s = 0;
  for (int w = v; w > 0; w -= M) s += w;
  return s;
}

SafeDistances safe_distances(int v, int v_next, const SimParams& p) {
  int leader = stopping_distance(v_next - p.M, p.M);
  auto floor0 = [&](int speed) { return std::max(0, stopping_distance(speed, p.M) - leader); };
  return {floor0(std::min(v + p.delta_v, p.v_max)), floor0(v), floor0(v - p.delta_v)};
}

double acceleration_probability(int v, const SimParams& p) {
  return std::min(p.Rd, p.R0 + static_cast<double>(v) * (p.Rd - p.R0) / static_cast<double>(p.v_s));
}

int next_speed(int v, std::optional<Leader> leader, double u, const SimParams& p) {
  if (!leader) return u < acceleration_probability(v, p) ? std::min(v + p.delta_v, p.v_max) : v;
  SafeDistances d = safe_distances(v, leader->speed, p);
  if (leader->gap >= d.d_acc) return u < acceleration_probability(v, p) ? std::min(v + p.delta_v, p.v_max) : v;
  if (leader->gap >= d.d_keep) return u < p.R_s ? std::max(0, v - p.delta_v) : v;
  if (leader->gap >= d.d_dec) return std::max(0, v - p.delta_v);
  return std::max(0, v - p.M);
}

SpeedRule::SpeedRule(const SimParams& p) : vmax_(p.v_max), dv_(p.delta_v), M_(p.M), rs_(p.R_s) {
  p.validate();
  for (int v = 0; v <= vmax_; ++v) {
    accel_[v] = acceleration_probability(v, p);
    for (int w = 0; w <= vmax_; ++w) safe_[v][w] = safe_distances(v, w, p);
  }
}

int SpeedRule::follow(int v, int gap, int v_leader, double u) const {
  const SafeDistances& d = safe_[v][v_leader];
  if (gap >= d.d_acc) return u < accel_[v] ? std::min(v + dv_, vmax_) : v;
  if (gap >= d.d_keep) return u < rs_ ? std::max(0, v - dv_) : v;
  if (gap >= d.d_dec) return std::max(0, v - dv_);
  return std::max(0, v - M_);
}

Road::Road(int length_cells, const SimParams& params, std::uint64_t seed)
    : length_(length_cells), params_(params), rule_(params), rng_(seed) {
  if (length_cells <= params.l_s) throw ValidationError("road must be longer than one vehicle");
  stats_.speed_changes.assign(static_cast<std::size_t>(params.M + params.delta_v + 1), 0);
}

void Road::set_routes(std::vector<std::pair<Turn, double>> routes) {
  double total = 0.0;
  for (const auto& [turn, w] : routes) {
    if (!(w >= 0.0)) throw ValidationError("route probabilities must be non-negative");
    total += w;
  }
  if (routes.empty() || std::abs(total - 1.0) > 1e-9) throw ValidationError("route probabilities must sum to 1");
  routes_ = std::move(routes);
}

void Road::step(double intensity) {
  if (control_) control_->begin_step(time_, *this);
  update_speeds();
  update_positions();
  spawn(intensity);
  if (control_) control_->end_step(time_);
}

void Road::update_speeds() {
  const std::size_t n = vehicles_.size();
  new_speed_.resize(n);
  const int v_max = params_.v_max;
  // Beyond this distance neither the stop-line obstacle nor a speed limit at
  // the line can change the chosen speed.
  const int horizon = rule_.safe(v_max, 0).d_acc + v_max * (v_max + 1) / 2 + v_max + 1;

  for (std::size_t i = 0; i < n; ++i) {
    const Vehicle& veh = vehicles_[i];
    const int v = veh.velocity;
    const double u = rng_.uniform();
    int w = i == 0 ? rule_.free(v, u)
                   : rule_.follow(v, gap(veh, vehicles_[i - 1], params_), vehicles_[i - 1].velocity, u);

    const int to_line = length_ - 1 - veh.position;
    if (control_ && to_line <= horizon) {
      if (auto s = control_->approach_speed_limit(veh)) w = max_admissible_speed(v, to_line, *s, w);
      bool held = !veh.committed && control_->line_blocked_for(veh);
      if (!held && veh.position + w >= length_ && !control_->permit_crossing(veh, w, time_)) held = true;
      if (held) {
        w = std::min(w, rule_.follow(v, to_line, 0, u));
        if (veh.position + w >= length_) {
          std::ostringstream os;
          os << "vehicle " << veh.id << " at " << veh.position << " speed " << v
             << " cannot stop before a closed stop line at step " << time_;
          throw InvariantBreach(os.str());
        }
      }
    }

    const int change = w - v;
    if (change < -params_.M || change > params_.delta_v || w < 0 || w > v_max) {
      std::ostringstream os;
      os << "vehicle " << veh.id << " speed change " << v << " -> " << w << " outside the allowed range";
      throw InvariantBreach(os.str());
    }
    if (change < -params_.delta_v) ++stats_.emergency_brakes;
    ++stats_.speed_changes[static_cast<std::size_t>(change + params_.M)];
    new_speed_[i] = w;
  }
  for (std::size_t i = 0; i < n; ++i) vehicles_[i].velocity = new_speed_[i];
  stats_.vehicle_steps += n;
}

void Road::update_positions() {
  for (auto& veh : vehicles_) veh.position += veh.velocity;
  for (std::size_t i = 1; i < vehicles_.size(); ++i) {
    if (vehicles_[i - 1].position - vehicles_[i].position - params_.l_s < 0) {
      ++stats_.min_gap_violations;
      gap(vehicles_[i], vehicles_[i - 1], params_);
    }
  }
  ++time_;
  if (trace_) {
    for (const auto& veh : vehicles_) {
      *trace_ << time_ << ',' << veh.id << ',' << veh.position << ',' << veh.velocity << '\n';
    }
  }
  std::size_t gone = 0;
  while (gone < vehicles_.size() && vehicles_[gone].position >= length_) {
    const Vehicle& veh = vehicles_[gone];
    exits_.push_back({veh.id, veh.entry_time, time_, veh.route});
    if (control_) control_->on_exit(veh, time_);
    ++gone;
  }
  if (gone > 0) vehicles_.erase(vehicles_.begin(), vehicles_.begin() + static_cast<std::ptrdiff_t>(gone));
}

bool Road::spawn(double intensity) {
  if (!(intensity > 0.0)) return false;
  if (rng_.uniform() >= intensity) return false;
  ++stats_.spawn_attempts;
  const int front = params_.l_s - 1;
  const int speed = std::min(kSpawnSpeed, params_.v_max);
  if (!vehicles_.empty()) {
    const Vehicle& last = vehicles_.back();
    int free_gap = last.position - front - params_.l_s;
    if (free_gap < 0 || free_gap < rule_.safe(speed, last.velocity).d_keep) {
      ++stats_.spawn_blocked;
      return false;
    }
  }
  Turn route = routes_.front().first;
  if (routes_.size() > 1) {
    double r = rng_.uniform(), acc = 0.0;
    for (const auto& [turn, w] : routes_) {
      route = turn;
      acc += w;
      if (r < acc) break;
    }
  }
  vehicles_.push_back({next_id_++, front, speed, time_, route, false});
  ++stats_.spawned;
  return true;
}

const Vehicle& Road::place_vehicle(int position, int velocity, Turn route) {
  if (velocity < 0 || velocity > params_.v_max) throw ValidationError("velocity outside [0, v_max]");
  if (position >= length_) throw ValidationError("position beyond the road end");
  if (!vehicles_.empty() && vehicles_.back().position - position - params_.l_s < 0) {
    throw ValidationError("placed vehicle would overlap the last vehicle");
  }
  vehicles_.push_back({next_id_++, position, velocity, time_, route, false});
  return vehicles_.back();
}

std::vector<ExitRecord> Road::take_exits() {
  std::vector<ExitRecord> out;
  out.swap(exits_);
  return out;
}

}  // namespace roadrel
