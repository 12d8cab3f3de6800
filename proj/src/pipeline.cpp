#include "roadrel/pipeline.hpp"

#include <atomic>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

#include "roadrel/error.hpp"
#include "roadrel/importance.hpp"
#include "roadrel/intersection.hpp"

namespace roadrel {
namespace {

void merge_stats(RoadStats& into, const RoadStats& from) {
  into.vehicle_steps += from.vehicle_steps;
  into.spawn_attempts += from.spawn_attempts;
  into.spawned += from.spawned;
  into.spawn_blocked += from.spawn_blocked;
  into.emergency_brakes += from.emergency_brakes;
  into.min_gap_violations += from.min_gap_violations;
  if (into.speed_changes.size() < from.speed_changes.size()) into.speed_changes.resize(from.speed_changes.size());
  for (std::size_t i = 0; i < from.speed_changes.size(); ++i) into.speed_changes[i] += from.speed_changes[i];
}

void record(SegmentRun& run, long travel) {
  auto t = static_cast<std::size_t>(travel);
  if (run.travel_hist.size() <= t) run.travel_hist.resize(t + 1);
  ++run.travel_hist[t];
}

std::vector<std::pair<Turn, double>> route_mix(const ManeuverSpec& m) {
  std::vector<std::pair<Turn, double>> out;
  for (const Branch& b : m.branches) out.emplace_back(b.turn, b.probability);
  return out;
}

/// Runs tasks 0..count-1 on the worker pool; rethrows the first failure.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& task, const Progress& progress) {
  std::atomic<std::size_t> next{0}, done{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (;;) {
      std::size_t k = next.fetch_add(1);
      if (k >= count) return;
      try {
        task(k);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next.store(count);
        return;
      }
      std::size_t d = done.fetch_add(1) + 1;
      if (progress) progress(d, count);
    }
  };
  unsigned n = std::min<std::size_t>(thread_count(), std::max<std::size_t>(count, 1));
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

void SegmentRun::merge(const SegmentRun& other) {
  if (travel_hist.size() < other.travel_hist.size()) travel_hist.resize(other.travel_hist.size());
  for (std::size_t i = 0; i < other.travel_hist.size(); ++i) travel_hist[i] += other.travel_hist[i];
  completed += other.completed;
  censored += other.censored;
  red_violations += other.red_violations;
  merge_stats(road, other.road);
}

long SegmentRun::min_travel_time() const {
  for (std::size_t t = 0; t < travel_hist.size(); ++t) {
    if (travel_hist[t] > 0) return static_cast<long>(t);
  }
  return -1;
}

SegmentRun simulate_segment(const Scenario& sc, std::size_t segment, double intensity, std::uint64_t seed,
                            const RunBudget& budget) {
  if (!(intensity >= 0.0 && intensity <= 1.0)) throw ValidationError("intensity must lie in [0, 1]");
  const Segment& seg = sc.segments.at(segment);
  Road road(seg.length_cells, sc.sim, derive_seed({seed, 0}));
  IntersectionControl control(seg.maneuver, seg.light, sc.sim, intensity, derive_seed({seed, 1}));
  road.set_control(&control);
  road.set_routes(route_mix(seg.maneuver));

  SegmentRun run;
  auto collect = [&](long from, long to) {
    for (const ExitRecord& e : road.take_exits()) {
      if (e.entry_time < from || e.entry_time > to) continue;
      record(run, e.travel_time());
      ++run.completed;
    }
  };
  auto finish = [&](long from, long to) {
    // Still on the road: counted at the time spent so far.
    for (const Vehicle& v : road.vehicles()) {
      if (v.entry_time < from || v.entry_time > to) continue;
      record(run, road.time() - v.entry_time);
      ++run.censored;
    }
    run.red_violations = control.red_violations();
    run.road = road.stats();
  };

  if (intensity == 0.0) {
    // Single probe vehicle entering the empty road like a spawned one.
    Rng pick(derive_seed({seed, 2}));
    double r = pick.uniform(), acc = 0.0;
    Turn route = seg.maneuver.branches.back().turn;
    for (const Branch& b : seg.maneuver.branches) {
      acc += b.probability;
      if (r < acc) {
        route = b.turn;
        break;
      }
    }
    road.place_vehicle(sc.sim.l_s - 1, std::min(2, sc.sim.v_max), route);
    const long limit = budget.measure_steps + budget.drain_steps;
    while (!road.vehicles().empty() && road.time() < limit) road.step(0.0);
    collect(0, 0);
    finish(0, 0);
    return run;
  }

  const long first = budget.warmup_steps + 1;
  const long last = budget.warmup_steps + budget.measure_steps;
  for (long t = 0; t < last; ++t) {
    road.step(intensity);
    if ((t & 63) == 63) collect(first, last);
  }
  collect(first, last);
  // Spawning stops; later arrivals could not slow vehicles ahead of them.
  auto pending = [&] {
    for (const Vehicle& v : road.vehicles()) {
      if (v.entry_time >= first && v.entry_time <= last) return true;
    }
    return false;
  };
  for (int t = 0; t < budget.drain_steps && pending(); ++t) {
    road.step(0.0);
    collect(first, last);
  }
  finish(first, last);
  return run;
}

std::uint64_t replication_seed(std::uint64_t seed, int segment_id, double intensity, int rep) {
  return derive_seed({seed, static_cast<std::uint64_t>(segment_id), std::bit_cast<std::uint64_t>(intensity),
                      static_cast<std::uint64_t>(rep)});
}

DelayStats delay_stats(const SegmentRun& run, long baseline_steps, const SimParams& sim,
                       const WeibullPatience& patience) {
  DelayStats d;
  d.completed = run.completed;
  d.censored = run.censored;
  d.baseline_steps = baseline_steps;
  const std::uint64_t total = run.completed + run.censored;
  if (run.completed == 0 || total == 0) {
    d.saturated = true;
    d.mean_delay = d.p50 = d.p90 = d.p99 = kSaturatedDelay;
    d.mean_satisfaction = 0.0;
    return d;
  }
  auto seconds = [&](std::size_t t) {
    return static_cast<double>(static_cast<long>(t) - baseline_steps) * sim.step_s;
  };
  // Nearest-rank quantile.
  auto quantile = [&](double q) {
    auto rank = static_cast<std::uint64_t>(std::ceil(q * static_cast<double>(total)));
    rank = std::max<std::uint64_t>(rank, 1);
    std::uint64_t seen = 0;
    for (std::size_t t = 0; t < run.travel_hist.size(); ++t) {
      seen += run.travel_hist[t];
      if (seen >= rank) return seconds(t);
    }
    return seconds(run.travel_hist.size() - 1);
  };
  double sum = 0.0, q_sum = 0.0;
  for (std::size_t t = 0; t < run.travel_hist.size(); ++t) {
    if (run.travel_hist[t] == 0) continue;
    if (static_cast<long>(t) < baseline_steps) throw InvariantBreach("travel time below the delay baseline");
    auto c = static_cast<double>(run.travel_hist[t]);
    sum += c * seconds(t);
    q_sum += c * satisfaction_probability(patience, seconds(t));
  }
  d.mean_delay = sum / static_cast<double>(total);
  d.mean_satisfaction = q_sum / static_cast<double>(total);
  d.p50 = quantile(0.5);
  d.p90 = quantile(0.9);
  d.p99 = quantile(0.99);
  return d;
}

double segment_reliability(const DelayStats& d, const WeibullPatience& patience, ReliabilityRule rule) {
  if (d.saturated) return 0.0;
  return rule == ReliabilityRule::q_of_mean_delay ? satisfaction_probability(patience, d.mean_delay)
                                                  : d.mean_satisfaction;
}

unsigned thread_count() {
  if (const char* env = std::getenv("ROADREL_THREADS")) {
    char* end = nullptr;
    long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<SegmentDelays> measure_delays(const Scenario& sc, double intensity, int replications,
                                          std::uint64_t seed) {
  if (!(intensity >= 0.0 && intensity <= 1.0)) throw ValidationError("intensity must lie in [0, 1]");
  if (replications < 1) throw ValidationError("replications must be at least 1");
  const std::size_t n = sc.segments.size();
  const auto reps = static_cast<std::size_t>(replications);
  const RunBudget budget = RunBudget::from(sc.sweep);
  std::vector<SegmentDelays> out(n);
  std::vector<std::mutex> locks(n);
  parallel_for(
      n * reps,
      [&](std::size_t k) {
        std::size_t s = k / reps;
        int rep = static_cast<int>(k % reps);
        SegmentRun r =
            simulate_segment(sc, s, intensity, replication_seed(seed, sc.segments[s].id, intensity, rep), budget);
        std::lock_guard lock(locks[s]);
        out[s].run.merge(r);
      },
      {});
  for (std::size_t s = 0; s < n; ++s) {
    out[s].segment_id = sc.segments[s].id;
    out[s].name = sc.segments[s].name;
    out[s].delays = delay_stats(out[s].run, std::max(0L, out[s].run.min_travel_time()), sc.sim, sc.patience);
  }
  return out;
}

void evaluate_row(const Scenario& sc, EvaluationMode mode, IntensityRow& row) {
  const StructureFunction phi = sc.structure();
  const ReliabilityVector p(row.p);
  row.system = reliability(phi, p, mode);
  row.routes.clear();
  for (const Route& route : sc.routes) {
    double r = 1.0;
    for (int id : route.segment_ids) r *= row.p[sc.index_of(id)];
    row.routes.push_back(r);
  }
  row.birnbaum.clear();
  for (std::size_t i = 0; i < sc.segments.size(); ++i) {
    row.birnbaum.push_back(birnbaum_reliability(phi, p, ComponentId{i}, mode));
  }
}

SweepResult run_sweep(const Scenario& sc, const Progress& progress) {
  const SweepSettings& sw = sc.sweep;
  if (sw.intensities.empty()) throw ValidationError("sweep has no intensities");
  if (sw.replications < 1) throw ValidationError("replications must be at least 1");
  for (double x : sw.intensities) {
    if (!(x >= 0.0 && x <= 1.0)) throw ValidationError("intensity must lie in [0, 1]");
  }
  const std::size_t n = sc.segments.size();
  const std::size_t m = sw.intensities.size();
  const auto reps = static_cast<std::size_t>(sw.replications);
  const RunBudget budget = RunBudget::from(sw);

  std::vector<SegmentRun> runs(n * m);
  std::vector<std::mutex> locks(n * m);
  parallel_for(
      n * m * reps,
      [&](std::size_t k) {
        std::size_t cell = k / reps;
        std::size_t s = cell / m, j = cell % m;
        int rep = static_cast<int>(k % reps);
        double x = sw.intensities[j];
        SegmentRun r = simulate_segment(sc, s, x, replication_seed(sw.seed, sc.segments[s].id, x, rep), budget);
        std::lock_guard lock(locks[cell]);
        runs[cell].merge(r);
      },
      progress);

  SweepResult res;
  res.scenario = sc.name;
  res.seed = sw.seed;
  res.replications = sw.replications;
  res.mode = sw.mode;
  res.rule = sw.reliability;
  res.budget = budget;
  res.sim = sc.sim;
  res.patience = sc.patience;
  for (const Segment& s : sc.segments) {
    res.segment_ids.push_back(s.id);
    res.segment_names.push_back(s.name);
  }
  for (const Route& r : sc.routes) res.route_names.push_back(r.name);

  std::vector<long> baseline(n, -1);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t j = 0; j < m; ++j) {
      long t = runs[s * m + j].min_travel_time();
      if (t >= 0 && (baseline[s] < 0 || t < baseline[s])) baseline[s] = t;
    }
  }
  for (std::size_t j = 0; j < m; ++j) {
    IntensityRow row;
    row.intensity = sw.intensities[j];
    for (std::size_t s = 0; s < n; ++s) {
      const SegmentRun& run = runs[s * m + j];
      row.delays.push_back(delay_stats(run, std::max(0L, baseline[s]), sc.sim, sc.patience));
      row.p.push_back(segment_reliability(row.delays.back(), sc.patience, sw.reliability));
      merge_stats(res.road, run.road);
      res.red_violations += run.red_violations;
    }
    evaluate_row(sc, sw.mode, row);
    res.rows.push_back(std::move(row));
  }
  return res;
}

const char* to_string(ReliabilityRule r) {
  return r == ReliabilityRule::q_of_mean_delay ? "q_of_mean_delay" : "mean_of_q";
}

}  // namespace roadrel
