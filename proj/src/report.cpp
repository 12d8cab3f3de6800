#include "roadrel/report.hpp"

#include <cmath>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace roadrel {
namespace {

/// Quotes a CSV field when it needs it.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string intensity(double x) { return fmt::format("{:.4f}", x); }

}  // namespace

std::string fmt_number(double x, int digits) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  std::string s = fmt::format("{:.{}f}", x, digits);
  if (s.find_first_not_of("-0.") == std::string::npos) s = fmt::format("{:.{}f}", 0.0, digits);
  return s;
}

void write_metadata(std::ostream& out, const SweepResult& r) {
  fmt::print(out, "# scenario: {}\n", r.scenario);
  fmt::print(out, "# seed: {}\n", r.seed);
  fmt::print(out, "# replications: {}\n", r.replications);
  fmt::print(out, "# evaluation_mode: {}\n", to_string(r.mode));
  fmt::print(out, "# reliability_from: {}\n", to_string(r.rule));
  fmt::print(out, "# steps: warmup {} measure {} drain {}\n", r.budget.warmup_steps, r.budget.measure_steps,
             r.budget.drain_steps);
  const SimParams& p = r.sim;
  fmt::print(out, "# simulation: v_max {} delta_v {} M {} R0 {} Rd {} v_s {} R_s {} l_s {} cell_m {} step_s {}\n",
             p.v_max, p.delta_v, p.M, p.R0, p.Rd, p.v_s, p.R_s, p.l_s, p.cell_m, p.step_s);
  fmt::print(out, "# satisfaction: lambda {} k {}\n", r.patience.lambda, r.patience.k);
}

void write_delays_csv(std::ostream& out, const SweepResult& r) {
  write_metadata(out, r);
  out << "intensity,segment_id,name,completed,censored,saturated,baseline_s,mean_delay_s,p50_s,p90_s,p99_s,mean_q,p\n";
  for (const IntensityRow& row : r.rows) {
    for (std::size_t s = 0; s < r.segment_ids.size(); ++s) {
      const DelayStats& d = row.delays[s];
      fmt::print(out, "{},{},{},{},{},{},{},{},{},{},{},{},{}\n", intensity(row.intensity), r.segment_ids[s],
                 csv_field(r.segment_names[s]), d.completed, d.censored, d.saturated ? 1 : 0,
                 fmt_number(static_cast<double>(d.baseline_steps) * r.sim.step_s, 1), fmt_number(d.mean_delay, 4),
                 fmt_number(d.p50, 1), fmt_number(d.p90, 1), fmt_number(d.p99, 1),
                 fmt_number(d.mean_satisfaction, 6), fmt_number(row.p[s], 6));
    }
  }
}

void write_reliability_csv(std::ostream& out, const SweepResult& r) {
  write_metadata(out, r);
  out << "intensity,series,reliability\n";
  for (const IntensityRow& row : r.rows) {
    fmt::print(out, "{},system,{}\n", intensity(row.intensity), fmt_number(row.system, 6));
    for (std::size_t k = 0; k < r.route_names.size(); ++k) {
      fmt::print(out, "{},{},{}\n", intensity(row.intensity), csv_field(r.route_names[k]),
                 fmt_number(row.routes[k], 6));
    }
  }
}

void write_importance_csv(std::ostream& out, const SweepResult& r) {
  write_metadata(out, r);
  out << "intensity,segment_id,name,p,birnbaum\n";
  for (const IntensityRow& row : r.rows) {
    for (std::size_t s = 0; s < r.segment_ids.size(); ++s) {
      fmt::print(out, "{},{},{},{},{}\n", intensity(row.intensity), r.segment_ids[s],
                 csv_field(r.segment_names[s]), fmt_number(row.p[s], 6), fmt_number(row.birnbaum[s], 6));
    }
  }
}

void write_sweep_summary(std::ostream& out, const SweepResult& r) {
  write_metadata(out, r);
  out << "\nReliability\n";
  fmt::print(out, "{:>9} {:>8}", "intensity", "system");
  for (const auto& name : r.route_names) fmt::print(out, " {:>10}", name.substr(0, 10));
  out << '\n';
  for (const IntensityRow& row : r.rows) {
    fmt::print(out, "{:>9} {:>8}", intensity(row.intensity), fmt_number(row.system, 4));
    for (double x : row.routes) fmt::print(out, " {:>10}", fmt_number(x, 4));
    out << '\n';
  }

  out << "\nMean delay [s] / p / Birnbaum\n";
  fmt::print(out, "{:>9}", "intensity");
  for (std::size_t s = 0; s < r.segment_names.size(); ++s) fmt::print(out, " {:>22}", r.segment_names[s].substr(0, 22));
  out << '\n';
  for (const IntensityRow& row : r.rows) {
    fmt::print(out, "{:>9}", intensity(row.intensity));
    for (std::size_t s = 0; s < row.p.size(); ++s) {
      fmt::print(out, " {:>22}",
                 fmt::format("{}/{}/{}", fmt_number(row.delays[s].mean_delay, 1), fmt_number(row.p[s], 3),
                             fmt_number(row.birnbaum[s], 3)));
    }
    out << '\n';
  }
  fmt::print(out, "\nvehicle_steps {} spawned {} spawn_blocked {} emergency_brakes {} gap_violations {} red_violations {}\n",
             r.road.vehicle_steps, r.road.spawned, r.road.spawn_blocked, r.road.emergency_brakes,
             r.road.min_gap_violations, r.red_violations);
}

void write_structural_csv(std::ostream& out, const Scenario& sc, const ImportanceReport& rep) {
  fmt::print(out, "# scenario: {}\n# evaluation_mode: {}\n# ranked_by: {}\n", sc.name, to_string(rep.mode),
             to_string(rep.ranked_by));
  out << "rank,segment_id,name,birnbaum,barlow_proschan\n";
  for (std::size_t k = 0; k < rep.ranking.size(); ++k) {
    const ComponentImportance& c = rep.records[rep.ranking[k].index];
    const Segment& seg = sc.segments[c.component.index];
    fmt::print(out, "{},{},{},{},{}\n", k + 1, seg.id, csv_field(seg.name), fmt_number(c.birnbaum, 10),
               fmt_number(c.barlow_proschan, 10));
  }
}

void write_structural_text(std::ostream& out, const Scenario& sc, const ImportanceReport& rep) {
  fmt::print(out, "Structural importance of {} ({} mode, ranked by {})\n", sc.name, to_string(rep.mode),
             to_string(rep.ranked_by));
  fmt::print(out, "{:>4} {:>3}  {:<16} {:>10} {:>10}\n", "rank", "id", "name", "Birnbaum", "B-P");
  for (std::size_t k = 0; k < rep.ranking.size(); ++k) {
    const ComponentImportance& c = rep.records[rep.ranking[k].index];
    const Segment& seg = sc.segments[c.component.index];
    fmt::print(out, "{:>4} {:>3}  {:<16} {:>10} {:>10}\n", k + 1, seg.id, seg.name, fmt_number(c.birnbaum, 4),
               fmt_number(c.barlow_proschan, 4));
  }
}

}  // namespace roadrel
