#pragma once

// CSV and plain-text output. Column order is fixed; numbers use a fixed
// precision so that equal results give byte-identical files.

#include <ostream>
#include <string>

#include "roadrel/importance.hpp"
#include "roadrel/pipeline.hpp"

namespace roadrel {

/// Leading "# key: value" lines with the settings needed to rerun a sweep.
void write_metadata(std::ostream& out, const SweepResult& r);

/// intensity,segment_id,name,completed,censored,saturated,baseline_s,mean_delay_s,p50_s,p90_s,p99_s,mean_q,p
void write_delays_csv(std::ostream& out, const SweepResult& r);
/// intensity,series,reliability with series "system" or a route name.
void write_reliability_csv(std::ostream& out, const SweepResult& r);
/// intensity,segment_id,name,p,birnbaum
void write_importance_csv(std::ostream& out, const SweepResult& r);
/// Human-readable tables of the above.
void write_sweep_summary(std::ostream& out, const SweepResult& r);

/// rank,segment_id,name,birnbaum,barlow_proschan
void write_structural_csv(std::ostream& out, const Scenario& sc, const ImportanceReport& rep);
void write_structural_text(std::ostream& out, const Scenario& sc, const ImportanceReport& rep);

/// Fixed-precision number; infinities print as "inf".
std::string fmt_number(double x, int digits = 6);

}  // namespace roadrel
