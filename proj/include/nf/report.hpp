#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "nf/sync.hpp"
#include "nf/system_solver.hpp"

#include <json.hpp>

namespace nf {

nlohmann::json report_to_json(const SolveReport& report);
nlohmann::json verdict_to_json(const SyncVerdict& verdict);

/// CSV of continuation steps: t, per-component norms, mins, scalings, residual.
void write_trace_csv(const std::vector<TraceRow>& trace, std::ostream& out);

/// CSV of the growth experiment: a,norm_w,int_wq1,int_wp1,residual.
void write_unbounded_csv(const UnboundedResult& result, std::ostream& out);

/// CSV of a coupling sweep: multiplier, norms, overlaps, residual, flags.
void write_sweep_csv(const std::vector<SweepPoint>& points, std::ostream& out);

/// UTC wall-clock stamp; excluded from determinism comparisons.
std::string timestamp_utc();

/// Full-precision decimal form of a double (17 significant digits).
std::string full_precision(double v);

} // namespace nf
