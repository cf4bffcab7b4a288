#include "nf/report.hpp"

#include <cstdio>
#include <ctime>
#include <ostream>

namespace nf {

std::string full_precision(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string timestamp_utc() {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

nlohmann::json report_to_json(const SolveReport& report) {
    nlohmann::json j;
    j["t"] = report.t;
    j["residual_norms"] = report.residual_norms;
    j["nehari_residuals"] = report.nehari_residuals;
    j["s_of_normalized"] = report.s_of_normalized;
    j["norms_h1"] = report.norms_h1;
    j["min_values"] = report.min_values;
    j["max_values"] = report.max_values;
    j["overlaps"] = report.overlaps;
    j["energy_j"] = report.energy_j;
    j["psi0"] = report.psi0;
    j["relative_residual"] = report.relative_residual;
    j["residual_ok"] = report.residual_ok;
    j["nehari_ok"] = report.nehari_ok;
    j["fully_nontrivial"] = report.fully_nontrivial;
    j["strictly_positive"] = report.strictly_positive;
    j["converged"] = report.converged;
    j["iterations"] = report.iterations;
    return j;
}

nlohmann::json verdict_to_json(const SyncVerdict& verdict) {
    nlohmann::json j;
    j["holds"] = verdict.holds;
    j["q"] = verdict.q;
    j["a"] = verdict.a;
    j["rho"] = verdict.rho;
    j["failure_reason"] = verdict.failure_reason;
    return j;
}

void write_trace_csv(const std::vector<TraceRow>& trace, std::ostream& out) {
    if (trace.empty()) return;
    const std::size_t ell = trace.front().norms.size();
    out << "t";
    for (std::size_t i = 1; i <= ell; ++i) out << ",norm_u" << i;
    for (std::size_t i = 1; i <= ell; ++i) out << ",min_u" << i;
    for (std::size_t i = 1; i <= ell; ++i) out << ",s_u" << i;
    out << ",residual\n";
    for (const TraceRow& row : trace) {
        out << full_precision(row.t);
        for (double v : row.norms) out << ',' << full_precision(v);
        for (double v : row.mins) out << ',' << full_precision(v);
        for (double v : row.s) out << ',' << full_precision(v);
        out << ',' << full_precision(row.residual) << '\n';
    }
}

void write_unbounded_csv(const UnboundedResult& result, std::ostream& out) {
    out << "a,norm_w,int_wq1,int_wp1,residual\n";
    for (const UnboundedRow& row : result.rows) {
        if (row.converged) {
            out << full_precision(row.a) << ',' << full_precision(row.norm_w) << ','
                << full_precision(row.int_wq1) << ',' << full_precision(row.int_wp1) << ','
                << full_precision(row.residual) << '\n';
        } else {
            out << full_precision(row.a) << ",failed,failed,failed,failed\n";
        }
    }
}

void write_sweep_csv(const std::vector<SweepPoint>& points, std::ostream& out) {
    if (points.empty()) return;
    std::size_t ell = 0;
    for (const SweepPoint& pt : points)
        ell = std::max(ell, pt.report.norms_h1.size());
    out << "kappa";
    for (std::size_t i = 1; i <= ell; ++i) out << ",norm_u" << i;
    for (std::size_t i = 0; i < ell; ++i)
        for (std::size_t j = i + 1; j < ell; ++j) out << ",overlap_" << i + 1 << j + 1;
    out << ",residual,converged\n";
    for (const SweepPoint& pt : points) {
        out << full_precision(pt.multiplier);
        if (pt.report.norms_h1.size() == ell) {
            for (double v : pt.report.norms_h1) out << ',' << full_precision(v);
            for (double v : pt.report.overlaps) out << ',' << full_precision(v);
            out << ',' << full_precision(pt.report.relative_residual);
        } else {
            for (std::size_t i = 0; i < ell + ell * (ell - 1) / 2 + 1; ++i) out << ",failed";
        }
        out << ',' << (pt.converged ? 1 : 0) << '\n';
    }
}

} // namespace nf
