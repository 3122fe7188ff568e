#pragma once
// Run reports: re-verify the monitor monotonicity claims from saved trace
// files, join them with destabilizer certificates by polytope name, and
// render the per-polytope summary table.

#include "torific/destabilizer.hpp"
#include "torific/flow.hpp"

namespace torific {

// Certificates persist as JSON with enough context (volume, predicted limit
// norm) to audit them without reloading the polytope.
std::string certificate_to_json(const DestabilizerCertificate& c, const LatticePolytope& P);

struct CertificateDoc {
    DestabilizerCertificate cert;
    double volume = 0.0;
    double limit_norm = 0.0;  // ||d + e||_{L2} / sqrt(V)
};
CertificateDoc certificate_from_json(const std::string& text);

struct MonitorCheck {
    std::string name;
    bool pass = true;
    double worst = 0.0;
};

struct TraceVerdict {
    std::string polytope;
    std::size_t rows = 0;
    bool pass = true;
    std::vector<MonitorCheck> checks;
    double plateau_r = 0.0;   // R of the last row
    double final_dist = 0.0;  // dist_to_limit of the last row
};

TraceVerdict verify_trace_rows(const std::vector<TraceRow>& rows,
                               const std::vector<std::pair<std::string, std::string>>& meta);

struct ReportEntry {
    std::string polytope;
    bool have_trace = false;
    bool have_cert = false;
    TraceVerdict trace;
    bool certified = false;
    bool semistable = false;
    AffineFn e;
    PLConvexFn d;
    double predicted_norm = 0.0;  // ||d + e||_{L2} / sqrt(V)
    double measured_rate = 0.0;   // sqrt(R) at the last trace row
    double difference = 0.0;      // measured - predicted (both present only)
    bool cert_consistent = true;  // stored limit norm matches an exact recompute
};

struct Report {
    std::vector<ReportEntry> entries;
    bool all_pass = true;
};

Report build_report(const std::vector<std::string>& trace_paths,
                    const std::vector<std::string>& cert_paths);
std::string format_report(const Report& r);

}  // namespace torific
