#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gridfreq/metrics.hpp"
#include "gridfreq/scenario.hpp"

namespace gridfreq {

/// What one `run` invocation produced and where it was written.
struct RunArtifacts {
    std::string label;  // file stem: scenario slug + agc + study + seed
    std::string trace_path;
    std::string metrics_path;
    StudyKind study = StudyKind::contingency;
    double event_time = 0.0;
    ContingencyMetrics contingency;  // filled when study == contingency
    LongTermMetrics longterm;        // filled when study == longterm
};

/// Run one configuration end to end: integrate, compute the study's metric
/// row on the system frequency, and persist trace + metrics CSVs in out_dir.
RunArtifacts run_scenario(const ScenarioLibrary& library, const std::string& name_or_index,
                          const BuildOptions& options, const std::string& out_dir);

/// One report row; failed runs keep their key and carry the error text.
struct ReportRow {
    int scenario_index = 0;
    std::string scenario_name;
    bool agc_on = false;
    bool ok = false;
    bool metric_failure = false;  // the run integrated but its metrics failed
    std::string error;
    std::vector<std::string> cells;  // metric cells, report column order
};

/// Sweep output: rows grouped "Without AGC" first then "With AGC", each
/// group in catalog order; renderable as CSV or markdown.
struct ReportTable {
    StudyKind study = StudyKind::contingency;
    std::vector<std::string> metric_headers;
    std::vector<ReportRow> rows;

    bool any_failed() const;
    bool any_simulation_failure() const;
    std::string to_csv() const;
    std::string to_markdown() const;
};

struct SweepOptions {
    StudyKind study = StudyKind::contingency;
    std::vector<uint64_t> seeds;  // empty → single replicate with seed 0
    std::optional<double> horizon_s;
    std::optional<double> dt_s;
    bool full_24h = false;
    std::vector<std::string> overrides;  // "section.field=value"
};

/// Run all 22 configurations (11 scenarios × AGC off/on). Long-term rows
/// average the metrics over the seed list; contingency runs are noiseless
/// and use the first seed only. Per-row metrics files are kept under
/// out_dir/rows, the table under out_dir/report.csv and report.md. A failed
/// row is marked and the sweep continues.
ReportTable sweep(const ScenarioLibrary& library, const SweepOptions& options,
                  const std::string& out_dir);

/// GRIDFREQ_OUT if set, else "out".
std::string default_out_dir();

}  // namespace gridfreq
