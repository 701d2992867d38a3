#include "gridfreq/runner.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gridfreq/errors.hpp"
#include "gridfreq/io.hpp"

namespace fs = std::filesystem;

namespace gridfreq {

namespace {

const char* study_token(StudyKind study) {
    return study == StudyKind::contingency ? "contingency" : "longterm";
}

std::string run_stem(const std::string& label, StudyKind study, uint64_t seed) {
    return label + "-" + study_token(study) + "-seed" + std::to_string(seed);
}

std::string sanitize_cell(std::string text) {
    for (char& c : text) {
        if (c == ',' || c == '\n' || c == '\r' || c == '|') c = ';';
    }
    return text;
}

Trace simulate(const ScenarioRun& run) {
    return integrate(*run.system, run.config, bind_events(*run.system, run.schedule),
                     run.seed, run.system->x0(), run.system->y0(), run.system->eta0());
}

std::vector<std::string> key_headers() { return {"scenario", "agc"}; }

std::vector<std::string> row_key_cells(const std::string& scenario_name, bool agc_on) {
    return {sanitize_cell(scenario_name), agc_on ? "with" : "without"};
}

/// Human-facing column titles for the markdown rendering; the CSV keeps the
/// machine tokens.
std::string display_header(const std::string& token) {
    if (token == "zenith_hz") return "Zenith [Hz]";
    if (token == "t_zenith_s") return "T_zenith [s]";
    if (token == "max_rocof_hz_per_s") return "RoCoF [Hz/s]";
    if (token == "t_restore_s") return "T_restore [s]";
    if (token == "security") return "Security";
    if (token == "mean_hz") return "Mean [Hz]";
    if (token == "sigma_f_hz") return "σ_f [Hz]";
    if (token == "sigma_f_minus_hz") return "σ_f− [Hz]";
    if (token == "sigma_f_plus_hz") return "σ_f+ [Hz]";
    if (token == "delta_sigma_f_hz") return "Δσ_f [Hz]";
    if (token == "min_outside_100mhz") return "Outside ±100 mHz [min]";
    if (token == "min_below_49p9hz") return "< 49.9 Hz [min]";
    if (token == "min_above_50p1hz") return "> 50.1 Hz [min]";
    return token;
}

LongTermMetrics average(const std::vector<LongTermMetrics>& samples) {
    LongTermMetrics avg;
    const double n = static_cast<double>(samples.size());
    for (const auto& m : samples) {
        avg.mean_hz += m.mean_hz / n;
        avg.sigma_f += m.sigma_f / n;
        avg.sigma_f_minus += m.sigma_f_minus / n;
        avg.sigma_f_plus += m.sigma_f_plus / n;
        avg.minutes_outside_100mhz += m.minutes_outside_100mhz / n;
        avg.minutes_below_49p9 += m.minutes_below_49p9 / n;
        avg.minutes_above_50p1 += m.minutes_above_50p1 / n;
    }
    avg.delta_sigma_f = std::abs(avg.sigma_f_minus - avg.sigma_f_plus);
    return avg;
}

void write_metrics_file(const std::string& path, const std::string& scenario_name,
                        bool agc_on, const std::vector<std::string>& metric_headers,
                        const std::vector<std::string>& cells) {
    std::vector<std::string> header = key_headers();
    header.insert(header.end(), metric_headers.begin(), metric_headers.end());
    std::vector<std::string> row = row_key_cells(scenario_name, agc_on);
    row.insert(row.end(), cells.begin(), cells.end());
    write_csv_row(path, header, row);
}

}  // namespace

RunArtifacts run_scenario(const ScenarioLibrary& library, const std::string& name_or_index,
                          const BuildOptions& options, const std::string& out_dir) {
    ScenarioRun run = library.build(name_or_index, options);
    const Trace trace = simulate(run);

    RunArtifacts artifacts;
    artifacts.study = run.study;
    artifacts.event_time = run.event_time;
    artifacts.label = run_stem(run.label, run.study, run.seed);

    std::vector<std::string> cells;
    const std::vector<std::string>* headers = nullptr;
    if (run.study == StudyKind::contingency) {
        artifacts.contingency = contingency_metrics(trace, run.event_time);
        cells = contingency_cells(artifacts.contingency);
        headers = &contingency_headers();
    } else {
        artifacts.longterm = long_term_stats(trace);
        cells = longterm_cells(artifacts.longterm);
        headers = &longterm_headers();
    }

    fs::create_directories(out_dir);
    artifacts.trace_path = (fs::path(out_dir) / (artifacts.label + "-trace.csv")).string();
    artifacts.metrics_path = (fs::path(out_dir) / (artifacts.label + "-metrics.csv")).string();
    write_trace_csv(artifacts.trace_path, trace);
    write_metrics_file(artifacts.metrics_path, run.scenario_name, run.agc_on, *headers, cells);
    return artifacts;
}

bool ReportTable::any_failed() const {
    return std::any_of(rows.begin(), rows.end(), [](const ReportRow& r) { return !r.ok; });
}

bool ReportTable::any_simulation_failure() const {
    return std::any_of(rows.begin(), rows.end(),
                       [](const ReportRow& r) { return !r.ok && !r.metric_failure; });
}

std::string ReportTable::to_csv() const {
    std::ostringstream out;
    out << "scenario,agc";
    for (const auto& h : metric_headers) out << ',' << h;
    out << '\n';
    for (const auto& row : rows) {
        out << sanitize_cell(row.scenario_name) << ',' << (row.agc_on ? "with" : "without");
        if (row.ok) {
            for (const auto& cell : row.cells) out << ',' << cell;
        } else {
            out << ",FAILED: " << sanitize_cell(row.error);
            for (size_t i = 1; i < metric_headers.size(); ++i) out << ',';
        }
        out << '\n';
    }
    return out.str();
}

std::string ReportTable::to_markdown() const {
    std::ostringstream out;
    const char* title = study == StudyKind::contingency
                            ? "Contingency results (bus-6 load loss)"
                            : "Long-term frequency quality";
    out << "# " << title << "\n";
    for (int pass = 0; pass < 2; ++pass) {
        const bool agc_on = pass == 1;
        out << "\n## " << (agc_on ? "With AGC" : "Without AGC") << "\n\n";
        out << "| Scenario |";
        for (const auto& h : metric_headers) out << ' ' << display_header(h) << " |";
        out << "\n|---|";
        for (size_t i = 0; i < metric_headers.size(); ++i) out << "---|";
        out << '\n';
        for (const auto& row : rows) {
            if (row.agc_on != agc_on) continue;
            out << "| " << sanitize_cell(row.scenario_name) << " |";
            if (row.ok) {
                for (const auto& cell : row.cells) out << ' ' << cell << " |";
            } else {
                out << " FAILED: " << sanitize_cell(row.error) << " |";
                for (size_t i = 1; i < metric_headers.size(); ++i) out << " — |";
            }
            out << '\n';
        }
    }
    return out.str();
}

ReportTable sweep(const ScenarioLibrary& library, const SweepOptions& options,
                  const std::string& out_dir) {
    std::vector<uint64_t> seeds = options.seeds;
    if (seeds.empty()) seeds.push_back(0);

    ReportTable table;
    table.study = options.study;
    table.metric_headers = options.study == StudyKind::contingency ? contingency_headers()
                                                                   : longterm_headers();

    const fs::path rows_dir = fs::path(out_dir) / "rows";
    fs::create_directories(rows_dir);

    for (int pass = 0; pass < 2; ++pass) {
        const bool agc_on = pass == 1;
        for (const ScenarioConfig& config : library.scenarios()) {
            ReportRow row;
            row.scenario_index = config.index;
            row.scenario_name = config.name;
            row.agc_on = agc_on;

            BuildOptions build;
            build.agc_on = agc_on;
            build.study = options.study;
            build.horizon_s = options.horizon_s;
            build.dt_s = options.dt_s;
            build.full_24h = options.full_24h;
            build.overrides = options.overrides;

            try {
                std::vector<std::string> cells;
                if (options.study == StudyKind::contingency) {
                    // Noise and ramps are off here, so every seed would give
                    // the identical trace; one replicate suffices.
                    build.seed = seeds.front();
                    const ScenarioRun run = library.build(config, build);
                    const Trace trace = simulate(run);
                    cells = contingency_cells(contingency_metrics(trace, run.event_time));
                } else {
                    std::vector<LongTermMetrics> samples;
                    samples.reserve(seeds.size());
                    for (uint64_t seed : seeds) {
                        build.seed = seed;
                        const ScenarioRun run = library.build(config, build);
                        samples.push_back(long_term_stats(simulate(run)));
                    }
                    cells = longterm_cells(average(samples));
                }
                row.cells = std::move(cells);
                row.ok = true;

                const std::string stem = scenario_label(config, agc_on);
                const fs::path metrics_path =
                    rows_dir / (stem + "-" + study_token(options.study) + "-metrics.csv");
                write_metrics_file(metrics_path.string(), config.name, agc_on,
                                   table.metric_headers, row.cells);
            } catch (const MetricError& e) {
                row.metric_failure = true;
                row.error = e.what();
            } catch (const std::exception& e) {
                row.error = e.what();
            }
            table.rows.push_back(std::move(row));
        }
    }

    std::ofstream csv(fs::path(out_dir) / "report.csv");
    if (!csv) throw ConfigError("cannot write report.csv under " + out_dir);
    csv << table.to_csv();
    std::ofstream md(fs::path(out_dir) / "report.md");
    if (!md) throw ConfigError("cannot write report.md under " + out_dir);
    md << table.to_markdown();
    return table;
}

std::string default_out_dir() {
    if (const char* env = std::getenv("GRIDFREQ_OUT"); env && *env) return env;
    return "out";
}

}  // namespace gridfreq
