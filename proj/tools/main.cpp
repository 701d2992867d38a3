#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gridfreq/errors.hpp"
#include "gridfreq/io.hpp"
#include "gridfreq/metrics.hpp"
#include "gridfreq/plot.hpp"
#include "gridfreq/runner.hpp"
#include "gridfreq/scenario.hpp"

namespace fs = std::filesystem;
using namespace gridfreq;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitSimulation = 2;
constexpr int kExitMetric = 3;

StudyKind parse_study(const std::string& study) {
    return study == "longterm" ? StudyKind::longterm : StudyKind::contingency;
}

void print_row(const std::vector<std::string>& header, const std::vector<std::string>& cells) {
    for (size_t i = 0; i < header.size(); ++i) std::cout << (i ? "," : "") << header[i];
    std::cout << '\n';
    for (size_t i = 0; i < cells.size(); ++i) std::cout << (i ? "," : "") << cells[i];
    std::cout << '\n';
}

std::string series_label(const std::string& trace_path) {
    std::string stem = fs::path(trace_path).stem().string();
    const std::string suffix = "-trace";
    if (stem.size() > suffix.size() && stem.compare(stem.size() - suffix.size(), suffix.size(), suffix) == 0) {
        stem.resize(stem.size() - suffix.size());
    }
    return stem;
}

struct CommonArgs {
    std::string data_dir = ScenarioLibrary::default_data_dir();
    std::string out_dir = default_out_dir();
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--data", args.data_dir, "Data directory with the grid and scenario fixtures")
        ->capture_default_str();
    cmd->add_option("--out", args.out_dir, "Output directory (default: $GRIDFREQ_OUT or ./out)")
        ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"gridfreq: stochastic frequency-quality studies on a 9-bus test grid"};
    app.require_subcommand(1);

    // ---- run ----------------------------------------------------------
    CommonArgs run_common;
    std::string run_scenario_name;
    std::string run_agc = "off";
    std::string run_study = "contingency";
    uint64_t run_seed = 0;
    std::optional<double> run_horizon, run_dt;
    bool run_full_24h = false;
    std::vector<std::string> run_sets;
    CLI::App* run_cmd = app.add_subcommand("run", "Run one scenario and write its trace and metrics");
    run_cmd->add_option("--scenario", run_scenario_name, "Catalog entry, by name or index (e.g. \"9\" or \"9 - GFM Droop\")")
        ->required();
    run_cmd->add_option("--agc", run_agc, "Secondary frequency control: on|off")
        ->check(CLI::IsMember({"on", "off"}))
        ->capture_default_str();
    run_cmd->add_option("--study", run_study, "Study kind: contingency|longterm")
        ->check(CLI::IsMember({"contingency", "longterm"}))
        ->capture_default_str();
    run_cmd->add_option("--seed", run_seed, "Noise seed")->capture_default_str();
    run_cmd->add_option("--horizon", run_horizon, "Horizon override, s (contingency ≤ 600, longterm ≥ 600)");
    run_cmd->add_option("--dt", run_dt, "Step size override, s");
    run_cmd->add_flag("--full-24h", run_full_24h, "Long-term study over the full 24 h profile");
    run_cmd->add_option("--set", run_sets, "Parameter override section.field=value (repeatable)");
    add_common(run_cmd, run_common);

    // ---- sweep --------------------------------------------------------
    CommonArgs sweep_common;
    std::string sweep_study = "contingency";
    std::vector<uint64_t> sweep_seeds;
    std::optional<double> sweep_horizon, sweep_dt;
    bool sweep_full_24h = false;
    std::vector<std::string> sweep_sets;
    CLI::App* sweep_cmd =
        app.add_subcommand("sweep", "Run the whole catalog, without then with AGC, and write a report table");
    sweep_cmd->add_option("--study", sweep_study, "Study kind: contingency|longterm")
        ->check(CLI::IsMember({"contingency", "longterm"}))
        ->capture_default_str();
    sweep_cmd->add_option("--seed", sweep_seeds, "Noise seeds (repeatable; long-term rows average over them)");
    sweep_cmd->add_option("--horizon", sweep_horizon, "Horizon override, s");
    sweep_cmd->add_option("--dt", sweep_dt, "Step size override, s");
    sweep_cmd->add_flag("--full-24h", sweep_full_24h, "Long-term study over the full 24 h profile");
    sweep_cmd->add_option("--set", sweep_sets, "Parameter override section.field=value (repeatable)");
    add_common(sweep_cmd, sweep_common);

    // ---- metrics ------------------------------------------------------
    std::string metrics_trace;
    std::string metrics_study = "contingency";
    double metrics_event_time = 1.0;
    std::string metrics_channel = "f_coi";
    std::string metrics_out;
    CLI::App* metrics_cmd = app.add_subcommand("metrics", "Recompute the metric row from a stored trace");
    metrics_cmd->add_option("--trace", metrics_trace, "Trace CSV written by run")->required();
    metrics_cmd->add_option("--study", metrics_study, "Study kind: contingency|longterm")
        ->check(CLI::IsMember({"contingency", "longterm"}))
        ->capture_default_str();
    metrics_cmd->add_option("--event-time", metrics_event_time, "Disturbance instant for contingency metrics, s")
        ->capture_default_str();
    metrics_cmd->add_option("--channel", metrics_channel, "Frequency channel to evaluate")
        ->capture_default_str();
    metrics_cmd->add_option("--out", metrics_out, "Also write the row as a CSV file");

    // ---- plot ---------------------------------------------------------
    std::vector<std::string> plot_traces;
    std::string plot_out = "plot.svg";
    std::string plot_channel = "f_coi";
    CLI::App* plot_cmd = app.add_subcommand("plot", "Overlay stored frequency traces as an SVG");
    plot_cmd->add_option("traces", plot_traces, "Trace CSV files (legend uses the file stems)")
        ->required()
        ->expected(-1);
    plot_cmd->add_option("--out", plot_out, "SVG output path")->capture_default_str();
    plot_cmd->add_option("--channel", plot_channel, "Channel to plot")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (run_cmd->parsed()) {
            ScenarioLibrary library(run_common.data_dir);
            BuildOptions options;
            options.agc_on = run_agc == "on";
            options.study = parse_study(run_study);
            options.seed = run_seed;
            options.horizon_s = run_horizon;
            options.dt_s = run_dt;
            options.full_24h = run_full_24h;
            options.overrides = run_sets;
            const RunArtifacts artifacts =
                run_scenario(library, run_scenario_name, options, run_common.out_dir);
            std::cout << "wrote " << artifacts.trace_path << '\n'
                      << "wrote " << artifacts.metrics_path << '\n';
            if (artifacts.study == StudyKind::contingency) {
                print_row(contingency_headers(), contingency_cells(artifacts.contingency));
            } else {
                print_row(longterm_headers(), longterm_cells(artifacts.longterm));
            }
            return kExitOk;
        }

        if (sweep_cmd->parsed()) {
            ScenarioLibrary library(sweep_common.data_dir);
            SweepOptions options;
            options.study = parse_study(sweep_study);
            options.seeds = sweep_seeds;
            options.horizon_s = sweep_horizon;
            options.dt_s = sweep_dt;
            options.full_24h = sweep_full_24h;
            options.overrides = sweep_sets;
            const ReportTable table = sweep(library, options, sweep_common.out_dir);
            std::cout << table.to_markdown();
            std::cout << "\nreport: " << (fs::path(sweep_common.out_dir) / "report.csv").string()
                      << ", " << (fs::path(sweep_common.out_dir) / "report.md").string() << '\n';
            if (table.any_simulation_failure()) return kExitSimulation;
            if (table.any_failed()) return kExitMetric;
            return kExitOk;
        }

        if (metrics_cmd->parsed()) {
            const Trace trace = read_trace_csv(metrics_trace);
            const int channel = trace.channel_index(metrics_channel);
            if (channel < 0) {
                throw MetricError("trace has no channel '" + metrics_channel + "'");
            }
            std::vector<std::string> header, cells;
            if (parse_study(metrics_study) == StudyKind::contingency) {
                header = contingency_headers();
                cells = contingency_cells(
                    contingency_metrics(trace, metrics_event_time, metrics_channel));
            } else {
                header = longterm_headers();
                cells = longterm_cells(long_term_stats(trace, metrics_channel));
            }
            print_row(header, cells);
            if (!metrics_out.empty()) write_csv_row(metrics_out, header, cells);
            return kExitOk;
        }

        if (plot_cmd->parsed()) {
            std::vector<PlotSeries> series;
            series.reserve(plot_traces.size());
            for (const std::string& path : plot_traces) {
                series.push_back(
                    plot_series_from_trace(read_trace_csv(path), series_label(path), plot_channel));
            }
            write_frequency_plot_svg(plot_out, series);
            std::cout << "wrote " << plot_out << '\n';
            return kExitOk;
        }
    } catch (const MetricError& e) {
        std::cerr << "metric error: " << e.what() << '\n';
        return kExitMetric;
    } catch (const SimulationError& e) {
        std::cerr << "simulation error: " << e.what() << '\n';
        return kExitSimulation;
    } catch (const InitializationError& e) {
        std::cerr << "initialization error: " << e.what() << '\n';
        return kExitSimulation;
    } catch (const PlotError& e) {
        std::cerr << "plot error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitSimulation;
    }
    return kExitUsage;
}
