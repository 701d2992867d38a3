#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gridfreq/errors.hpp"
#include "gridfreq/io.hpp"
#include "gridfreq/plot.hpp"
#include "gridfreq/runner.hpp"

using namespace gridfreq;
namespace fs = std::filesystem;

namespace {

/// Fresh scratch directory per test case; wiped on entry so reruns start clean.
fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "gridfreq-tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

size_t count_occurrences(const std::string& haystack, const std::string& needle) {
    size_t count = 0;
    for (size_t pos = haystack.find(needle); pos != std::string::npos;
         pos = haystack.find(needle, pos + needle.size()))
        ++count;
    return count;
}

size_t count_lines(const std::string& text) {
    return count_occurrences(text, "\n");
}

Trace make_trace() {
    Trace trace;
    trace.names = {"f_coi", "p_dev"};
    for (int i = 0; i <= 200; ++i) {
        const double t = 0.05 * i;
        trace.t.push_back(t);
        trace.data.resize(2);
    }
    trace.data[0].resize(trace.t.size());
    trace.data[1].resize(trace.t.size());
    for (size_t i = 0; i < trace.t.size(); ++i) {
        trace.data[0][i] = 50.0 + 0.3 * std::sin(0.11 * trace.t[i]) + 1e-7 * (i % 3);
        trace.data[1][i] = -0.716412345678 * std::cos(0.05 * trace.t[i]);
    }
    return trace;
}

const ScenarioLibrary& library() {
    static ScenarioLibrary lib;
    return lib;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("trace csv round-trips times and values") {
    const fs::path dir = scratch("roundtrip");
    const Trace trace = make_trace();
    const std::string path = (dir / "trace.csv").string();
    write_trace_csv(path, trace);

    const Trace back = read_trace_csv(path);
    REQUIRE(back.names == trace.names);
    REQUIRE(back.rows() == trace.rows());
    for (size_t i = 0; i < trace.rows(); ++i) {
        CHECK(std::abs(back.t[i] - trace.t[i]) <= 5e-7);  // six printed decimals
        for (size_t c = 0; c < trace.data.size(); ++c) {
            const double a = trace.data[c][i], b = back.data[c][i];
            CHECK(std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(a)));
        }
    }
}

TEST_CASE("trace csv reader tolerates CRLF line endings") {
    const fs::path dir = scratch("crlf");
    spit(dir / "t.csv", "time,f_coi\r\n0.0,50.0\r\n1.0,50.1\r\n");
    const Trace back = read_trace_csv((dir / "t.csv").string());
    REQUIRE(back.rows() == 2);
    CHECK(back.channel("f_coi")[1] == doctest::Approx(50.1));
}

TEST_CASE("trace csv reader rejects malformed inputs") {
    const fs::path dir = scratch("badcsv");

    CHECK_THROWS_AS(read_trace_csv((dir / "missing.csv").string()), ConfigError);

    spit(dir / "empty.csv", "");
    CHECK_THROWS_AS(read_trace_csv((dir / "empty.csv").string()), ConfigError);

    spit(dir / "header.csv", "t,f_coi\n0.0,50.0\n");
    CHECK_THROWS_AS(read_trace_csv((dir / "header.csv").string()), ConfigError);

    spit(dir / "nochan.csv", "time\n0.0\n");
    CHECK_THROWS_AS(read_trace_csv((dir / "nochan.csv").string()), ConfigError);

    spit(dir / "columns.csv", "time,f_coi\n0.0,50.0,1.0\n");
    CHECK_THROWS_AS(read_trace_csv((dir / "columns.csv").string()), ConfigError);

    spit(dir / "number.csv", "time,f_coi\n0.0,50.0\n0.1,fifty\n");
    try {
        read_trace_csv((dir / "number.csv").string());
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find(":3:") != std::string::npos);  // the offending line
        CHECK(msg.find("fifty") != std::string::npos);
    }
}

TEST_CASE("csv row writer validates its shape") {
    const fs::path dir = scratch("csvrow");
    const std::string path = (dir / "row.csv").string();
    CHECK_THROWS_AS(write_csv_row(path, {"a", "b"}, {"1"}), ConfigError);
    write_csv_row(path, {"a", "b"}, {"1", "2"});
    CHECK(slurp(path) == "a,b\n1,2\n");
}

TEST_CASE("plot series extraction checks the channel name") {
    const Trace trace = make_trace();
    const PlotSeries s = plot_series_from_trace(trace, "demo");
    CHECK(s.label == "demo");
    CHECK(s.t.size() == trace.rows());
    CHECK(s.f == trace.channel("f_coi"));
    CHECK_THROWS_AS(plot_series_from_trace(trace, "demo", "nope"), PlotError);
}

TEST_CASE("the frequency plot renders one curve per series with band lines") {
    const fs::path dir = scratch("plot");
    const Trace trace = make_trace();
    std::vector<PlotSeries> series{plot_series_from_trace(trace, "first"),
                                   plot_series_from_trace(trace, "second & friends")};
    for (double& v : series[1].f) v += 0.05;

    const std::string path = (dir / "plot.svg").string();
    write_frequency_plot_svg(path, series);
    const std::string svg = slurp(path);
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(count_occurrences(svg, "<polyline") == 2);
    CHECK(svg.find("+200 mHz") != std::string::npos);
    CHECK(svg.find("-100 mHz") != std::string::npos);
    CHECK(svg.find("50 Hz") != std::string::npos);
    CHECK(svg.find("first") != std::string::npos);
    CHECK(svg.find("second &amp; friends") != std::string::npos);  // xml-escaped
}

TEST_CASE("the frequency plot refuses inconsistent series") {
    CHECK_THROWS_AS(write_frequency_plot_svg("/tmp/unused.svg", {}), PlotError);

    const Trace trace = make_trace();
    std::vector<PlotSeries> series{plot_series_from_trace(trace, "a"),
                                   plot_series_from_trace(trace, "b")};
    series[1].t.pop_back();
    series[1].f.pop_back();
    CHECK_THROWS_AS(write_frequency_plot_svg("/tmp/unused.svg", series), PlotError);

    series[1] = plot_series_from_trace(trace, "b");
    series[1].t[3] += 1e-3;  // same length, shifted instant
    CHECK_THROWS_AS(write_frequency_plot_svg("/tmp/unused.svg", series), PlotError);
}

TEST_CASE("run_scenario persists a trace and a metrics row") {
    const fs::path dir = scratch("run");
    BuildOptions options;
    options.agc_on = true;
    const RunArtifacts art = run_scenario(library(), "9", options, dir.string());

    CHECK(art.label == "09-gfm-droop-with-agc-contingency-seed0");
    REQUIRE(fs::exists(art.trace_path));
    REQUIRE(fs::exists(art.metrics_path));

    const Trace trace = read_trace_csv(art.trace_path);
    CHECK(trace.rows() == 12001);  // 120 s at 10 ms, every step recorded
    CHECK(trace.channel_index("f_coi") >= 0);

    const std::string metrics = slurp(art.metrics_path);
    CHECK(count_lines(metrics) == 2);
    CHECK(metrics.rfind("scenario,agc,zenith_hz,t_zenith_s,max_rocof_hz_per_s,"
                        "t_restore_s,security\n9 - GFM Droop,with,", 0) == 0);
    CHECK(art.contingency.zenith_hz > 50.0);
    CHECK(art.contingency.zenith_hz < 51.0);

    // Same configuration, fresh directory: the artifacts must be identical bytes.
    const fs::path dir2 = scratch("run-repeat");
    const RunArtifacts again = run_scenario(library(), "9", options, dir2.string());
    CHECK(slurp(art.trace_path) == slurp(again.trace_path));
    CHECK(slurp(art.metrics_path) == slurp(again.metrics_path));
}

TEST_CASE("a sweep with a broken override fails every row but keeps going") {
    const fs::path dir = scratch("sweep-broken");
    SweepOptions options;
    options.overrides = {"bogus.key=1"};
    const ReportTable table = sweep(library(), options, dir.string());

    REQUIRE(table.rows.size() == 22);
    CHECK(table.any_failed());
    CHECK(table.any_simulation_failure());
    for (size_t i = 0; i < table.rows.size(); ++i) {
        const ReportRow& row = table.rows[i];
        CHECK(!row.ok);
        CHECK(!row.metric_failure);
        CHECK(row.error.find("bogus.key") != std::string::npos);
        CHECK(row.agc_on == (i >= 11));
        CHECK(row.scenario_index == static_cast<int>(i % 11) + 1);
    }
    const std::string csv = slurp(dir / "report.csv");
    CHECK(count_lines(csv) == 23);
    CHECK(count_occurrences(csv, "FAILED:") == 22);
}

TEST_CASE("a full contingency sweep produces a healthy report") {
    const fs::path dir = scratch("sweep-real");
    SweepOptions options;
    const ReportTable table = sweep(library(), options, dir.string());

    REQUIRE(table.rows.size() == 22);
    CHECK(!table.any_failed());
    for (const ReportRow& row : table.rows) {
        CHECK(row.ok);
        REQUIRE(row.cells.size() == 5);
        CHECK(row.cells[4] == (row.cells[3] == "No rest." || std::stod(row.cells[0]) >= 51.0 ||
                                       std::stod(row.cells[2]) >= 1.0
                                   ? "Insecure"
                                   : "Secure"));
    }

    const std::string csv = slurp(dir / "report.csv");
    CHECK(csv.rfind("scenario,agc,zenith_hz,t_zenith_s,max_rocof_hz_per_s,"
                    "t_restore_s,security\n", 0) == 0);
    CHECK(count_lines(csv) == 23);
    CHECK(csv.find("FAILED") == std::string::npos);

    const std::string md = slurp(dir / "report.md");
    CHECK(md.find("## Without AGC") != std::string::npos);
    CHECK(md.find("## With AGC") != std::string::npos);
    CHECK(md.find("Zenith [Hz]") != std::string::npos);

    size_t row_files = 0;
    for (const auto& entry : fs::directory_iterator(dir / "rows")) {
        CHECK(entry.path().filename().string().find("-contingency-metrics.csv") !=
              std::string::npos);
        ++row_files;
    }
    CHECK(row_files == 22);
}

TEST_CASE("the default output directory honours GRIDFREQ_OUT") {
    ::unsetenv("GRIDFREQ_OUT");
    CHECK(default_out_dir() == "out");
    ::setenv("GRIDFREQ_OUT", "/tmp/somewhere-else", 1);
    CHECK(default_out_dir() == "/tmp/somewhere-else");
    ::unsetenv("GRIDFREQ_OUT");
}

}  // TEST_SUITE
