#pragma once

#include <string>
#include <vector>

#include "gridfreq/engine.hpp"

namespace gridfreq {

/// Write the trace as CSV: a header row naming the channels ("time" first),
/// then one row per recorded instant. Time is printed with 6 decimal places,
/// channel values with 12 significant digits. Throws ConfigError when the
/// file cannot be written.
void write_trace_csv(const std::string& path, const Trace& trace);

/// Read a trace written by write_trace_csv (any CSV whose first column is
/// "time" works). Throws ConfigError on missing files, malformed rows, or
/// inconsistent column counts.
Trace read_trace_csv(const std::string& path);

/// Write a two-line CSV table: comma-joined header, then comma-joined cells.
void write_csv_row(const std::string& path, const std::vector<std::string>& header,
                   const std::vector<std::string>& cells);

}  // namespace gridfreq
