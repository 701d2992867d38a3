#pragma once

#include <string>
#include <vector>

#include "gridfreq/engine.hpp"

namespace gridfreq {

/// One labelled curve of a frequency plot.
struct PlotSeries {
    std::string label;
    std::vector<double> t;
    std::vector<double> f;
};

/// Extract a named channel (default: the system frequency) as a plot series.
PlotSeries plot_series_from_trace(const Trace& trace, const std::string& label,
                                  const std::string& channel = "f_coi");

/// Write a standalone SVG overlaying the given frequency curves, with dashed
/// band lines at nominal ±200 mHz and ±100 mHz and a legend keyed by series
/// label. All series must share one time base (same instants); mismatched
/// time bases throw PlotError.
void write_frequency_plot_svg(const std::string& path,
                              const std::vector<PlotSeries>& series,
                              double nominal_hz = 50.0);

}  // namespace gridfreq
