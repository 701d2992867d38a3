#include "gridfreq/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "gridfreq/errors.hpp"

namespace gridfreq {

namespace {

constexpr double kWidth = 960.0;
constexpr double kHeight = 540.0;
constexpr double kLeft = 70.0;
constexpr double kRight = kWidth - 190.0;  // room for the legend
constexpr double kTop = 30.0;
constexpr double kBottom = kHeight - 50.0;
constexpr int kMaxBuckets = 1400;  // envelope buckets per curve

const char* kPalette[] = {
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
    "#e377c2", "#17becf", "#bcbd22", "#7f7f7f", "#000000",
};
constexpr int kPaletteSize = static_cast<int>(sizeof(kPalette) / sizeof(kPalette[0]));

std::string fmt(double v, const char* spec = "%.2f") {
    char buf[48];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

/// A visually round tick step covering roughly `target` intervals of `span`.
double nice_step(double span, int target) {
    const double raw = span / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double norm = raw / mag;
    const double step = norm < 1.5 ? 1.0 : norm < 3.5 ? 2.0 : norm < 7.5 ? 5.0 : 10.0;
    return step * mag;
}

std::string escape_xml(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

/// Indices tracing the min/max envelope of f with at most ~2 points per
/// bucket, preserving chronological order; exact for short series.
std::vector<size_t> envelope_indices(const std::vector<double>& f) {
    const size_t n = f.size();
    std::vector<size_t> keep;
    if (n <= static_cast<size_t>(2 * kMaxBuckets)) {
        keep.resize(n);
        for (size_t i = 0; i < n; ++i) keep[i] = i;
        return keep;
    }
    keep.reserve(2 * kMaxBuckets + 2);
    keep.push_back(0);
    for (int b = 0; b < kMaxBuckets; ++b) {
        const size_t lo = 1 + (n - 2) * static_cast<size_t>(b) / kMaxBuckets;
        const size_t hi = 1 + (n - 2) * static_cast<size_t>(b + 1) / kMaxBuckets;
        if (hi <= lo) continue;
        size_t imin = lo, imax = lo;
        for (size_t i = lo + 1; i < hi; ++i) {
            if (f[i] < f[imin]) imin = i;
            if (f[i] > f[imax]) imax = i;
        }
        if (imin == imax) {
            keep.push_back(imin);
        } else {
            keep.push_back(std::min(imin, imax));
            keep.push_back(std::max(imin, imax));
        }
    }
    keep.push_back(n - 1);
    return keep;
}

}  // namespace

PlotSeries plot_series_from_trace(const Trace& trace, const std::string& label,
                                  const std::string& channel) {
    const int idx = trace.channel_index(channel);
    if (idx < 0) throw PlotError("trace '" + label + "' has no channel '" + channel + "'");
    return PlotSeries{label, trace.t, trace.data[static_cast<size_t>(idx)]};
}

void write_frequency_plot_svg(const std::string& path,
                              const std::vector<PlotSeries>& series,
                              double nominal_hz) {
    if (series.empty()) throw PlotError("nothing to plot: no series given");
    for (const auto& s : series) {
        if (s.t.size() < 2) throw PlotError("series '" + s.label + "' has fewer than 2 samples");
        if (s.t.size() != s.f.size()) {
            throw PlotError("series '" + s.label + "' has mismatched time/value lengths");
        }
    }
    const auto& base = series.front().t;
    for (const auto& s : series) {
        if (s.t.size() != base.size()) {
            throw PlotError("traces do not share a time base: '" + series.front().label +
                            "' has " + std::to_string(base.size()) + " samples, '" + s.label +
                            "' has " + std::to_string(s.t.size()));
        }
        for (size_t i = 0; i < base.size(); ++i) {
            if (std::abs(s.t[i] - base[i]) > 1e-9) {
                throw PlotError("traces do not share a time base: sample " + std::to_string(i) +
                                " is t=" + fmt(base[i], "%.6f") + " in '" + series.front().label +
                                "' but t=" + fmt(s.t[i], "%.6f") + " in '" + s.label + "'");
            }
        }
    }

    const double t0 = base.front();
    const double t1 = base.back();
    if (!(t1 > t0)) throw PlotError("time base is not increasing");

    double fmin = nominal_hz - 0.22;
    double fmax = nominal_hz + 0.22;
    for (const auto& s : series) {
        for (double v : s.f) {
            fmin = std::min(fmin, v);
            fmax = std::max(fmax, v);
        }
    }
    const double pad = 0.06 * (fmax - fmin);
    fmin -= pad;
    fmax += pad;

    const auto xpix = [&](double t) { return kLeft + (t - t0) / (t1 - t0) * (kRight - kLeft); };
    const auto ypix = [&](double f) { return kBottom - (f - fmin) / (fmax - fmin) * (kBottom - kTop); };

    std::ofstream out(path);
    if (!out) throw PlotError("cannot write plot file: " + path);

    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    // Frame and axes.
    out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << (kRight - kLeft)
        << "\" height=\"" << (kBottom - kTop)
        << "\" fill=\"none\" stroke=\"#333\" stroke-width=\"1\"/>\n";

    // X ticks.
    const double xstep = nice_step(t1 - t0, 8);
    for (double tick = std::ceil(t0 / xstep) * xstep; tick <= t1 + 1e-9; tick += xstep) {
        const double x = xpix(tick);
        out << "<line x1=\"" << fmt(x) << "\" y1=\"" << kBottom << "\" x2=\"" << fmt(x)
            << "\" y2=\"" << (kBottom + 5) << "\" stroke=\"#333\"/>\n"
            << "<text x=\"" << fmt(x) << "\" y=\"" << (kBottom + 20)
            << "\" font-size=\"12\" font-family=\"sans-serif\" text-anchor=\"middle\">"
            << fmt(tick, "%g") << "</text>\n";
    }
    out << "<text x=\"" << fmt((kLeft + kRight) / 2) << "\" y=\"" << (kBottom + 40)
        << "\" font-size=\"13\" font-family=\"sans-serif\" text-anchor=\"middle\">time [s]</text>\n";

    // Y ticks.
    const double ystep = nice_step(fmax - fmin, 7);
    for (double tick = std::ceil(fmin / ystep) * ystep; tick <= fmax + 1e-9; tick += ystep) {
        const double y = ypix(tick);
        out << "<line x1=\"" << (kLeft - 5) << "\" y1=\"" << fmt(y) << "\" x2=\"" << kLeft
            << "\" y2=\"" << fmt(y) << "\" stroke=\"#333\"/>\n"
            << "<text x=\"" << (kLeft - 8) << "\" y=\"" << fmt(y + 4)
            << "\" font-size=\"12\" font-family=\"sans-serif\" text-anchor=\"end\">"
            << fmt(tick, "%.2f") << "</text>\n";
    }
    out << "<text x=\"18\" y=\"" << fmt((kTop + kBottom) / 2)
        << "\" font-size=\"13\" font-family=\"sans-serif\" text-anchor=\"middle\" "
        << "transform=\"rotate(-90 18 " << fmt((kTop + kBottom) / 2)
        << ")\">frequency [Hz]</text>\n";

    // Nominal line plus the ±200 mHz and ±100 mHz bands.
    const auto hline = [&](double f, const char* color, const char* dash, const std::string& label) {
        if (f < fmin || f > fmax) return;
        const double y = ypix(f);
        out << "<line x1=\"" << kLeft << "\" y1=\"" << fmt(y) << "\" x2=\"" << kRight
            << "\" y2=\"" << fmt(y) << "\" stroke=\"" << color
            << "\" stroke-width=\"1\" stroke-dasharray=\"" << dash << "\"/>\n";
        if (!label.empty()) {
            out << "<text x=\"" << (kRight + 4) << "\" y=\"" << fmt(y + 4)
                << "\" font-size=\"11\" font-family=\"sans-serif\" fill=\"" << color << "\">"
                << escape_xml(label) << "</text>\n";
        }
    };
    hline(nominal_hz, "#999999", "1 0", fmt(nominal_hz, "%.0f") + " Hz");
    hline(nominal_hz + 0.2, "#c0392b", "7 4", "+200 mHz");
    hline(nominal_hz - 0.2, "#c0392b", "7 4", "-200 mHz");
    hline(nominal_hz + 0.1, "#e67e22", "3 4", "+100 mHz");
    hline(nominal_hz - 0.1, "#e67e22", "3 4", "-100 mHz");

    // Curves.
    for (size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* color = kPalette[k % kPaletteSize];
        out << "<polyline fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"1.3\" points=\"";
        for (size_t idx : envelope_indices(s.f)) {
            out << fmt(xpix(s.t[idx])) << ',' << fmt(ypix(s.f[idx])) << ' ';
        }
        out << "\"/>\n";
    }

    // Legend.
    const double lx = kRight + 10.0;
    double ly = kTop + 12.0;
    for (size_t k = 0; k < series.size(); ++k) {
        const char* color = kPalette[k % kPaletteSize];
        out << "<line x1=\"" << fmt(lx) << "\" y1=\"" << fmt(ly - 4) << "\" x2=\""
            << fmt(lx + 22) << "\" y2=\"" << fmt(ly - 4) << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n"
            << "<text x=\"" << fmt(lx + 27) << "\" y=\"" << fmt(ly)
            << "\" font-size=\"11\" font-family=\"sans-serif\">" << escape_xml(series[k].label)
            << "</text>\n";
        ly += 17.0;
    }

    out << "</svg>\n";
    if (!out) throw PlotError("write failed for plot file: " + path);
}

}  // namespace gridfreq
