#include "gridfreq/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "gridfreq/errors.hpp"

namespace gridfreq {

namespace {

constexpr double kTimeTol = 1e-9;

void check_series(const std::vector<double>& t, const std::vector<double>& f) {
    if (t.size() != f.size())
        throw MetricError("time and value series have different lengths");
    if (t.size() < 2) throw MetricError("trace has fewer than two samples");
    for (size_t i = 1; i < t.size(); ++i)
        if (t[i] <= t[i - 1]) throw MetricError("trace times are not increasing");
}

/// Linear interpolation; `t` is clamped to the sampled range.
double interp(const std::vector<double>& ts, const std::vector<double>& fs, double t) {
    if (t <= ts.front()) return fs.front();
    if (t >= ts.back()) return fs.back();
    const auto it = std::upper_bound(ts.begin(), ts.end(), t);
    const size_t i = static_cast<size_t>(it - ts.begin());
    const double w = (t - ts[i - 1]) / (ts[i] - ts[i - 1]);
    return fs[i - 1] + w * (fs[i] - fs[i - 1]);
}

size_t first_index_at_or_after(const std::vector<double>& ts, double time) {
    const auto it = std::lower_bound(ts.begin(), ts.end(), time - kTimeTol);
    if (it == ts.end()) throw MetricError("trace ends before the event");
    return static_cast<size_t>(it - ts.begin());
}

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

}  // namespace

double max_rocof(const std::vector<double>& t, const std::vector<double>& f,
                 double window) {
    check_series(t, f);
    if (window <= 0.0) throw MetricError("RoCoF window must be positive");
    if (t.back() - t.front() <= window)
        throw MetricError("trace shorter than the RoCoF window");
    for (size_t i = 1; i < t.size(); ++i)
        if (t[i] - t[i - 1] > window + kTimeTol)
            throw MetricError("trace spacing exceeds the RoCoF window");

    // On a piecewise-linear trace the difference f(τ) − f(τ−w) is linear
    // between breakpoints of either endpoint, so the maximum is attained
    // with one end of the window on a sample.
    double best = 0.0;
    auto consider = [&](double tau) {
        if (tau < t.front() + window - kTimeTol || tau > t.back() + kTimeTol) return;
        tau = std::min(tau, t.back());
        const double d = std::abs(interp(t, f, tau) - interp(t, f, tau - window));
        best = std::max(best, d / window);
    };
    for (const double ti : t) {
        consider(ti);
        consider(ti + window);
    }
    return best;
}

std::pair<double, double> zenith(const std::vector<double>& t,
                                 const std::vector<double>& f, double event_time,
                                 double /*nominal_hz*/) {
    check_series(t, f);
    const size_t start = first_index_at_or_after(t, event_time);
    size_t best = start;
    for (size_t i = start + 1; i < t.size(); ++i)
        if (f[i] > f[best]) best = i;
    return {f[best], t[best] - event_time};
}

std::optional<double> restore_time(const std::vector<double>& t,
                                   const std::vector<double>& f, double event_time,
                                   double band_hz, double dwell_s, double nominal_hz) {
    check_series(t, f);
    const size_t start = first_index_at_or_after(t, event_time);
    const size_t n = t.size();

    // next_out[i] = first sample index ≥ i outside the band (n if none).
    std::vector<size_t> next_out(n + 1, n);
    for (size_t i = n; i-- > start;) {
        const bool inside = std::abs(f[i] - nominal_hz) <= band_hz + 1e-12;
        next_out[i] = inside ? next_out[i + 1] : i;
    }
    for (size_t i = start; i < n; ++i) {
        if (next_out[i] == i) continue;  // candidate itself is outside
        const double hold_until = std::min(t[i] + dwell_s, t.back());
        if (next_out[i] == n || t[next_out[i]] > hold_until + kTimeTol)
            return t[i] - event_time;
    }
    return std::nullopt;
}

LongTermMetrics long_term_stats(const std::vector<double>& t,
                                const std::vector<double>& f,
                                double sample_period_s, double nominal_hz) {
    check_series(t, f);
    if (sample_period_s <= 0.0) throw MetricError("sample period must be positive");
    if (t.back() - t.front() < 600.0 - kTimeTol)
        throw MetricError("trace shorter than ten minutes");

    // Bin means over consecutive sample_period windows.
    const size_t n_bins =
        static_cast<size_t>(std::floor((t.back() - t.front()) / sample_period_s + kTimeTol)) + 1;
    std::vector<double> sum(n_bins, 0.0);
    std::vector<int> count(n_bins, 0);
    for (size_t i = 0; i < t.size(); ++i) {
        size_t b = static_cast<size_t>(std::floor((t[i] - t.front()) / sample_period_s + kTimeTol));
        b = std::min(b, n_bins - 1);
        sum[b] += f[i];
        ++count[b];
    }
    std::vector<double> samples;
    samples.reserve(n_bins);
    for (size_t b = 0; b < n_bins; ++b)
        if (count[b] > 0) samples.push_back(sum[b] / count[b]);
    if (samples.empty()) throw MetricError("no resampled points");

    LongTermMetrics m;
    double acc = 0.0;
    for (const double s : samples) acc += s;
    m.mean_hz = acc / static_cast<double>(samples.size());

    double var = 0.0, ss_minus = 0.0, ss_plus = 0.0;
    size_t n_minus = 0, n_plus = 0, below = 0, above = 0;
    for (const double s : samples) {
        var += (s - m.mean_hz) * (s - m.mean_hz);
        const double d = s - nominal_hz;
        if (d < 0.0) {
            ss_minus += d * d;
            ++n_minus;
        } else if (d > 0.0) {
            ss_plus += d * d;
            ++n_plus;
        }
        if (s < nominal_hz - 0.1) ++below;
        if (s > nominal_hz + 0.1) ++above;
    }
    m.sigma_f = std::sqrt(var / static_cast<double>(samples.size()));
    m.sigma_f_minus = n_minus ? std::sqrt(ss_minus / static_cast<double>(n_minus)) : 0.0;
    m.sigma_f_plus = n_plus ? std::sqrt(ss_plus / static_cast<double>(n_plus)) : 0.0;
    m.delta_sigma_f = std::abs(m.sigma_f_minus - m.sigma_f_plus);
    const double to_minutes = sample_period_s / 60.0;
    m.minutes_below_49p9 = static_cast<double>(below) * to_minutes;
    m.minutes_above_50p1 = static_cast<double>(above) * to_minutes;
    m.minutes_outside_100mhz = m.minutes_below_49p9 + m.minutes_above_50p1;
    return m;
}

Security classify_security(const ContingencyMetrics& metrics,
                           const SecurityLimits& limits) {
    const bool ok = metrics.zenith_hz < limits.zenith_limit_hz &&
                    metrics.max_rocof < limits.rocof_limit &&
                    metrics.t_restore_s.has_value();
    return ok ? Security::secure : Security::insecure;
}

ContingencyMetrics contingency_metrics(const std::vector<double>& t,
                                       const std::vector<double>& f,
                                       double event_time, const SecurityLimits& limits,
                                       double rocof_window_s, double dwell_s,
                                       double nominal_hz) {
    ContingencyMetrics m;
    std::tie(m.zenith_hz, m.t_zenith_s) = zenith(t, f, event_time, nominal_hz);
    m.max_rocof = max_rocof(t, f, rocof_window_s);
    m.t_restore_s =
        restore_time(t, f, event_time, limits.restore_band_hz, dwell_s, nominal_hz);
    m.security = classify_security(m, limits);
    return m;
}

ContingencyMetrics contingency_metrics(const Trace& trace, double event_time,
                                       const std::string& channel) {
    return contingency_metrics(trace.t, trace.channel(channel), event_time);
}

LongTermMetrics long_term_stats(const Trace& trace, const std::string& channel) {
    return long_term_stats(trace.t, trace.channel(channel));
}

const std::vector<std::string>& contingency_headers() {
    static const std::vector<std::string> h{"zenith_hz", "t_zenith_s",
                                            "max_rocof_hz_per_s", "t_restore_s",
                                            "security"};
    return h;
}

const std::vector<std::string>& longterm_headers() {
    static const std::vector<std::string> h{
        "mean_hz",          "sigma_f_hz",        "sigma_f_minus_hz",
        "sigma_f_plus_hz",  "delta_sigma_f_hz",  "min_outside_100mhz",
        "min_below_49p9hz", "min_above_50p1hz"};
    return h;
}

std::vector<std::string> contingency_cells(const ContingencyMetrics& m) {
    return {fmt("%.2f", m.zenith_hz), fmt("%.2f", m.t_zenith_s),
            fmt("%.2f", m.max_rocof),
            m.t_restore_s ? fmt("%.2f", *m.t_restore_s) : std::string("No rest."),
            m.security == Security::secure ? "Secure" : "Insecure"};
}

std::vector<std::string> longterm_cells(const LongTermMetrics& m) {
    return {fmt("%.2f", m.mean_hz),
            fmt("%.5f", m.sigma_f),
            fmt("%.5f", m.sigma_f_minus),
            fmt("%.5f", m.sigma_f_plus),
            fmt("%.5f", m.delta_sigma_f),
            fmt("%.2f", m.minutes_outside_100mhz),
            fmt("%.2f", m.minutes_below_49p9),
            fmt("%.2f", m.minutes_above_50p1)};
}

}  // namespace gridfreq
