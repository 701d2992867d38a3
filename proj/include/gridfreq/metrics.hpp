#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gridfreq/engine.hpp"

namespace gridfreq {

enum class Security { secure, insecure };

/// KPIs of a single contingency run.
struct ContingencyMetrics {
    double zenith_hz = 0.0;        // highest post-event frequency
    double t_zenith_s = 0.0;       // elapsed time from event to that maximum
    double max_rocof = 0.0;        // Hz/s over the rolling window
    std::optional<double> t_restore_s;  // none if the band is never held
    Security security = Security::insecure;
};

/// Frequency-quality statistics of a long noisy run.
struct LongTermMetrics {
    double mean_hz = 0.0;
    double sigma_f = 0.0;        // std of the resampled signal about its mean
    double sigma_f_minus = 0.0;  // std of below-nominal samples about nominal
    double sigma_f_plus = 0.0;   // std of above-nominal samples about nominal
    double delta_sigma_f = 0.0;  // |sigma_f_minus − sigma_f_plus|
    double minutes_outside_100mhz = 0.0;
    double minutes_below_49p9 = 0.0;
    double minutes_above_50p1 = 0.0;
};

/// Operational limits for the secure/insecure verdict.
struct SecurityLimits {
    double zenith_limit_hz = 51.0;
    double rocof_limit = 1.0;     // Hz/s
    double restore_band_hz = 0.2;
};

/// Largest |f(t) − f(t−window)|/window over the piecewise-linear trace.
/// The sample spacing must not exceed the window and the trace must be
/// longer than the window.
double max_rocof(const std::vector<double>& t, const std::vector<double>& f,
                 double window = 0.5);

/// Highest frequency at or after the event and its delay from the event;
/// ties resolve to the earliest sample.
std::pair<double, double> zenith(const std::vector<double>& t,
                                 const std::vector<double>& f, double event_time,
                                 double nominal_hz = 50.0);

/// Delay from the event to the first sample from which the frequency stays
/// within nominal ± band for at least `dwell` seconds (or to trace end if
/// that comes first). Empty when the band is never held.
std::optional<double> restore_time(const std::vector<double>& t,
                                   const std::vector<double>& f, double event_time,
                                   double band_hz = 0.2, double dwell_s = 10.0,
                                   double nominal_hz = 50.0);

/// Resample to `sample_period` bin means, then evaluate the distribution
/// statistics and strict ±100 mHz band minutes. Requires at least ten
/// minutes of data.
LongTermMetrics long_term_stats(const std::vector<double>& t,
                                const std::vector<double>& f,
                                double sample_period_s = 1.0,
                                double nominal_hz = 50.0);

/// Secure iff the zenith and RoCoF are inside their limits and the
/// frequency was restored.
Security classify_security(const ContingencyMetrics& metrics,
                           const SecurityLimits& limits = SecurityLimits{});

/// All contingency KPIs of one trace channel in one pass.
ContingencyMetrics contingency_metrics(const std::vector<double>& t,
                                       const std::vector<double>& f,
                                       double event_time,
                                       const SecurityLimits& limits = SecurityLimits{},
                                       double rocof_window_s = 0.5,
                                       double dwell_s = 10.0,
                                       double nominal_hz = 50.0);

// Trace-channel conveniences (channel defaults to the system frequency).
ContingencyMetrics contingency_metrics(const Trace& trace, double event_time,
                                       const std::string& channel = "f_coi");
LongTermMetrics long_term_stats(const Trace& trace,
                                const std::string& channel = "f_coi");

/// Report-row cells in the report column order; restore renders as
/// "No rest." when absent.
const std::vector<std::string>& contingency_headers();
const std::vector<std::string>& longterm_headers();
std::vector<std::string> contingency_cells(const ContingencyMetrics& m);
std::vector<std::string> longterm_cells(const LongTermMetrics& m);

}  // namespace gridfreq
