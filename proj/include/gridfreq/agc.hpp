#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace gridfreq {

/// Discrete secondary frequency controller. The frequency error is
/// integrated continuously (trapezoid rule over the calls it receives);
/// setpoints are sampled from the integral only at issuance instants and
/// held constant in between (zero-order hold).
class AgcController {
public:
    /// `participation` maps unit name to factor; factors must be
    /// nonnegative and sum to 1.
    AgcController(double k_i, double period_s,
                  std::vector<std::pair<std::string, double>> participation,
                  double f_nominal_hz = 50.0, double windup_limit = 1.5);

    /// Advance the error integral to time `t` with the current frequency
    /// measurement and issue new setpoints if an issuance instant has been
    /// reached. Times must be nondecreasing across calls.
    const std::map<std::string, double>& update(double f_measured_hz, double t);

    const std::map<std::string, double>& setpoints() const { return setpoints_; }
    double setpoint(const std::string& unit) const;
    double integral() const { return integral_; }
    double period() const { return period_; }

private:
    double k_i_;
    double period_;
    double f0_;
    double windup_limit_;
    std::vector<std::pair<std::string, double>> participation_;
    std::map<std::string, double> setpoints_;
    double integral_ = 0.0;
    double t_prev_ = 0.0;
    double err_prev_ = 0.0;
    bool started_ = false;
    long issued_ = 0;  // count of past issuance instants
};

inline const std::map<std::string, double>& agc_update(AgcController& controller,
                                                       double f_measured_hz, double t) {
    return controller.update(f_measured_hz, t);
}

}  // namespace gridfreq
