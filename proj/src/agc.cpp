#include "gridfreq/agc.hpp"

#include <algorithm>
#include <cmath>

#include "gridfreq/errors.hpp"

namespace gridfreq {

AgcController::AgcController(double k_i, double period_s,
                             std::vector<std::pair<std::string, double>> participation,
                             double f_nominal_hz, double windup_limit)
    : k_i_(k_i),
      period_(period_s),
      f0_(f_nominal_hz),
      windup_limit_(windup_limit),
      participation_(std::move(participation)) {
    if (period_ <= 0.0) throw ConfigError("AGC issuance period must be positive");
    if (participation_.empty())
        throw ConfigError("AGC needs at least one participating unit");
    double sum = 0.0;
    for (const auto& [unit, factor] : participation_) {
        if (factor < 0.0)
            throw ConfigError("AGC participation factor for " + unit + " is negative");
        sum += factor;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw ConfigError("AGC participation factors must sum to 1, got " +
                          std::to_string(sum));
    for (const auto& [unit, factor] : participation_) setpoints_[unit] = 0.0;
}

const std::map<std::string, double>& AgcController::update(double f_measured_hz, double t) {
    const double err = f0_ - f_measured_hz;
    if (!started_) {
        started_ = true;
        t_prev_ = t;
        err_prev_ = err;
        issued_ = static_cast<long>(std::floor(t / period_ + 1e-9));
    }
    if (t < t_prev_ - 1e-9)
        throw ConfigError("AGC update times must be nondecreasing");

    integral_ += k_i_ * (t - t_prev_) * 0.5 * (err_prev_ + err);
    integral_ = std::clamp(integral_, -windup_limit_, windup_limit_);
    t_prev_ = t;
    err_prev_ = err;

    const long due = static_cast<long>(std::floor(t / period_ + 1e-9));
    if (due > issued_) {
        issued_ = due;
        for (const auto& [unit, factor] : participation_)
            setpoints_[unit] = factor * integral_;
    }
    return setpoints_;
}

double AgcController::setpoint(const std::string& unit) const {
    auto it = setpoints_.find(unit);
    return it == setpoints_.end() ? 0.0 : it->second;
}

}  // namespace gridfreq
