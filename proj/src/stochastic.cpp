#include "gridfreq/stochastic.hpp"

#include <algorithm>
#include <cmath>

#include "gridfreq/errors.hpp"

namespace gridfreq {

double ou_drift(const OuProcess& process, double eta) {
    return process.mean_reversion * (process.mean - eta);
}

double ou_diffusion(const OuProcess& process) { return process.diffusion; }

double ou_diffusion_for_stationary_std(double stationary_std, double mean_reversion) {
    if (mean_reversion <= 0.0)
        throw ConfigError("OU mean reversion must be positive");
    return stationary_std * std::sqrt(2.0 * mean_reversion);
}

RampProfile::RampProfile() : points_{{0.0, 1.0}} {}

RampProfile::RampProfile(std::vector<std::pair<double, double>> breakpoints)
    : points_(std::move(breakpoints)) {
    if (points_.empty()) throw ConfigError("ramp profile needs at least one breakpoint");
    for (size_t i = 0; i < points_.size(); ++i) {
        if (points_[i].second <= 0.0)
            throw ConfigError("ramp levels must be positive");
        if (i > 0 && points_[i].first <= points_[i - 1].first)
            throw ConfigError("ramp breakpoint times must be strictly increasing");
    }
}

double RampProfile::value(double t) const {
    if (t <= points_.front().first) return points_.front().second;
    if (t >= points_.back().first) return points_.back().second;
    auto hi = std::upper_bound(points_.begin(), points_.end(), t,
                               [](double tv, const auto& bp) { return tv < bp.first; });
    auto lo = hi - 1;
    const double w = (t - lo->first) / (hi->first - lo->first);
    return lo->second + w * (hi->second - lo->second);
}

}  // namespace gridfreq
