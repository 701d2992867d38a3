#pragma once

#include <utility>
#include <vector>

namespace gridfreq {

/// Mean-reverting (Ornstein-Uhlenbeck) disturbance channel:
///   dη = α(μ − η) dt + σ_b dW
struct OuProcess {
    double mean = 0.0;            // μ, process units
    double mean_reversion = 0.0;  // α, 1/s, must be > 0
    double diffusion = 0.0;       // σ_b, units/sqrt(s), ≥ 0
};

double ou_drift(const OuProcess& process, double eta);
double ou_diffusion(const OuProcess& process);

/// Diffusion magnitude that yields a target stationary standard deviation:
/// stationary variance of an OU process is σ_b²/(2α).
double ou_diffusion_for_stationary_std(double stationary_std, double mean_reversion);

/// Piecewise-linear multiplier profile (daily load/wind shapes).
/// Constant extrapolation before the first and after the last breakpoint.
class RampProfile {
public:
    RampProfile();  // constant 1.0
    explicit RampProfile(std::vector<std::pair<double, double>> breakpoints);

    double value(double t) const;
    const std::vector<std::pair<double, double>>& breakpoints() const { return points_; }

private:
    std::vector<std::pair<double, double>> points_;  // (time s, level)
};

inline double ramp_value(const RampProfile& profile, double t) { return profile.value(t); }

}  // namespace gridfreq
