#pragma once

#include <memory>
#include <string>
#include <vector>

#include "gridfreq/agc.hpp"
#include "gridfreq/devices.hpp"
#include "gridfreq/engine.hpp"
#include "gridfreq/network.hpp"
#include "gridfreq/stochastic.hpp"

namespace gridfreq {

/// Stochastic disturbance setup: one mean-zero OU channel per load
/// (multiplicative, fraction of nominal) and optionally one additive
/// wind-speed channel (m/s).
struct NoiseConfig {
    bool load_noise = false;
    double load_alpha = 1.0 / 300.0;  // 1/s
    double load_std = 0.01;           // stationary std, fraction of nominal
    bool wind_noise = false;
    double wind_alpha = 1.0 / 60.0;   // 1/s
    double wind_std_frac = 0.01;      // stationary std, fraction of mean speed
};

/// The assembled grid: network + devices + disturbances + optional AGC,
/// presented to the integrator as one flat SDAE.
///
/// State layout   x = [device slices..., per-bus washout states]
/// Algebraic      y = [bus angles..., bus voltage magnitudes...]
/// Noise          η = [load channels..., wind channel?]
class GridSystem : public SdaeSystem {
public:
    GridSystem(NetworkModel network, std::vector<std::unique_ptr<Device>> devices,
               NoiseConfig noise, RampProfile load_ramp, RampProfile wind_ramp,
               std::unique_ptr<AgcController> agc, double t_washout = 0.05);

    /// Solve the power flow and back-initialize every device so all
    /// derivatives vanish; verifies the flat-start residuals.
    void initialize(const std::vector<GeneratorSetpoint>& setpoints);

    const Eigen::VectorXd& x0() const { return x0_; }
    const Eigen::VectorXd& y0() const { return y0_; }
    const Eigen::VectorXd& eta0() const { return eta0_; }

    // SdaeSystem interface.
    int state_dim() const override { return x_dim_; }
    int algebraic_dim() const override { return 2 * n_bus_; }
    int noise_dim() const override { return eta_dim_; }
    void state_derivatives(double t, const double* x, const double* y, const double* eta,
                           double* dx) const override;
    void algebraic_residual(double t, const double* x, const double* y, const double* eta,
                            double* res) const override;
    void noise_drift(const double* eta, double* a) const override;
    void noise_diffusion(const double* eta, double* b) const override;
    void branch_signature(double t, const double* x, const double* y, const double* eta,
                          std::vector<int8_t>& sig) const override;
    void discrete_update(double t, const double* x, const double* y,
                         const double* eta) override;
    std::vector<std::string> channel_names() const override;
    void channels(double t, const double* x, const double* y, const double* eta,
                  double* out) const override;

    // Event handlers.
    void disconnect_load(int bus_id);
    void reconnect_load(int bus_id);
    Device& device(const std::string& name);

    /// Inertia-weighted average speed of all inertial devices, Hz.
    double coi_frequency_hz(const double* x) const;
    /// Washout estimate of the local bus frequency, Hz.
    double bus_frequency_hz(int bus_index, const double* x, const double* y) const;

    NetworkModel& network() { return network_; }
    const NetworkModel& network() const { return network_; }
    const AgcController* agc() const { return agc_.get(); }
    double f_nominal() const { return f0_; }
    double wind_speed(double t, const double* eta) const;

private:
    DeviceInputs device_inputs(const Device& dev, double t, const double* x,
                               const double* y, const double* eta) const;
    double load_power_scale(size_t load_index, double t, const double* eta) const;

    NetworkModel network_;
    std::vector<std::unique_ptr<Device>> devices_;
    std::vector<int> device_offset_;
    NoiseConfig noise_;
    RampProfile load_ramp_;
    RampProfile wind_ramp_;
    std::unique_ptr<AgcController> agc_;

    double f0_;
    double t_washout_;
    int n_bus_ = 0;
    int x_dim_ = 0;
    int eta_dim_ = 0;
    int washout_offset_ = 0;
    int n_load_channels_ = 0;
    int wind_channel_ = -1;   // η index, -1 if absent
    double wind_v0_ = 0.0;    // equilibrium wind speed, m/s

    Eigen::VectorXd x0_, y0_, eta0_;
    bool initialized_ = false;
};

}  // namespace gridfreq
