#include "gridfreq/grid_system.hpp"

#include <cmath>
#include <numbers>

#include "gridfreq/errors.hpp"

namespace gridfreq {

GridSystem::GridSystem(NetworkModel network, std::vector<std::unique_ptr<Device>> devices,
                       NoiseConfig noise, RampProfile load_ramp, RampProfile wind_ramp,
                       std::unique_ptr<AgcController> agc, double t_washout)
    : network_(std::move(network)),
      devices_(std::move(devices)),
      noise_(noise),
      load_ramp_(std::move(load_ramp)),
      wind_ramp_(std::move(wind_ramp)),
      agc_(std::move(agc)),
      f0_(network_.f_nominal()),
      t_washout_(t_washout) {
    n_bus_ = network_.bus_count();

    int offset = 0;
    bool has_wind = false;
    for (const auto& dev : devices_) {
        if (dev->bus() < 0 || dev->bus() >= n_bus_)
            throw ConfigError(dev->name() + ": bus index out of range");
        device_offset_.push_back(offset);
        offset += dev->state_count();
        if (auto* wind = dynamic_cast<const DfigWind*>(dev.get())) {
            has_wind = true;
            wind_v0_ = wind->params().v_wind0;
        }
    }
    washout_offset_ = offset;
    x_dim_ = offset + n_bus_;

    n_load_channels_ = noise_.load_noise ? static_cast<int>(network_.loads().size()) : 0;
    eta_dim_ = n_load_channels_;
    if (noise_.wind_noise) {
        if (!has_wind)
            throw ConfigError("wind noise requested but no wind plant is present");
        wind_channel_ = eta_dim_++;
    }
}

double GridSystem::wind_speed(double t, const double* eta) const {
    double v = wind_v0_ * wind_ramp_.value(t);
    if (wind_channel_ >= 0) v += eta[wind_channel_];
    return std::max(v, 0.0);
}

double GridSystem::load_power_scale(size_t load_index, double t, const double* eta) const {
    const Load& load = network_.loads()[load_index];
    double scale = load.scale * load_ramp_.value(t);
    if (noise_.load_noise) scale *= 1.0 + eta[load_index];
    return scale;
}

DeviceInputs GridSystem::device_inputs(const Device& dev, double t, const double* x,
                                       const double* y, const double* eta) const {
    DeviceInputs in;
    in.t = t;
    in.f_bus_hz = bus_frequency_hz(dev.bus(), x, y);
    in.agc_setpoint = agc_ ? agc_->setpoint(dev.name()) : 0.0;
    in.wind_speed = wind_speed(t, eta);
    return in;
}

double GridSystem::bus_frequency_hz(int bus_index, const double* x, const double* y) const {
    const double theta = y[bus_index];
    const double z = x[washout_offset_ + bus_index];
    return f0_ + (theta - z) / (t_washout_ * 2.0 * std::numbers::pi);
}

double GridSystem::coi_frequency_hz(const double* x) const {
    double weight = 0.0, sum = 0.0;
    for (size_t d = 0; d < devices_.size(); ++d) {
        const double h = devices_[d]->inertia_weight();
        if (h <= 0.0) continue;
        weight += h;
        sum += h * devices_[d]->speed(x + device_offset_[d]);
    }
    // Every supported scenario carries at least one inertial unit; the
    // nominal fallback only guards against degenerate hand-built systems.
    if (weight <= 0.0) return f0_;
    return f0_ * sum / weight;
}

void GridSystem::state_derivatives(double t, const double* x, const double* y,
                                   const double* eta, double* dx) const {
    for (size_t d = 0; d < devices_.size(); ++d) {
        const Device& dev = *devices_[d];
        const Complex v = std::polar(y[n_bus_ + dev.bus()], y[dev.bus()]);
        const DeviceInputs in = device_inputs(dev, t, x, y, eta);
        dev.derivatives(x + device_offset_[d], v, in, dx + device_offset_[d]);
    }
    for (int i = 0; i < n_bus_; ++i) {
        const int k = washout_offset_ + i;
        dx[k] = (y[i] - x[k]) / t_washout_;
    }
}

void GridSystem::algebraic_residual(double t, const double* x, const double* y,
                                    const double* eta, double* res) const {
    Eigen::Map<const Eigen::VectorXd> th(y, n_bus_);
    Eigen::Map<const Eigen::VectorXd> vm(y + n_bus_, n_bus_);
    Eigen::VectorXd p_net(n_bus_), q_net(n_bus_);
    network_injections(network_.ybus(), vm, th, p_net, q_net);

    Eigen::VectorXd p_bal = -p_net, q_bal = -q_net;
    for (size_t d = 0; d < devices_.size(); ++d) {
        const Device& dev = *devices_[d];
        const Complex v = std::polar(vm[dev.bus()], th[dev.bus()]);
        double p = 0.0, q = 0.0;
        dev.injection(x + device_offset_[d], v, p, q);
        p_bal[dev.bus()] += p;
        q_bal[dev.bus()] += q;
    }
    const auto& loads = network_.loads();
    for (size_t li = 0; li < loads.size(); ++li) {
        if (!loads[li].connected) continue;
        const double scale = load_power_scale(li, t, eta);
        const int b = network_.bus_index(loads[li].bus);
        p_bal[b] -= loads[li].p_nominal * scale;
        q_bal[b] -= loads[li].q_nominal * scale;
    }
    for (int i = 0; i < n_bus_; ++i) {
        res[i] = p_bal[i];
        res[n_bus_ + i] = q_bal[i];
    }
}

void GridSystem::noise_drift(const double* eta, double* a) const {
    for (int i = 0; i < n_load_channels_; ++i) a[i] = -noise_.load_alpha * eta[i];
    if (wind_channel_ >= 0) a[wind_channel_] = -noise_.wind_alpha * eta[wind_channel_];
}

void GridSystem::noise_diffusion(const double* /*eta*/, double* b) const {
    const double load_b = noise_.load_noise
                              ? ou_diffusion_for_stationary_std(noise_.load_std,
                                                                noise_.load_alpha)
                              : 0.0;
    for (int i = 0; i < n_load_channels_; ++i) b[i] = load_b;
    if (wind_channel_ >= 0)
        b[wind_channel_] = ou_diffusion_for_stationary_std(noise_.wind_std_frac * wind_v0_,
                                                           noise_.wind_alpha);
}

void GridSystem::branch_signature(double t, const double* x, const double* y,
                                  const double* eta, std::vector<int8_t>& sig) const {
    for (size_t d = 0; d < devices_.size(); ++d) {
        const Device& dev = *devices_[d];
        const Complex v = std::polar(y[n_bus_ + dev.bus()], y[dev.bus()]);
        const DeviceInputs in = device_inputs(dev, t, x, y, eta);
        dev.branch_signature(x + device_offset_[d], v, in, sig);
    }
}

void GridSystem::discrete_update(double t, const double* x, const double* /*y*/,
                                 const double* /*eta*/) {
    if (agc_) agc_->update(coi_frequency_hz(x), t);
}

std::vector<std::string> GridSystem::channel_names() const {
    std::vector<std::string> names{"f_coi"};
    for (int i = 0; i < n_bus_; ++i)
        names.push_back("f_bus" + std::to_string(network_.buses()[i].id));
    for (const auto& dev : devices_)
        for (const auto& n : dev->channel_names()) names.push_back(n);
    return names;
}

void GridSystem::channels(double t, const double* x, const double* y, const double* eta,
                          double* out) const {
    int k = 0;
    out[k++] = coi_frequency_hz(x);
    for (int i = 0; i < n_bus_; ++i) out[k++] = bus_frequency_hz(i, x, y);
    for (size_t d = 0; d < devices_.size(); ++d) {
        const Device& dev = *devices_[d];
        const Complex v = std::polar(y[n_bus_ + dev.bus()], y[dev.bus()]);
        const DeviceInputs in = device_inputs(dev, t, x, y, eta);
        dev.channel_values(x + device_offset_[d], v, in, out + k);
        k += static_cast<int>(dev.channel_names().size());
    }
}

void GridSystem::disconnect_load(int bus_id) {
    for (auto& load : network_.loads()) {
        if (load.bus == bus_id && load.connected) {
            load.connected = false;
            return;
        }
    }
    throw ConfigError("no connected load at bus " + std::to_string(bus_id));
}

void GridSystem::reconnect_load(int bus_id) {
    for (auto& load : network_.loads()) {
        if (load.bus == bus_id && !load.connected) {
            load.connected = true;
            return;
        }
    }
    throw ConfigError("no disconnected load at bus " + std::to_string(bus_id));
}

Device& GridSystem::device(const std::string& name) {
    for (auto& dev : devices_)
        if (dev->name() == name) return *dev;
    throw ConfigError("no device named '" + name + "'");
}

void GridSystem::initialize(const std::vector<GeneratorSetpoint>& setpoints) {
    if (std::abs(load_ramp_.value(0.0) - 1.0) > 1e-12 ||
        std::abs(wind_ramp_.value(0.0) - 1.0) > 1e-12)
        throw InitializationError("ramp profiles must start at 1.0 so the power flow "
                                  "matches the t=0 operating point");

    PowerFlowOptions opts;
    opts.tolerance = 1e-10;
    const PowerFlowSolution pf = solve_power_flow(network_, setpoints, opts);

    x0_.setZero(x_dim_);
    y0_.setZero(2 * n_bus_);
    eta0_.setZero(eta_dim_);
    for (int i = 0; i < n_bus_; ++i) {
        y0_[i] = pf.v_ang[i];
        y0_[n_bus_ + i] = pf.v_mag[i];
        x0_[washout_offset_ + i] = pf.v_ang[i];
    }

    // Device share of each bus injection: net injection plus local load,
    // split equally when several devices share a bus.
    std::vector<int> devices_at_bus(n_bus_, 0);
    for (const auto& dev : devices_) ++devices_at_bus[dev->bus()];
    Eigen::VectorXd p_gen = pf.p_inj, q_gen = pf.q_inj;
    for (const auto& load : network_.loads()) {
        if (!load.connected) continue;
        const int b = network_.bus_index(load.bus);
        p_gen[b] += load.p_nominal * load.scale;
        q_gen[b] += load.q_nominal * load.scale;
    }

    for (size_t d = 0; d < devices_.size(); ++d) {
        Device& dev = *devices_[d];
        const int b = dev.bus();
        const Complex v = pf.voltage(b);
        dev.initialize(v, p_gen[b] / devices_at_bus[b], q_gen[b] / devices_at_bus[b],
                       x0_.data() + device_offset_[d]);
    }

    // The flat start must be an exact fixed point of the drift and satisfy
    // the network equations.
    Eigen::VectorXd dx(x_dim_), g(2 * n_bus_);
    state_derivatives(0.0, x0_.data(), y0_.data(), eta0_.data(), dx.data());
    algebraic_residual(0.0, x0_.data(), y0_.data(), eta0_.data(), g.data());
    const double fmax = x_dim_ > 0 ? dx.cwiseAbs().maxCoeff() : 0.0;
    const double gmax = g.cwiseAbs().maxCoeff();
    if (fmax > 1e-8)
        throw InitializationError("equilibrium drift residual too large", fmax);
    if (gmax > 1e-8)
        throw InitializationError("equilibrium network residual too large", gmax);
    initialized_ = true;
}

}  // namespace gridfreq
