#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "gridfreq/network.hpp"

namespace gridfreq {

/// Frequency-error shaping shared by every primary controller: zero inside
/// [−band, +band], shifted linear outside (odd, continuous, slope 1).
double dead_band(double value, double band);

/// Droop response of a governor-like controller, per-unit power on the
/// droop's own base. Under-frequency gives positive output.
double governor_response(double delta_f_hz, double dead_band_hz, double droop,
                         double f_nominal_hz);

// ---------------------------------------------------------------------------
// Parameter records. Reactances/time constants in pu/seconds; power ratings
// in pu on the system MVA base unless stated otherwise.
// ---------------------------------------------------------------------------

struct MachineParams {
    double h = 6.4;        // inertia, s (system base)
    double d = 2.0;        // damping, pu/pu speed
    double ra = 0.0;       // stator resistance
    double xd = 0.8958, xq = 0.8645;
    double xd_p = 0.1198, xq_p = 0.1969;
    double td0_p = 6.0, tq0_p = 0.535;
    // Exciter (first-order AVR).
    double ka = 20.0, ta = 0.2;
    // Governor/turbine (two-stage steam model).
    double droop = 0.05;       // pu (system base)
    double dead_band = 0.015;  // Hz, fdb_conv
    double t1 = 0.5;           // valve servo, s
    double t2 = 1.0, t3 = 10.0;  // turbine lead/lag, s
    double p_min = 0.0, p_max = 3.0;  // valve limits, pu
};

struct CondenserParams {
    double h = 6.4;  // matches the bus-2 machine by construction
    double d = 2.0;
    double ra = 0.0;
    double xd = 0.8958, xq = 0.8645;
    double xd_p = 0.1198, xq_p = 0.1969;
    double td0_p = 6.0, tq0_p = 0.535;
    double ka = 20.0, ta = 0.2;
};

struct MpptCurve {
    double v_cutin = 4.0;   // m/s
    double v_rated = 12.0;  // m/s
    double p_rated = 1.0625;  // pu at/above rated speed
};

struct DfigWindParams {
    double rating = 1.0625;    // converter limit, pu
    MpptCurve mppt;
    double v_wind0 = 12.0;     // equilibrium wind speed, m/s
    double curtailment = 0.8;  // delivered fraction of the MPPT reference
    double droop = 0.04;       // PFC droop, pu (system base)
    double dead_band = 0.015;  // Hz, fdb_wind
    bool apc = true;
    double t_power = 0.3;      // converter power lag, s
    double t_speed = 5.0;      // rotor speed tracking lag, s
    double t_pitch = 1.0;      // pitch servo, s
    double pitch_gain = 5.0;   // deg per m/s above rated
    double pitch_max = 30.0;   // deg
    double t_freq = 0.1;       // frequency measurement lag, s
    double kv = 10.0;          // voltage-support droop, pu/pu
    double t_volt = 0.1;       // reactive lag, s
};

struct GflBessParams {
    double rating = 1.0;       // pu
    double droop = 0.02;       // pu (system base)
    double dead_band = 0.015;  // Hz, fdb_bess
    double t_power = 0.2;      // response lag, s
    double kv = 10.0;          // voltage-support droop, pu/pu
    double t_freq = 0.1;       // frequency measurement lag, s
    double energy0 = 0.5;      // initial stored energy, pu·h
};

struct GfmDroopParams {
    double rating = 1.92;   // pu on system base
    double m_p = 0.02;      // P-f droop, pu frequency per pu power (device base)
    double m_q = 0.05;      // Q-V droop (device base)
    double t_filter = 0.05; // power measurement filter, s
    double rs = 0.0, xs = 0.15;  // coupling impedance (device base)
    double i_max = 1.5;     // current limit, pu (device base)
};

struct GfmVsmParams {
    double rating = 1.92;  // pu on system base
    double h_v = 5.0;      // virtual inertia, s (device base)
    double d_v = 40.0;     // virtual damping, pu (device base)
    double m_q = 0.05;
    double t_filter = 0.05;  // reactive measurement filter, s
    double rs = 0.0, xs = 0.15;
    double i_max = 1.5;
};

double vsm_swing_derivative(const GfmVsmParams& params, double p_e, double p_star,
                            double omega_v);
double gfm_droop_frequency(const GfmDroopParams& params, double p_f, double p_star);
double mppt_power(double wind_speed, const MpptCurve& curve, double curtailment);
double bess_pfc_power(double delta_f_hz, const GflBessParams& params, double f_nominal_hz);

// ---------------------------------------------------------------------------
// Dynamic device models. Each device owns a contiguous slice of the global
// state vector and evaluates derivatives/injections as pure functions of
// (slice, terminal voltage, external inputs).
// ---------------------------------------------------------------------------

/// Per-step external signals a device may consume.
struct DeviceInputs {
    double f_bus_hz = 50.0;   // local washout frequency estimate
    double agc_setpoint = 0.0;  // held secondary-control share, pu
    double wind_speed = 0.0;  // m/s (ramped mean + noise), wind only
    double t = 0.0;           // simulation time, s
};

class Device {
public:
    Device(std::string name, int bus_index, double f_nominal_hz)
        : name_(std::move(name)), bus_(bus_index), f0_(f_nominal_hz) {}
    virtual ~Device() = default;

    const std::string& name() const { return name_; }
    int bus() const { return bus_; }

    virtual int state_count() const = 0;
    /// Back-initialize states from the solved power flow so that all
    /// derivatives vanish. `p`/`q` are this device's share of the bus
    /// injection on the system base.
    virtual void initialize(Complex v, double p, double q, double* x) = 0;
    virtual void derivatives(const double* x, Complex v, const DeviceInputs& in,
                             double* dx) const = 0;
    /// Terminal injection into the network, system-base pu.
    virtual void injection(const double* x, Complex v, double& p, double& q) const = 0;

    /// Inertia weight H·S for the center-of-inertia average (0 for
    /// non-inertial devices) and the matching per-unit speed.
    virtual double inertia_weight() const { return 0.0; }
    virtual double speed(const double* /*x*/) const { return 1.0; }

    /// Piecewise-branch code (dead-band sides, saturations, curve regions)
    /// used to invalidate cached Jacobians when the active set changes.
    virtual void branch_signature(const double* /*x*/, Complex /*v*/,
                                  const DeviceInputs& /*in*/,
                                  std::vector<int8_t>& /*sig*/) const {}

    /// Shift the active-power reference (dispatch events, tests).
    virtual void shift_reference(double /*dp*/) {}

    virtual std::vector<std::string> channel_names() const = 0;
    virtual void channel_values(const double* x, Complex v, const DeviceInputs& in,
                                double* out) const = 0;

protected:
    std::string name_;
    int bus_;
    double f0_;
};

/// Fourth-order two-axis synchronous machine with a first-order AVR and a
/// two-stage turbine-governor. States: δ, ω, e'_q, e'_d, E_fd, s1, s2.
class SynchronousMachine : public Device {
public:
    SynchronousMachine(std::string name, int bus_index, double f_nominal_hz,
                       MachineParams params);

    int state_count() const override { return 7; }
    void initialize(Complex v, double p, double q, double* x) override;
    void derivatives(const double* x, Complex v, const DeviceInputs& in,
                     double* dx) const override;
    void injection(const double* x, Complex v, double& p, double& q) const override;
    double inertia_weight() const override { return params_.h; }
    double speed(const double* x) const override { return x[1]; }
    void branch_signature(const double* x, Complex v, const DeviceInputs& in,
                          std::vector<int8_t>& sig) const override;
    void shift_reference(double dp) override { p_ref_ += dp; }
    std::vector<std::string> channel_names() const override;
    void channel_values(const double* x, Complex v, const DeviceInputs& in,
                        double* out) const override;

    const MachineParams& params() const { return params_; }
    double p_ref() const { return p_ref_; }

private:
    void stator_currents(const double* x, Complex v, double& id, double& iq,
                         double& vd, double& vq) const;
    double mechanical_power(const double* x) const;
    double valve_target(const double* x, const DeviceInputs& in) const;

    MachineParams params_;
    double p_ref_ = 0.0;
    double v_ref_ = 1.0;
};

/// Synchronous machine with zero mechanical power and no governor.
/// States: δ, ω, e'_q, e'_d, E_fd.
class SynchronousCondenser : public Device {
public:
    SynchronousCondenser(std::string name, int bus_index, double f_nominal_hz,
                         CondenserParams params);

    int state_count() const override { return 5; }
    void initialize(Complex v, double p, double q, double* x) override;
    void derivatives(const double* x, Complex v, const DeviceInputs& in,
                     double* dx) const override;
    void injection(const double* x, Complex v, double& p, double& q) const override;
    double inertia_weight() const override { return params_.h; }
    double speed(const double* x) const override { return x[1]; }
    std::vector<std::string> channel_names() const override;
    void channel_values(const double* x, Complex v, const DeviceInputs& in,
                        double* out) const override;

private:
    void stator_currents(const double* x, Complex v, double& id, double& iq,
                         double& vd, double& vq) const;

    CondenserParams params_;
    double v_ref_ = 1.0;
};

/// Grid-following wind plant: curtailed MPPT with pitch, rotor-speed
/// tracking, PFC through a dead-band, and terminal voltage support.
/// States: ω_r, θ_pitch, p_conv, q_conv, f_filt.
class DfigWind : public Device {
public:
    DfigWind(std::string name, int bus_index, double f_nominal_hz, DfigWindParams params);

    int state_count() const override { return 5; }
    void initialize(Complex v, double p, double q, double* x) override;
    void derivatives(const double* x, Complex v, const DeviceInputs& in,
                     double* dx) const override;
    void injection(const double* x, Complex v, double& p, double& q) const override;
    void branch_signature(const double* x, Complex v, const DeviceInputs& in,
                          std::vector<int8_t>& sig) const override;
    void shift_reference(double dp) override { p_bias_ += dp; }
    std::vector<std::string> channel_names() const override;
    void channel_values(const double* x, Complex v, const DeviceInputs& in,
                        double* out) const override;

    /// Power order after curtailment, PFC and AGC, clamped to the
    /// available MPPT power and the converter rating.
    double power_order(double wind_speed, double f_filt_hz, double agc) const;

    const DfigWindParams& params() const { return params_; }

private:
    double speed_reference(double wind_speed) const;
    double pitch_reference(double wind_speed) const;

    DfigWindParams params_;
    double p_bias_ = 0.0;
    double v_set_ = 1.0;
    double q0_ = 0.0;
};

/// Grid-following battery: PFC through a dead-band with saturation at the
/// rating, plus droop-based voltage support. States: p, q, energy, f_filt.
class GflBess : public Device {
public:
    GflBess(std::string name, int bus_index, double f_nominal_hz, GflBessParams params);

    int state_count() const override { return 4; }
    void initialize(Complex v, double p, double q, double* x) override;
    void derivatives(const double* x, Complex v, const DeviceInputs& in,
                     double* dx) const override;
    void injection(const double* x, Complex v, double& p, double& q) const override;
    void branch_signature(const double* x, Complex v, const DeviceInputs& in,
                          std::vector<int8_t>& sig) const override;
    std::vector<std::string> channel_names() const override;
    void channel_values(const double* x, Complex v, const DeviceInputs& in,
                        double* out) const override;

    const GflBessParams& params() const { return params_; }

private:
    GflBessParams params_;
    double v_set_ = 1.0;
};

/// Grid-forming converter, droop outer loop: voltage source E∠δ behind a
/// coupling impedance, frequency set by the P-f droop on filtered power.
/// States: δ, P_f, Q_f.
class GfmDroop : public Device {
public:
    GfmDroop(std::string name, int bus_index, double f_nominal_hz, GfmDroopParams params);

    int state_count() const override { return 3; }
    void initialize(Complex v, double p, double q, double* x) override;
    void derivatives(const double* x, Complex v, const DeviceInputs& in,
                     double* dx) const override;
    void injection(const double* x, Complex v, double& p, double& q) const override;
    void branch_signature(const double* x, Complex v, const DeviceInputs& in,
                          std::vector<int8_t>& sig) const override;
    void shift_reference(double dp) override { p_star_ += dp; }
    std::vector<std::string> channel_names() const override;
    void channel_values(const double* x, Complex v, const DeviceInputs& in,
                        double* out) const override;

    /// Internal frequency implied by the droop law, pu.
    double internal_speed(const double* x, double agc) const;

    const GfmDroopParams& params() const { return params_; }

private:
    Complex internal_current(const double* x, Complex v, bool& limited) const;

    GfmDroopParams params_;
    double p_star_ = 0.0;  // system base
    double q_star_ = 0.0;
    double e_set_ = 1.0;
};

/// Grid-forming converter, virtual-synchronous-machine outer loop.
/// States: δ, ω_v, Q_f.
class GfmVsm : public Device {
public:
    GfmVsm(std::string name, int bus_index, double f_nominal_hz, GfmVsmParams params);

    int state_count() const override { return 3; }
    void initialize(Complex v, double p, double q, double* x) override;
    void derivatives(const double* x, Complex v, const DeviceInputs& in,
                     double* dx) const override;
    void injection(const double* x, Complex v, double& p, double& q) const override;
    double inertia_weight() const override { return params_.h_v * params_.rating; }
    double speed(const double* x) const override { return x[1]; }
    void branch_signature(const double* x, Complex v, const DeviceInputs& in,
                          std::vector<int8_t>& sig) const override;
    void shift_reference(double dp) override { p_star_ += dp; }
    std::vector<std::string> channel_names() const override;
    void channel_values(const double* x, Complex v, const DeviceInputs& in,
                        double* out) const override;

    const GfmVsmParams& params() const { return params_; }

private:
    Complex internal_current(const double* x, Complex v, bool& limited) const;

    GfmVsmParams params_;
    double p_star_ = 0.0;  // system base
    double q_star_ = 0.0;
    double e_set_ = 1.0;
};

}  // namespace gridfreq
