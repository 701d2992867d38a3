#include "gridfreq/devices.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gridfreq/errors.hpp"

namespace gridfreq {

namespace {

constexpr double kMinVoltage = 0.01;  // converter model validity floor, pu

/// Rotate a network-frame phasor into a rotor frame at angle delta
/// (d-axis along sin, q-axis along cos of the rotor position).
void to_dq(Complex f, double delta, double& d, double& q) {
    const Complex r = f * std::polar(1.0, -(delta - std::numbers::pi / 2.0));
    d = r.real();
    q = r.imag();
}

int8_t clamp_side(double raw, double lo, double hi) {
    if (raw < lo) return -1;
    if (raw > hi) return 1;
    return 0;
}

int8_t band_side(double value, double band) {
    if (value > band) return 1;
    if (value < -band) return -1;
    return 0;
}

void require_voltage(Complex v, const std::string& name) {
    if (std::abs(v) < kMinVoltage)
        throw SimulationError(name + ": terminal voltage " + std::to_string(std::abs(v)) +
                              " pu is below the 0.01 pu model validity floor");
}

}  // namespace

double dead_band(double value, double band) {
    if (value > band) return value - band;
    if (value < -band) return value + band;
    return 0.0;
}

double governor_response(double delta_f_hz, double dead_band_hz, double droop,
                         double f_nominal_hz) {
    return -dead_band(delta_f_hz, dead_band_hz) / (f_nominal_hz * droop);
}

double vsm_swing_derivative(const GfmVsmParams& params, double p_e, double p_star,
                            double omega_v) {
    return (p_star - p_e - params.d_v * (omega_v - 1.0)) / (2.0 * params.h_v);
}

double gfm_droop_frequency(const GfmDroopParams& params, double p_f, double p_star) {
    return 1.0 + params.m_p * (p_star - p_f);
}

double mppt_power(double wind_speed, const MpptCurve& curve, double curtailment) {
    if (wind_speed < curve.v_cutin) return 0.0;
    if (wind_speed >= curve.v_rated) return curtailment * curve.p_rated;
    const double r = wind_speed / curve.v_rated;
    return curtailment * curve.p_rated * r * r * r;
}

double bess_pfc_power(double delta_f_hz, const GflBessParams& params, double f_nominal_hz) {
    const double cmd = governor_response(delta_f_hz, params.dead_band, params.droop,
                                         f_nominal_hz);
    return std::clamp(cmd, -params.rating, params.rating);
}

// ---------------------------------------------------------------------------
// SynchronousMachine
// ---------------------------------------------------------------------------

SynchronousMachine::SynchronousMachine(std::string name, int bus_index, double f_nominal_hz,
                                       MachineParams params)
    : Device(std::move(name), bus_index, f_nominal_hz), params_(params) {
    if (params_.h <= 0.0) throw ConfigError(name_ + ": inertia must be positive");
    if (params_.droop <= 0.0) throw ConfigError(name_ + ": droop must be positive");
    if (params_.dead_band < 0.0) throw ConfigError(name_ + ": dead-band must be nonnegative");
}

void SynchronousMachine::stator_currents(const double* x, Complex v, double& id, double& iq,
                                         double& vd, double& vq) const {
    to_dq(v, x[0], vd, vq);
    const double eq = x[2], ed = x[3];
    const double det = params_.ra * params_.ra + params_.xd_p * params_.xq_p;
    id = (params_.ra * (ed - vd) + params_.xq_p * (eq - vq)) / det;
    iq = (-params_.xd_p * (ed - vd) + params_.ra * (eq - vq)) / det;
}

double SynchronousMachine::mechanical_power(const double* x) const {
    return x[6] + (params_.t2 / params_.t3) * (x[5] - x[6]);
}

double SynchronousMachine::valve_target(const double* x, const DeviceInputs& in) const {
    const double df = (x[1] - 1.0) * f0_;
    const double raw = p_ref_ + in.agc_setpoint +
                       governor_response(df, params_.dead_band, params_.droop, f0_);
    return std::clamp(raw, params_.p_min, params_.p_max);
}

void SynchronousMachine::initialize(Complex v, double p, double q, double* x) {
    require_voltage(v, name_);
    const Complex s(p, q);
    const Complex i = std::conj(s / v);
    const Complex e_int = v + Complex(params_.ra, params_.xq) * i;
    const double delta = std::arg(e_int);

    double vd, vq, id, iq;
    to_dq(v, delta, vd, vq);
    to_dq(i, delta, id, iq);
    const double ed = vd + params_.ra * id - params_.xq_p * iq;
    const double eq = vq + params_.ra * iq + params_.xd_p * id;
    const double efd = eq + (params_.xd - params_.xd_p) * id;
    const double pm = ed * id + eq * iq + (params_.xq_p - params_.xd_p) * id * iq;

    if (pm < params_.p_min - 1e-9 || pm > params_.p_max + 1e-9)
        throw InitializationError(name_ + ": dispatch " + std::to_string(pm) +
                                  " pu is outside the valve limits");

    x[0] = delta;
    x[1] = 1.0;
    x[2] = eq;
    x[3] = ed;
    x[4] = efd;
    x[5] = pm;
    x[6] = pm;
    p_ref_ = pm;
    v_ref_ = std::abs(v) + efd / params_.ka;
}

void SynchronousMachine::derivatives(const double* x, Complex v, const DeviceInputs& in,
                                     double* dx) const {
    double id, iq, vd, vq;
    stator_currents(x, v, id, iq, vd, vq);
    const double pe = x[3] * id + x[2] * iq + (params_.xq_p - params_.xd_p) * id * iq;
    const double omega_base = 2.0 * std::numbers::pi * f0_;

    dx[0] = omega_base * (x[1] - 1.0);
    dx[1] = (mechanical_power(x) - pe - params_.d * (x[1] - 1.0)) / (2.0 * params_.h);
    dx[2] = (-x[2] - (params_.xd - params_.xd_p) * id + x[4]) / params_.td0_p;
    dx[3] = (-x[3] + (params_.xq - params_.xq_p) * iq) / params_.tq0_p;
    dx[4] = (params_.ka * (v_ref_ - std::abs(v)) - x[4]) / params_.ta;
    dx[5] = (valve_target(x, in) - x[5]) / params_.t1;
    dx[6] = (x[5] - x[6]) / params_.t3;
}

void SynchronousMachine::injection(const double* x, Complex v, double& p, double& q) const {
    double id, iq, vd, vq;
    stator_currents(x, v, id, iq, vd, vq);
    p = vd * id + vq * iq;
    q = vq * id - vd * iq;
}

void SynchronousMachine::branch_signature(const double* x, Complex /*v*/, const DeviceInputs& in,
                                          std::vector<int8_t>& sig) const {
    const double df = (x[1] - 1.0) * f0_;
    sig.push_back(band_side(df, params_.dead_band));
    const double raw = p_ref_ + in.agc_setpoint +
                       governor_response(df, params_.dead_band, params_.droop, f0_);
    sig.push_back(clamp_side(raw, params_.p_min, params_.p_max));
}

std::vector<std::string> SynchronousMachine::channel_names() const {
    return {name_ + "_p", name_ + "_q", name_ + "_omega", name_ + "_pm", name_ + "_agc"};
}

void SynchronousMachine::channel_values(const double* x, Complex v, const DeviceInputs& in,
                                        double* out) const {
    double p, q;
    injection(x, v, p, q);
    out[0] = p;
    out[1] = q;
    out[2] = x[1];
    out[3] = mechanical_power(x);
    out[4] = in.agc_setpoint;
}

// ---------------------------------------------------------------------------
// SynchronousCondenser
// ---------------------------------------------------------------------------

SynchronousCondenser::SynchronousCondenser(std::string name, int bus_index,
                                           double f_nominal_hz, CondenserParams params)
    : Device(std::move(name), bus_index, f_nominal_hz), params_(params) {
    if (params_.h <= 0.0) throw ConfigError(name_ + ": inertia must be positive");
}

void SynchronousCondenser::stator_currents(const double* x, Complex v, double& id, double& iq,
                                           double& vd, double& vq) const {
    to_dq(v, x[0], vd, vq);
    const double eq = x[2], ed = x[3];
    const double det = params_.ra * params_.ra + params_.xd_p * params_.xq_p;
    id = (params_.ra * (ed - vd) + params_.xq_p * (eq - vq)) / det;
    iq = (-params_.xd_p * (ed - vd) + params_.ra * (eq - vq)) / det;
}

void SynchronousCondenser::initialize(Complex v, double p, double q, double* x) {
    require_voltage(v, name_);
    if (std::abs(p) > 1e-9)
        throw InitializationError(name_ + ": condenser cannot be dispatched at " +
                                  std::to_string(p) + " pu active power");
    const Complex i = std::conj(Complex(0.0, q) / v);
    const Complex e_int = v + Complex(params_.ra, params_.xq) * i;
    const double delta = std::arg(e_int);

    double vd, vq, id, iq;
    to_dq(v, delta, vd, vq);
    to_dq(i, delta, id, iq);
    x[0] = delta;
    x[1] = 1.0;
    x[2] = vq + params_.ra * iq + params_.xd_p * id;
    x[3] = vd + params_.ra * id - params_.xq_p * iq;
    x[4] = x[2] + (params_.xd - params_.xd_p) * id;
    v_ref_ = std::abs(v) + x[4] / params_.ka;
}

void SynchronousCondenser::derivatives(const double* x, Complex v, const DeviceInputs& /*in*/,
                                       double* dx) const {
    double id, iq, vd, vq;
    stator_currents(x, v, id, iq, vd, vq);
    const double pe = x[3] * id + x[2] * iq + (params_.xq_p - params_.xd_p) * id * iq;
    const double omega_base = 2.0 * std::numbers::pi * f0_;

    dx[0] = omega_base * (x[1] - 1.0);
    dx[1] = (-pe - params_.d * (x[1] - 1.0)) / (2.0 * params_.h);
    dx[2] = (-x[2] - (params_.xd - params_.xd_p) * id + x[4]) / params_.td0_p;
    dx[3] = (-x[3] + (params_.xq - params_.xq_p) * iq) / params_.tq0_p;
    dx[4] = (params_.ka * (v_ref_ - std::abs(v)) - x[4]) / params_.ta;
}

void SynchronousCondenser::injection(const double* x, Complex v, double& p, double& q) const {
    double id, iq, vd, vq;
    stator_currents(x, v, id, iq, vd, vq);
    p = vd * id + vq * iq;
    q = vq * id - vd * iq;
}

std::vector<std::string> SynchronousCondenser::channel_names() const {
    return {name_ + "_p", name_ + "_q", name_ + "_omega"};
}

void SynchronousCondenser::channel_values(const double* x, Complex v, const DeviceInputs& /*in*/,
                                          double* out) const {
    double p, q;
    injection(x, v, p, q);
    out[0] = p;
    out[1] = q;
    out[2] = x[1];
}

// ---------------------------------------------------------------------------
// DfigWind
// ---------------------------------------------------------------------------

DfigWind::DfigWind(std::string name, int bus_index, double f_nominal_hz, DfigWindParams params)
    : Device(std::move(name), bus_index, f_nominal_hz), params_(params) {
    if (params_.curtailment <= 0.0 || params_.curtailment > 1.0)
        throw ConfigError(name_ + ": curtailment factor must be in (0, 1]");
    if (params_.dead_band < 0.0) throw ConfigError(name_ + ": dead-band must be nonnegative");
    if (params_.mppt.v_rated <= params_.mppt.v_cutin)
        throw ConfigError(name_ + ": rated wind speed must exceed cut-in");
}

double DfigWind::speed_reference(double wind_speed) const {
    return std::clamp(1.2 * wind_speed / params_.mppt.v_rated, 0.7, 1.2);
}

double DfigWind::pitch_reference(double wind_speed) const {
    const double raw = params_.pitch_gain * (wind_speed - params_.mppt.v_rated);
    return std::clamp(raw, 0.0, params_.pitch_max);
}

double DfigWind::power_order(double wind_speed, double f_filt_hz, double agc) const {
    const double base = mppt_power(wind_speed, params_.mppt, params_.curtailment);
    const double pfc = governor_response(f_filt_hz - f0_, params_.dead_band, params_.droop, f0_);
    const double ceiling = std::min(mppt_power(wind_speed, params_.mppt, 1.0), params_.rating);
    return std::clamp(base + p_bias_ + pfc + agc, 0.0, ceiling);
}

void DfigWind::initialize(Complex v, double p, double q, double* x) {
    require_voltage(v, name_);
    const double v0 = params_.v_wind0;
    const double base = mppt_power(v0, params_.mppt, params_.curtailment);
    p_bias_ = p - base;
    x[0] = speed_reference(v0);
    x[1] = pitch_reference(v0);
    x[2] = p;
    x[3] = q;
    x[4] = f0_;
    q0_ = q;
    v_set_ = std::abs(v);
    if (std::abs(power_order(v0, f0_, 0.0) - p) > 1e-12)
        throw InitializationError(name_ + ": dispatch " + std::to_string(p) +
                                  " pu cannot be held at wind speed " + std::to_string(v0));
}

void DfigWind::derivatives(const double* x, Complex v, const DeviceInputs& in,
                           double* dx) const {
    const double vw = in.wind_speed;
    dx[0] = (speed_reference(vw) - x[0]) / params_.t_speed;
    dx[1] = (pitch_reference(vw) - x[1]) / params_.t_pitch;
    dx[2] = (power_order(vw, x[4], in.agc_setpoint) - x[2]) / params_.t_power;
    const double q_target = q0_ + params_.kv * (v_set_ - std::abs(v));
    dx[3] = (q_target - x[3]) / params_.t_volt;
    dx[4] = (in.f_bus_hz - x[4]) / params_.t_freq;
}

void DfigWind::injection(const double* x, Complex v, double& p, double& q) const {
    require_voltage(v, name_);
    p = x[2];
    q = x[3];
}

void DfigWind::branch_signature(const double* x, Complex /*v*/, const DeviceInputs& in,
                                std::vector<int8_t>& sig) const {
    // Wind-speed curve regions (MPPT corner, pitch knee) are deliberately
    // left out: under noise they flip every few steps, and the chord
    // iteration absorbs the resulting mild Jacobian mismatch anyway.
    const double vw = in.wind_speed;
    sig.push_back(band_side(x[4] - f0_, params_.dead_band));
    const double base = mppt_power(vw, params_.mppt, params_.curtailment);
    const double pfc = governor_response(x[4] - f0_, params_.dead_band, params_.droop, f0_);
    const double ceiling = std::min(mppt_power(vw, params_.mppt, 1.0), params_.rating);
    sig.push_back(clamp_side(base + p_bias_ + pfc + in.agc_setpoint, 0.0, ceiling));
}

std::vector<std::string> DfigWind::channel_names() const {
    return {name_ + "_p", name_ + "_q", name_ + "_f", name_ + "_agc"};
}

void DfigWind::channel_values(const double* x, Complex /*v*/, const DeviceInputs& in,
                              double* out) const {
    out[0] = x[2];
    out[1] = x[3];
    out[2] = x[4];
    out[3] = in.agc_setpoint;
}

// ---------------------------------------------------------------------------
// GflBess
// ---------------------------------------------------------------------------

GflBess::GflBess(std::string name, int bus_index, double f_nominal_hz, GflBessParams params)
    : Device(std::move(name), bus_index, f_nominal_hz), params_(params) {
    if (params_.rating <= 0.0) throw ConfigError(name_ + ": rating must be positive");
    if (params_.t_power <= 0.0) throw ConfigError(name_ + ": response lag must be positive");
    if (params_.dead_band < 0.0) throw ConfigError(name_ + ": dead-band must be nonnegative");
}

void GflBess::initialize(Complex v, double p, double q, double* x) {
    require_voltage(v, name_);
    if (std::abs(p) > 1e-9 || std::abs(q) > 1e-9)
        throw InitializationError(name_ + ": battery must start idle, got dispatch " +
                                  std::to_string(p) + " + j" + std::to_string(q));
    x[0] = 0.0;
    x[1] = 0.0;
    x[2] = params_.energy0;
    x[3] = f0_;
    v_set_ = std::abs(v);
}

void GflBess::derivatives(const double* x, Complex v, const DeviceInputs& in,
                          double* dx) const {
    const double pfc = governor_response(x[3] - f0_, params_.dead_band, params_.droop, f0_);
    const double p_cmd = std::clamp(pfc + in.agc_setpoint, -params_.rating, params_.rating);
    const double q_cmd = std::clamp(params_.kv * (v_set_ - std::abs(v)), -params_.rating,
                                    params_.rating);
    dx[0] = (p_cmd - x[0]) / params_.t_power;
    dx[1] = (q_cmd - x[1]) / params_.t_power;
    dx[2] = -x[0] / 3600.0;
    dx[3] = (in.f_bus_hz - x[3]) / params_.t_freq;
}

void GflBess::injection(const double* x, Complex v, double& p, double& q) const {
    require_voltage(v, name_);
    p = x[0];
    q = x[1];
}

void GflBess::branch_signature(const double* x, Complex v, const DeviceInputs& in,
                               std::vector<int8_t>& sig) const {
    sig.push_back(band_side(x[3] - f0_, params_.dead_band));
    const double pfc = governor_response(x[3] - f0_, params_.dead_band, params_.droop, f0_);
    sig.push_back(clamp_side(pfc + in.agc_setpoint, -params_.rating, params_.rating));
    sig.push_back(clamp_side(params_.kv * (v_set_ - std::abs(v)), -params_.rating,
                             params_.rating));
}

std::vector<std::string> GflBess::channel_names() const {
    return {name_ + "_p", name_ + "_q", name_ + "_e", name_ + "_f"};
}

void GflBess::channel_values(const double* x, Complex /*v*/, const DeviceInputs& /*in*/,
                             double* out) const {
    out[0] = x[0];
    out[1] = x[1];
    out[2] = x[2];
    out[3] = x[3];
}

// ---------------------------------------------------------------------------
// GfmDroop
// ---------------------------------------------------------------------------

GfmDroop::GfmDroop(std::string name, int bus_index, double f_nominal_hz, GfmDroopParams params)
    : Device(std::move(name), bus_index, f_nominal_hz), params_(params) {
    if (params_.m_p <= 0.0) throw ConfigError(name_ + ": droop gain must be positive");
    if (params_.t_filter <= 0.0) throw ConfigError(name_ + ": filter time must be positive");
    if (params_.rating <= 0.0) throw ConfigError(name_ + ": rating must be positive");
}

Complex GfmDroop::internal_current(const double* x, Complex v, bool& limited) const {
    const double e_mag = e_set_ + (params_.m_q / params_.rating) * (q_star_ - x[2]);
    const Complex e = std::polar(e_mag, x[0]);
    const Complex z(params_.rs / params_.rating, params_.xs / params_.rating);
    Complex i = (e - v) / z;
    const double i_max = params_.i_max * params_.rating;
    limited = std::abs(i) > i_max;
    if (limited) i *= i_max / std::abs(i);
    return i;
}

double GfmDroop::internal_speed(const double* x, double agc) const {
    return 1.0 + (params_.m_p / params_.rating) * (p_star_ + agc - x[1]);
}

void GfmDroop::initialize(Complex v, double p, double q, double* x) {
    require_voltage(v, name_);
    const Complex i = std::conj(Complex(p, q) / v);
    if (std::abs(i) > params_.i_max * params_.rating)
        throw InitializationError(name_ + ": dispatch current exceeds the converter limit");
    const Complex z(params_.rs / params_.rating, params_.xs / params_.rating);
    const Complex e = v + z * i;
    x[0] = std::arg(e);
    x[1] = p;
    x[2] = q;
    e_set_ = std::abs(e);
    p_star_ = p;
    q_star_ = q;
}

void GfmDroop::derivatives(const double* x, Complex v, const DeviceInputs& in,
                           double* dx) const {
    double p, q;
    injection(x, v, p, q);
    const double omega = internal_speed(x, in.agc_setpoint);
    dx[0] = 2.0 * std::numbers::pi * f0_ * (omega - 1.0);
    dx[1] = (p - x[1]) / params_.t_filter;
    dx[2] = (q - x[2]) / params_.t_filter;
}

void GfmDroop::injection(const double* x, Complex v, double& p, double& q) const {
    require_voltage(v, name_);
    bool limited = false;
    const Complex i = internal_current(x, v, limited);
    const Complex s = v * std::conj(i);
    p = s.real();
    q = s.imag();
}

void GfmDroop::branch_signature(const double* x, Complex v, const DeviceInputs& /*in*/,
                                std::vector<int8_t>& sig) const {
    bool limited = false;
    internal_current(x, v, limited);
    sig.push_back(limited ? 1 : 0);
}

std::vector<std::string> GfmDroop::channel_names() const {
    return {name_ + "_p", name_ + "_q", name_ + "_omega", name_ + "_agc"};
}

void GfmDroop::channel_values(const double* x, Complex v, const DeviceInputs& in,
                              double* out) const {
    double p, q;
    injection(x, v, p, q);
    out[0] = p;
    out[1] = q;
    out[2] = internal_speed(x, in.agc_setpoint);
    out[3] = in.agc_setpoint;
}

// ---------------------------------------------------------------------------
// GfmVsm
// ---------------------------------------------------------------------------

GfmVsm::GfmVsm(std::string name, int bus_index, double f_nominal_hz, GfmVsmParams params)
    : Device(std::move(name), bus_index, f_nominal_hz), params_(params) {
    if (params_.h_v <= 0.0) throw ConfigError(name_ + ": virtual inertia must be positive");
    if (params_.d_v < 0.0) throw ConfigError(name_ + ": virtual damping must be nonnegative");
    if (params_.rating <= 0.0) throw ConfigError(name_ + ": rating must be positive");
}

Complex GfmVsm::internal_current(const double* x, Complex v, bool& limited) const {
    const double e_mag = e_set_ + (params_.m_q / params_.rating) * (q_star_ - x[2]);
    const Complex e = std::polar(e_mag, x[0]);
    const Complex z(params_.rs / params_.rating, params_.xs / params_.rating);
    Complex i = (e - v) / z;
    const double i_max = params_.i_max * params_.rating;
    limited = std::abs(i) > i_max;
    if (limited) i *= i_max / std::abs(i);
    return i;
}

void GfmVsm::initialize(Complex v, double p, double q, double* x) {
    require_voltage(v, name_);
    const Complex i = std::conj(Complex(p, q) / v);
    if (std::abs(i) > params_.i_max * params_.rating)
        throw InitializationError(name_ + ": dispatch current exceeds the converter limit");
    const Complex z(params_.rs / params_.rating, params_.xs / params_.rating);
    const Complex e = v + z * i;
    x[0] = std::arg(e);
    x[1] = 1.0;
    x[2] = q;
    e_set_ = std::abs(e);
    p_star_ = p;
    q_star_ = q;
}

void GfmVsm::derivatives(const double* x, Complex v, const DeviceInputs& in,
                         double* dx) const {
    double p, q;
    injection(x, v, p, q);
    const double p_dev = (p_star_ + in.agc_setpoint - p) / params_.rating;
    dx[0] = 2.0 * std::numbers::pi * f0_ * (x[1] - 1.0);
    dx[1] = (p_dev - params_.d_v * (x[1] - 1.0)) / (2.0 * params_.h_v);
    dx[2] = (q - x[2]) / params_.t_filter;
}

void GfmVsm::injection(const double* x, Complex v, double& p, double& q) const {
    require_voltage(v, name_);
    bool limited = false;
    const Complex i = internal_current(x, v, limited);
    const Complex s = v * std::conj(i);
    p = s.real();
    q = s.imag();
}

void GfmVsm::branch_signature(const double* x, Complex v, const DeviceInputs& /*in*/,
                              std::vector<int8_t>& sig) const {
    bool limited = false;
    internal_current(x, v, limited);
    sig.push_back(limited ? 1 : 0);
}

std::vector<std::string> GfmVsm::channel_names() const {
    return {name_ + "_p", name_ + "_q", name_ + "_omega", name_ + "_agc"};
}

void GfmVsm::channel_values(const double* x, Complex v, const DeviceInputs& in,
                            double* out) const {
    double p, q;
    injection(x, v, p, q);
    out[0] = p;
    out[1] = q;
    out[2] = x[1];
    out[3] = in.agc_setpoint;
}

}  // namespace gridfreq
