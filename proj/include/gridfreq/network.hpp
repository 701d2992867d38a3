#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace gridfreq {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

enum class BusKind { slack, pv, pq };

struct Bus {
    int id = 0;  // external 1-based id
    double base_kv = 0.0;
    BusKind kind = BusKind::pq;
    double voltage_mag = 1.0;  // pu, setpoint for slack/pv
    double voltage_ang = 0.0;  // rad
};

struct Branch {
    int from_bus = 0;
    int to_bus = 0;
    double resistance = 0.0;        // pu
    double reactance = 0.0;         // pu, must be nonzero
    double shunt_susceptance = 0.0; // total line charging, pu
    double tap_ratio = 1.0;
};

struct Load {
    int bus = 0;
    double p_nominal = 0.0;  // pu on system base
    double q_nominal = 0.0;
    double scale = 1.0;      // multiplier driven by ramps/noise
    bool connected = true;
};

/// Fixed generator dispatch used by the power flow (PV/slack buses).
struct GeneratorSetpoint {
    int bus = 0;
    double p = 0.0;       // pu, ignored on the slack bus
    double v_set = 1.0;   // pu
};

struct PowerFlowSolution {
    Eigen::VectorXd v_mag;    // pu, per bus
    Eigen::VectorXd v_ang;    // rad, per bus
    Eigen::VectorXd p_inj;    // net injection at each bus, pu
    Eigen::VectorXd q_inj;
    int iterations = 0;
    double max_mismatch = 0.0;

    Complex voltage(int bus_index) const {
        return std::polar(v_mag[bus_index], v_ang[bus_index]);
    }
};

/// Static grid model: topology, admittance, loads. Immutable after
/// construction except load scale/connected flags.
class NetworkModel {
public:
    NetworkModel(std::vector<Bus> buses, std::vector<Branch> branches,
                 std::vector<Load> loads, double s_base_mva = 100.0,
                 double f_nominal_hz = 50.0);

    int bus_count() const { return static_cast<int>(buses_.size()); }
    int bus_index(int external_id) const;  // throws ConfigError if unknown

    const std::vector<Bus>& buses() const { return buses_; }
    const std::vector<Branch>& branches() const { return branches_; }
    const std::vector<Load>& loads() const { return loads_; }
    std::vector<Load>& loads() { return loads_; }
    const ComplexMatrix& ybus() const { return ybus_; }
    double s_base() const { return s_base_; }
    double f_nominal() const { return f_nominal_; }
    int slack_index() const { return slack_index_; }

    /// Total connected load at current scales, pu.
    double total_load_p() const;

private:
    std::vector<Bus> buses_;
    std::vector<Branch> branches_;
    std::vector<Load> loads_;
    double s_base_;
    double f_nominal_;
    int slack_index_ = -1;
    ComplexMatrix ybus_;
};

/// Standard nodal admittance assembly. Branch endpoints are bus indices
/// resolved against `buses`; throws ConfigError on dangling references.
ComplexMatrix build_ybus(const std::vector<Bus>& buses, const std::vector<Branch>& branches);

/// Net P/Q flowing from each bus into the network for the given voltage
/// profile (polar form). Shared by the power flow and the dynamic
/// algebraic equations.
void network_injections(const ComplexMatrix& ybus, const Eigen::VectorXd& v_mag,
                        const Eigen::VectorXd& v_ang, Eigen::VectorXd& p,
                        Eigen::VectorXd& q);

struct PowerFlowOptions {
    double tolerance = 1e-8;  // pu mismatch
    int max_iterations = 30;
    bool flat_start = true;
};

/// Newton-Raphson power flow in polar form. Loads are taken from the
/// network at their current scale; `setpoints` fixes PV/slack dispatch.
/// Throws InitializationError on non-convergence.
PowerFlowSolution solve_power_flow(const NetworkModel& network,
                                   const std::vector<GeneratorSetpoint>& setpoints,
                                   const PowerFlowOptions& options = {});

}  // namespace gridfreq
