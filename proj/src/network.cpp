#include "gridfreq/network.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "gridfreq/errors.hpp"

namespace gridfreq {

NetworkModel::NetworkModel(std::vector<Bus> buses, std::vector<Branch> branches,
                           std::vector<Load> loads, double s_base_mva, double f_nominal_hz)
    : buses_(std::move(buses)),
      branches_(std::move(branches)),
      loads_(std::move(loads)),
      s_base_(s_base_mva),
      f_nominal_(f_nominal_hz) {
    int slack_count = 0;
    for (int i = 0; i < bus_count(); ++i) {
        if (buses_[i].kind == BusKind::slack) {
            slack_index_ = i;
            ++slack_count;
        }
        if (buses_[i].voltage_mag <= 0.0)
            throw ConfigError("bus " + std::to_string(buses_[i].id) + ": voltage_mag must be > 0");
    }
    if (slack_count != 1)
        throw ConfigError("network needs exactly one slack bus, found " +
                          std::to_string(slack_count));
    for (const auto& load : loads_) {
        bus_index(load.bus);
        if (load.p_nominal < 0.0)
            throw ConfigError("load at bus " + std::to_string(load.bus) + ": p_nominal < 0");
        if (load.scale < 0.0)
            throw ConfigError("load at bus " + std::to_string(load.bus) + ": scale < 0");
    }
    ybus_ = build_ybus(buses_, branches_);
}

int NetworkModel::bus_index(int external_id) const {
    for (int i = 0; i < bus_count(); ++i)
        if (buses_[i].id == external_id) return i;
    throw ConfigError("unknown bus id " + std::to_string(external_id));
}

double NetworkModel::total_load_p() const {
    double total = 0.0;
    for (const auto& load : loads_)
        if (load.connected) total += load.p_nominal * load.scale;
    return total;
}

ComplexMatrix build_ybus(const std::vector<Bus>& buses, const std::vector<Branch>& branches) {
    const int n = static_cast<int>(buses.size());
    std::unordered_map<int, int> index;
    for (int i = 0; i < n; ++i) index[buses[i].id] = i;

    ComplexMatrix y = ComplexMatrix::Zero(n, n);
    for (const auto& br : branches) {
        auto from_it = index.find(br.from_bus);
        auto to_it = index.find(br.to_bus);
        if (from_it == index.end() || to_it == index.end())
            throw ConfigError("branch " + std::to_string(br.from_bus) + "-" +
                              std::to_string(br.to_bus) + " references a missing bus");
        if (br.from_bus == br.to_bus)
            throw ConfigError("branch endpoints must differ (bus " +
                              std::to_string(br.from_bus) + ")");
        if (br.reactance == 0.0)
            throw ConfigError("branch " + std::to_string(br.from_bus) + "-" +
                              std::to_string(br.to_bus) + ": reactance must be nonzero");

        const int i = from_it->second;
        const int j = to_it->second;
        const Complex y_series = 1.0 / Complex(br.resistance, br.reactance);
        const Complex y_shunt(0.0, br.shunt_susceptance / 2.0);
        const double a = br.tap_ratio != 0.0 ? br.tap_ratio : 1.0;

        // Tap on the from side; a=1 collapses to the plain pi model.
        y(i, i) += (y_series + y_shunt) / (a * a);
        y(j, j) += y_series + y_shunt;
        y(i, j) += -y_series / a;
        y(j, i) += -y_series / a;
    }
    return y;
}

void network_injections(const ComplexMatrix& ybus, const Eigen::VectorXd& v_mag,
                        const Eigen::VectorXd& v_ang, Eigen::VectorXd& p,
                        Eigen::VectorXd& q) {
    const int n = static_cast<int>(v_mag.size());
    p.setZero(n);
    q.setZero(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const Complex yij = ybus(i, j);
            if (yij == Complex(0, 0)) continue;
            const double dth = v_ang[i] - v_ang[j];
            const double g = yij.real(), b = yij.imag();
            p[i] += v_mag[i] * v_mag[j] * (g * std::cos(dth) + b * std::sin(dth));
            q[i] += v_mag[i] * v_mag[j] * (g * std::sin(dth) - b * std::cos(dth));
        }
    }
}

namespace {

struct PfWorkspace {
    Eigen::VectorXd v;      // magnitudes
    Eigen::VectorXd th;     // angles
    Eigen::VectorXd p_set;  // specified net injections
    Eigen::VectorXd q_set;
    std::vector<int> pv;    // bus indices
    std::vector<int> pq;
};

}  // namespace

PowerFlowSolution solve_power_flow(const NetworkModel& network,
                                   const std::vector<GeneratorSetpoint>& setpoints,
                                   const PowerFlowOptions& options) {
    const int n = network.bus_count();
    const ComplexMatrix& y = network.ybus();

    PfWorkspace w;
    w.v.setOnes(n);
    w.th.setZero(n);
    w.p_set.setZero(n);
    w.q_set.setZero(n);

    // Scheduled injections: generation minus load.
    for (const auto& sp : setpoints) {
        const int i = network.bus_index(sp.bus);
        w.p_set[i] += sp.p;
    }
    for (const auto& load : network.loads()) {
        if (!load.connected) continue;
        const int i = network.bus_index(load.bus);
        w.p_set[i] -= load.p_nominal * load.scale;
        w.q_set[i] -= load.q_nominal * load.scale;
    }

    const int slack = network.slack_index();
    for (int i = 0; i < n; ++i) {
        const Bus& bus = network.buses()[i];
        if (bus.kind == BusKind::pq) {
            w.pq.push_back(i);
        } else {
            if (i != slack) w.pv.push_back(i);
            w.v[i] = bus.voltage_mag;
        }
        if (!options.flat_start) {
            w.v[i] = bus.voltage_mag;
            w.th[i] = bus.voltage_ang;
        }
    }
    // Generator voltage setpoints override bus records when provided.
    for (const auto& sp : setpoints) {
        const int i = network.bus_index(sp.bus);
        if (network.buses()[i].kind != BusKind::pq) w.v[i] = sp.v_set;
    }

    // Unknown ordering: angles at all non-slack buses, then magnitudes at PQ buses.
    std::vector<int> ang_buses;
    for (int i = 0; i < n; ++i)
        if (i != slack) ang_buses.push_back(i);
    const int n_ang = static_cast<int>(ang_buses.size());
    const int n_mag = static_cast<int>(w.pq.size());
    const int dim = n_ang + n_mag;

    Eigen::VectorXd p_calc(n), q_calc(n);
    Eigen::VectorXd mismatch(dim);
    Eigen::MatrixXd jac(dim, dim);

    double max_mis = 0.0;
    int iter = 0;
    for (; iter < options.max_iterations; ++iter) {
        network_injections(y, w.v, w.th, p_calc, q_calc);

        for (int k = 0; k < n_ang; ++k) mismatch[k] = w.p_set[ang_buses[k]] - p_calc[ang_buses[k]];
        for (int k = 0; k < n_mag; ++k) mismatch[n_ang + k] = w.q_set[w.pq[k]] - q_calc[w.pq[k]];

        max_mis = dim > 0 ? mismatch.cwiseAbs().maxCoeff() : 0.0;
        if (max_mis < options.tolerance) break;

        // Standard polar Jacobian blocks.
        jac.setZero();
        auto dp_dth = [&](int i, int j) {
            if (i == j) return -q_calc[i] - w.v[i] * w.v[i] * y(i, i).imag();
            const double dth = w.th[i] - w.th[j];
            return w.v[i] * w.v[j] *
                   (y(i, j).real() * std::sin(dth) - y(i, j).imag() * std::cos(dth));
        };
        auto dp_dv = [&](int i, int j) {
            if (i == j) return p_calc[i] / w.v[i] + w.v[i] * y(i, i).real();
            const double dth = w.th[i] - w.th[j];
            return w.v[i] * (y(i, j).real() * std::cos(dth) + y(i, j).imag() * std::sin(dth));
        };
        auto dq_dth = [&](int i, int j) {
            if (i == j) return p_calc[i] - w.v[i] * w.v[i] * y(i, i).real();
            const double dth = w.th[i] - w.th[j];
            return -w.v[i] * w.v[j] *
                   (y(i, j).real() * std::cos(dth) + y(i, j).imag() * std::sin(dth));
        };
        auto dq_dv = [&](int i, int j) {
            if (i == j) return q_calc[i] / w.v[i] - w.v[i] * y(i, i).imag();
            const double dth = w.th[i] - w.th[j];
            return w.v[i] * (y(i, j).real() * std::sin(dth) - y(i, j).imag() * std::cos(dth));
        };

        for (int r = 0; r < n_ang; ++r) {
            for (int c = 0; c < n_ang; ++c) jac(r, c) = dp_dth(ang_buses[r], ang_buses[c]);
            for (int c = 0; c < n_mag; ++c) jac(r, n_ang + c) = dp_dv(ang_buses[r], w.pq[c]);
        }
        for (int r = 0; r < n_mag; ++r) {
            for (int c = 0; c < n_ang; ++c) jac(n_ang + r, c) = dq_dth(w.pq[r], ang_buses[c]);
            for (int c = 0; c < n_mag; ++c) jac(n_ang + r, n_ang + c) = dq_dv(w.pq[r], w.pq[c]);
        }

        Eigen::VectorXd dx = jac.partialPivLu().solve(mismatch);
        if (!dx.allFinite())
            throw InitializationError("power flow Jacobian solve produced non-finite step",
                                      max_mis);
        for (int k = 0; k < n_ang; ++k) w.th[ang_buses[k]] += dx[k];
        for (int k = 0; k < n_mag; ++k) w.v[w.pq[k]] += dx[n_ang + k];
    }

    if (max_mis >= options.tolerance)
        throw InitializationError("power flow did not converge after " +
                                      std::to_string(options.max_iterations) + " iterations",
                                  max_mis);

    network_injections(y, w.v, w.th, p_calc, q_calc);
    PowerFlowSolution sol;
    sol.v_mag = w.v;
    sol.v_ang = w.th;
    sol.p_inj = p_calc;
    sol.q_inj = q_calc;
    sol.iterations = iter;
    sol.max_mismatch = max_mis;
    return sol;
}

}  // namespace gridfreq
