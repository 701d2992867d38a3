#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gridfreq/grid_system.hpp"

namespace gridfreq {

enum class GfmKind { none, vsm, droop };
enum class StudyKind { contingency, longterm };

/// A scheduled disturbance in catalog form; bound to integrator callbacks
/// at run assembly.
struct EventSpec {
    double time = 0.0;
    std::string kind;        // load_loss | load_reconnect | setpoint_step
    int bus = -1;            // load events
    std::string unit;        // setpoint_step target
    double magnitude = 0.0;  // pu; informational for load events
};

/// One catalog row: device mix, dead-bands, disturbance switches and the
/// secondary-control participation for each AGC variant.
struct ScenarioConfig {
    int index = 0;
    std::string name;
    bool has_wind = false;
    bool has_condenser = false;
    bool has_bess = false;
    GfmKind gfm = GfmKind::none;
    bool apc_on = false;
    double fdb_conv_hz = 0.015;
    double fdb_wind_hz = 0.0;
    double fdb_bess_hz = 0.0;
    bool load_noise = true;
    bool wind_noise = false;
    bool load_ramps = true;
    bool wind_ramps = false;
    std::vector<std::string> agc_without;  // group tokens: conv | wind | gfm
    std::vector<std::string> agc_with;
    // Scenario-specific parameter tuning, applied over the shared defaults.
    std::vector<std::pair<std::string, double>> parameter_overrides;
};

/// Every tunable shared by the catalog, adjustable per run through
/// "section.field=value" assignments (see parameter_keys()).
struct ParameterSet {
    MachineParams machine;
    CondenserParams condenser;
    DfigWindParams wind;
    GflBessParams bess;
    GfmDroopParams gfm_droop;
    GfmVsmParams gfm_vsm;
    NoiseConfig noise;
    double agc_k_i = 0.05;     // pu per Hz·s
    double agc_period_s = 2.0;
    double agc_windup = 1.5;   // pu
    double t_washout = 0.05;   // bus frequency estimator, s
    std::optional<bool> force_load_noise;  // study-independent switches
    std::optional<bool> force_wind_noise;

    /// Set one dotted key ("wind.droop"); unknown keys raise a
    /// configuration error listing the valid ones.
    void set(const std::string& key, double value);
    /// Parse and apply one "key=value" assignment.
    void apply(const std::string& assignment);
};
std::vector<std::string> parameter_keys();

/// Assembly knobs for one run.
struct BuildOptions {
    bool agc_on = false;
    StudyKind study = StudyKind::contingency;
    uint64_t seed = 0;
    std::optional<double> horizon_s;
    std::optional<double> dt_s;
    bool full_24h = false;
    std::vector<std::string> overrides;  // "section.field=value"
};

/// A fully assembled, initialized run ready for the integrator.
struct ScenarioRun {
    std::string label;  // file stem, e.g. "05-gfl-bess-200-mhz-with-agc"
    std::string scenario_name;
    bool agc_on = false;
    StudyKind study = StudyKind::contingency;
    uint64_t seed = 0;
    std::unique_ptr<GridSystem> system;
    IntegrationConfig config;
    std::vector<EventSpec> schedule;
    double event_time = 0.0;  // earliest scheduled event; 0 when none
};

/// Catalog loader: reads the grid fixture, the per-scenario files and the
/// daily ramp shapes from one data directory.
class ScenarioLibrary {
public:
    explicit ScenarioLibrary(std::string data_dir = default_data_dir());

    const std::vector<ScenarioConfig>& scenarios() const { return scenarios_; }

    /// Match by full name or leading index ("9", "9 - GFM Droop"); the
    /// error for unknown names lists the whole catalog.
    const ScenarioConfig& find(const std::string& name_or_index) const;

    ScenarioRun build(const ScenarioConfig& config, const BuildOptions& options) const;
    ScenarioRun build(const std::string& name_or_index, const BuildOptions& options) const {
        return build(find(name_or_index), options);
    }

    /// Fresh copy of the grid fixture (buses, branches, loads).
    NetworkModel make_network() const;
    const std::vector<GeneratorSetpoint>& setpoints() const { return setpoints_; }

    /// GRIDFREQ_DATA if set, else the directory this build was configured with.
    static std::string default_data_dir();

private:
    struct MachineElectrical {
        double h = 0, ra = 0, xd = 0, xq = 0, xd_p = 0, xq_p = 0, td0_p = 0, tq0_p = 0;
    };

    std::string dir_;
    double s_base_ = 100.0;
    double f_nominal_ = 50.0;
    std::vector<Bus> buses_;
    std::vector<Branch> branches_;
    std::vector<Load> loads_;
    std::vector<GeneratorSetpoint> setpoints_;
    std::vector<std::pair<int, MachineElectrical>> machines_;  // by bus id
    RampProfile load_ramp_24h_;
    RampProfile wind_ramp_24h_;
    std::vector<ScenarioConfig> scenarios_;
    std::vector<std::pair<std::string, double>> default_params_;  // defaults.json
};

/// The standard disturbance study: full loss of the bus-6 load at t = 1 s.
std::vector<EventSpec> contingency_schedule(const NetworkModel& network,
                                            double event_time = 1.0);

/// Resolve catalog events against a live system.
std::vector<TimedEvent> bind_events(GridSystem& system,
                                    const std::vector<EventSpec>& schedule);

std::string scenario_label(const ScenarioConfig& config, bool agc_on);

}  // namespace gridfreq
