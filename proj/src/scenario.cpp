#include "gridfreq/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "json.hpp"

#include "gridfreq/errors.hpp"

namespace gridfreq {

namespace {

using nlohmann::json;

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    try {
        return json::parse(in, nullptr, true, true);  // allow comments
    } catch (const json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

RampProfile parse_ramp(const json& arr, const std::string& where) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& entry : arr) {
        if (!entry.is_array() || entry.size() != 2)
            throw ConfigError(where + ": ramp breakpoints must be [time, level] pairs");
        pts.emplace_back(entry[0].get<double>(), entry[1].get<double>());
    }
    return RampProfile(std::move(pts));
}

/// Lowercase alphanumerics only; everything else (including multi-byte
/// symbols) is dropped, so "±15 mHz" and "15 mhz" compare equal.
std::string canonical(const std::string& s) {
    std::string out;
    for (const unsigned char c : s)
        if (std::isalnum(c)) out.push_back(static_cast<char>(std::tolower(c)));
    return out;
}

/// Every numeric override target. Some keys fan out to several fields
/// (shared GFM electrical parameters).
std::vector<std::pair<std::string, std::vector<double*>>> numeric_keys(ParameterSet& p) {
    return {
        {"machine.droop", {&p.machine.droop}},
        {"machine.dead_band", {&p.machine.dead_band}},
        {"machine.damping", {&p.machine.d}},
        {"machine.ka", {&p.machine.ka}},
        {"machine.ta", {&p.machine.ta}},
        {"machine.t1", {&p.machine.t1}},
        {"machine.t2", {&p.machine.t2}},
        {"machine.t3", {&p.machine.t3}},
        {"machine.p_min", {&p.machine.p_min}},
        {"machine.p_max", {&p.machine.p_max}},
        {"condenser.h", {&p.condenser.h}},
        {"condenser.damping", {&p.condenser.d}},
        {"condenser.ka", {&p.condenser.ka}},
        {"condenser.ta", {&p.condenser.ta}},
        {"wind.rating", {&p.wind.rating}},
        {"wind.v_rated", {&p.wind.mppt.v_rated}},
        {"wind.v_cutin", {&p.wind.mppt.v_cutin}},
        {"wind.p_mppt_rated", {&p.wind.mppt.p_rated}},
        {"wind.v_wind0", {&p.wind.v_wind0}},
        {"wind.curtailment", {&p.wind.curtailment}},
        {"wind.droop", {&p.wind.droop}},
        {"wind.dead_band", {&p.wind.dead_band}},
        {"wind.t_power", {&p.wind.t_power}},
        {"wind.t_speed", {&p.wind.t_speed}},
        {"wind.t_pitch", {&p.wind.t_pitch}},
        {"wind.pitch_gain", {&p.wind.pitch_gain}},
        {"wind.pitch_max", {&p.wind.pitch_max}},
        {"wind.t_freq", {&p.wind.t_freq}},
        {"wind.kv", {&p.wind.kv}},
        {"wind.t_volt", {&p.wind.t_volt}},
        {"bess.rating", {&p.bess.rating}},
        {"bess.droop", {&p.bess.droop}},
        {"bess.dead_band", {&p.bess.dead_band}},
        {"bess.t_power", {&p.bess.t_power}},
        {"bess.kv", {&p.bess.kv}},
        {"bess.t_freq", {&p.bess.t_freq}},
        {"bess.energy0", {&p.bess.energy0}},
        {"gfm.rating", {&p.gfm_droop.rating, &p.gfm_vsm.rating}},
        {"gfm.m_p", {&p.gfm_droop.m_p}},
        {"gfm.m_q", {&p.gfm_droop.m_q, &p.gfm_vsm.m_q}},
        {"gfm.t_filter", {&p.gfm_droop.t_filter, &p.gfm_vsm.t_filter}},
        {"gfm.rs", {&p.gfm_droop.rs, &p.gfm_vsm.rs}},
        {"gfm.xs", {&p.gfm_droop.xs, &p.gfm_vsm.xs}},
        {"gfm.i_max", {&p.gfm_droop.i_max, &p.gfm_vsm.i_max}},
        {"vsm.h_v", {&p.gfm_vsm.h_v}},
        {"vsm.d_v", {&p.gfm_vsm.d_v}},
        {"noise.load_alpha", {&p.noise.load_alpha}},
        {"noise.load_std", {&p.noise.load_std}},
        {"noise.wind_alpha", {&p.noise.wind_alpha}},
        {"noise.wind_std_frac", {&p.noise.wind_std_frac}},
        {"agc.k_i", {&p.agc_k_i}},
        {"agc.period", {&p.agc_period_s}},
        {"agc.windup", {&p.agc_windup}},
        {"system.t_washout", {&p.t_washout}},
    };
}

constexpr const char* kSwitchKeys[] = {"noise.load_on", "noise.wind_on"};

/// Flatten a nested {"section": {"field": number}} document into dotted
/// (key, value) pairs, rejecting anything that is not a known parameter.
std::vector<std::pair<std::string, double>> flatten_parameters(const json& doc,
                                                               const std::string& where) {
    ParameterSet probe;
    const auto known = numeric_keys(probe);
    auto is_known = [&](const std::string& key) {
        for (const auto& [name, targets] : known)
            if (name == key) return true;
        for (const char* k : kSwitchKeys)
            if (key == k) return true;
        return false;
    };
    std::vector<std::pair<std::string, double>> out;
    for (const auto& [section, body] : doc.items()) {
        if (!body.is_object())
            throw ConfigError(where + ": '" + section + "' must be an object of fields");
        for (const auto& [field, value] : body.items()) {
            const std::string key = section + "." + field;
            if (!is_known(key))
                throw ConfigError(where + ": unknown parameter '" + key + "'");
            if (!value.is_number())
                throw ConfigError(where + ": parameter '" + key + "' must be a number");
            out.emplace_back(key, value.get<double>());
        }
    }
    return out;
}

}  // namespace

void ParameterSet::set(const std::string& key, double value) {
    if (key == "noise.load_on") {
        force_load_noise = value != 0.0;
        return;
    }
    if (key == "noise.wind_on") {
        force_wind_noise = value != 0.0;
        return;
    }
    for (auto& [name, targets] : numeric_keys(*this)) {
        if (name != key) continue;
        for (double* field : targets) *field = value;
        return;
    }
    std::string known;
    for (const auto& k : parameter_keys()) known += "\n  " + k;
    throw ConfigError("unknown parameter '" + key + "'; valid keys:" + known);
}

void ParameterSet::apply(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ConfigError("override '" + assignment + "' is not of the form key=value");
    const std::string text = assignment.substr(eq + 1);
    double value = 0.0;
    try {
        size_t used = 0;
        value = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
    } catch (const std::exception&) {
        throw ConfigError("override '" + assignment + "': value is not a number");
    }
    set(assignment.substr(0, eq), value);
}

std::vector<std::string> parameter_keys() {
    ParameterSet tmp;
    std::vector<std::string> keys;
    for (const auto& [name, targets] : numeric_keys(tmp)) keys.push_back(name);
    for (const char* k : kSwitchKeys) keys.push_back(k);
    return keys;
}

std::string ScenarioLibrary::default_data_dir() {
    if (const char* env = std::getenv("GRIDFREQ_DATA")) return env;
#ifdef GRIDFREQ_DATA_DIR
    return GRIDFREQ_DATA_DIR;
#else
    return "data";
#endif
}

ScenarioLibrary::ScenarioLibrary(std::string data_dir) : dir_(std::move(data_dir)) {
    const json grid = read_json_file(dir_ + "/ieee9.json");
    s_base_ = grid.at("s_base_mva").get<double>();
    f_nominal_ = grid.at("f_nominal_hz").get<double>();
    for (const auto& jb : grid.at("buses")) {
        Bus bus;
        bus.id = jb.at("id").get<int>();
        bus.base_kv = jb.at("base_kv").get<double>();
        const std::string kind = jb.at("kind").get<std::string>();
        if (kind == "slack")
            bus.kind = BusKind::slack;
        else if (kind == "pv")
            bus.kind = BusKind::pv;
        else if (kind == "pq")
            bus.kind = BusKind::pq;
        else
            throw ConfigError("bus " + std::to_string(bus.id) + ": unknown kind '" + kind + "'");
        bus.voltage_mag = jb.at("v").get<double>();
        buses_.push_back(bus);
    }
    for (const auto& jl : grid.at("branches")) {
        Branch br;
        br.from_bus = jl.at("from").get<int>();
        br.to_bus = jl.at("to").get<int>();
        br.resistance = jl.at("r").get<double>();
        br.reactance = jl.at("x").get<double>();
        br.shunt_susceptance = jl.at("b").get<double>();
        br.tap_ratio = jl.value("tap", 1.0);
        branches_.push_back(br);
    }
    for (const auto& jl : grid.at("loads")) {
        Load load;
        load.bus = jl.at("bus").get<int>();
        load.p_nominal = jl.at("p").get<double>();
        load.q_nominal = jl.at("q").get<double>();
        loads_.push_back(load);
    }
    for (const auto& js : grid.at("setpoints")) {
        GeneratorSetpoint sp;
        sp.bus = js.at("bus").get<int>();
        sp.p = js.value("p", 0.0);
        sp.v_set = js.at("v").get<double>();
        setpoints_.push_back(sp);
    }
    for (const auto& jm : grid.at("machines")) {
        MachineElectrical me;
        const int bus = jm.at("bus").get<int>();
        me.h = jm.at("h").get<double>();
        me.ra = jm.value("ra", 0.0);
        me.xd = jm.at("xd").get<double>();
        me.xq = jm.at("xq").get<double>();
        me.xd_p = jm.at("xd_p").get<double>();
        me.xq_p = jm.at("xq_p").get<double>();
        me.td0_p = jm.at("td0_p").get<double>();
        me.tq0_p = jm.at("tq0_p").get<double>();
        machines_.emplace_back(bus, me);
    }

    const std::string defaults_path = dir_ + "/scenarios/defaults.json";
    json defaults = read_json_file(defaults_path);
    const std::string ramps_file = defaults.value("ramps_file", "ramps/default_24h.json");
    defaults.erase("ramps_file");
    defaults.erase("comment");
    default_params_ = flatten_parameters(defaults, defaults_path);

    const json ramps = read_json_file(dir_ + "/" + ramps_file);
    load_ramp_24h_ = parse_ramp(ramps.at("load"), "load ramp");
    wind_ramp_24h_ = parse_ramp(ramps.at("wind"), "wind ramp");

    namespace fs = std::filesystem;
    const fs::path scen_dir = fs::path(dir_) / "scenarios";
    if (!fs::is_directory(scen_dir))
        throw ConfigError("scenario directory " + scen_dir.string() + " not found");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(scen_dir)) {
        const std::string stem = entry.path().filename().string();
        if (stem.rfind("scenario", 0) == 0 && entry.path().extension() == ".json")
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
        const json js = read_json_file(file.string());
        ScenarioConfig cfg;
        cfg.index = js.at("index").get<int>();
        cfg.name = js.at("name").get<std::string>();
        const json& dev = js.at("devices");
        cfg.has_wind = dev.at("wind").get<bool>();
        cfg.has_condenser = dev.at("condenser").get<bool>();
        cfg.has_bess = dev.at("bess").get<bool>();
        const std::string gfm = dev.at("gfm").get<std::string>();
        if (gfm == "none")
            cfg.gfm = GfmKind::none;
        else if (gfm == "vsm")
            cfg.gfm = GfmKind::vsm;
        else if (gfm == "droop")
            cfg.gfm = GfmKind::droop;
        else
            throw ConfigError(file.string() + ": unknown gfm kind '" + gfm + "'");
        cfg.apc_on = js.at("apc").get<bool>();
        const json& db = js.at("dead_bands_mhz");
        cfg.fdb_conv_hz = db.at("conv").get<double>() * 1e-3;
        cfg.fdb_wind_hz = db.at("wind").get<double>() * 1e-3;
        cfg.fdb_bess_hz = db.at("bess").get<double>() * 1e-3;
        cfg.load_noise = js.at("noise").at("load").get<bool>();
        cfg.wind_noise = js.at("noise").at("wind").get<bool>();
        cfg.load_ramps = js.at("ramps").at("load").get<bool>();
        cfg.wind_ramps = js.at("ramps").at("wind").get<bool>();
        cfg.agc_without = js.at("agc_units").at("without_agc").get<std::vector<std::string>>();
        cfg.agc_with = js.at("agc_units").at("with_agc").get<std::vector<std::string>>();
        if (js.contains("parameters"))
            cfg.parameter_overrides = flatten_parameters(js.at("parameters"), file.string());
        if (cfg.fdb_conv_hz < 0 || cfg.fdb_wind_hz < 0 || cfg.fdb_bess_hz < 0)
            throw ConfigError(file.string() + ": dead-bands must be nonnegative");
        if (cfg.wind_noise && !cfg.has_wind)
            throw ConfigError(file.string() + ": wind noise without a wind plant");
        scenarios_.push_back(std::move(cfg));
    }
    if (scenarios_.empty()) throw ConfigError("no scenario files in " + scen_dir.string());
    std::sort(scenarios_.begin(), scenarios_.end(),
              [](const ScenarioConfig& a, const ScenarioConfig& b) { return a.index < b.index; });
    for (size_t i = 0; i + 1 < scenarios_.size(); ++i)
        if (scenarios_[i].index == scenarios_[i + 1].index)
            throw ConfigError("duplicate scenario index " + std::to_string(scenarios_[i].index));
}

const ScenarioConfig& ScenarioLibrary::find(const std::string& name_or_index) const {
    const std::string wanted = canonical(name_or_index);
    for (const auto& cfg : scenarios_) {
        if (wanted == std::to_string(cfg.index) || wanted == canonical(cfg.name))
            return cfg;
    }
    std::string names;
    for (const auto& cfg : scenarios_) names += "\n  " + cfg.name;
    throw ConfigError("unknown scenario '" + name_or_index + "'; valid scenarios:" + names);
}

NetworkModel ScenarioLibrary::make_network() const {
    return NetworkModel(buses_, branches_, loads_, s_base_, f_nominal_);
}

std::string scenario_label(const ScenarioConfig& config, bool agc_on) {
    // "5 - GFL BESS ±200 mHz" -> "05-gfl-bess-200-mhz-with-agc"
    std::string body;
    size_t start = 0;
    while (start < config.name.size() &&
           (std::isdigit(static_cast<unsigned char>(config.name[start])) ||
            config.name[start] == ' ' || config.name[start] == '-'))
        ++start;
    for (size_t i = start; i < config.name.size(); ++i) {
        const unsigned char c = static_cast<unsigned char>(config.name[i]);
        if (std::isalnum(c))
            body.push_back(static_cast<char>(std::tolower(c)));
        else if (!body.empty() && body.back() != '-')
            body.push_back('-');
    }
    while (!body.empty() && body.back() == '-') body.pop_back();
    char head[8];
    std::snprintf(head, sizeof head, "%02d-", config.index);
    return head + body + (agc_on ? "-with-agc" : "-without-agc");
}

std::vector<EventSpec> contingency_schedule(const NetworkModel& network,
                                            double event_time) {
    EventSpec ev;
    ev.time = event_time;
    ev.kind = "load_loss";
    ev.bus = 6;
    for (const auto& load : network.loads())
        if (load.bus == ev.bus && load.connected) ev.magnitude = load.p_nominal * load.scale;
    if (ev.magnitude == 0.0)
        throw ConfigError("the grid fixture has no connected load at bus 6");
    return {ev};
}

std::vector<TimedEvent> bind_events(GridSystem& system,
                                    const std::vector<EventSpec>& schedule) {
    std::vector<TimedEvent> events;
    for (const auto& spec : schedule) {
        TimedEvent ev;
        ev.time = spec.time;
        if (spec.kind == "load_loss") {
            ev.label = "load_loss@bus" + std::to_string(spec.bus);
            ev.apply = [&system, bus = spec.bus] { system.disconnect_load(bus); };
        } else if (spec.kind == "load_reconnect") {
            ev.label = "load_reconnect@bus" + std::to_string(spec.bus);
            ev.apply = [&system, bus = spec.bus] { system.reconnect_load(bus); };
        } else if (spec.kind == "setpoint_step") {
            ev.label = "setpoint_step@" + spec.unit;
            ev.apply = [&system, unit = spec.unit, dp = spec.magnitude] {
                system.device(unit).shift_reference(dp);
            };
        } else {
            throw ConfigError("unknown event kind '" + spec.kind + "'");
        }
        events.push_back(std::move(ev));
    }
    return events;
}

ScenarioRun ScenarioLibrary::build(const ScenarioConfig& cfg,
                                   const BuildOptions& options) const {
    ParameterSet params;
    // Condenser electrical data mirrors the bus-2 machine ("same inertia");
    // the shared defaults, the scenario and the CLI can still override it.
    for (const auto& [bus, me] : machines_) {
        if (bus != 2) continue;
        params.condenser.h = me.h;
        params.condenser.ra = me.ra;
        params.condenser.xd = me.xd;
        params.condenser.xq = me.xq;
        params.condenser.xd_p = me.xd_p;
        params.condenser.xq_p = me.xq_p;
        params.condenser.td0_p = me.td0_p;
        params.condenser.tq0_p = me.tq0_p;
    }
    for (const auto& [key, value] : default_params_) params.set(key, value);
    params.machine.dead_band = cfg.fdb_conv_hz;
    params.wind.dead_band = cfg.fdb_wind_hz;
    params.wind.apc = cfg.apc_on;
    params.bess.dead_band = cfg.fdb_bess_hz;
    for (const auto& [key, value] : cfg.parameter_overrides) params.set(key, value);
    for (const auto& assignment : options.overrides) params.apply(assignment);

    NetworkModel net = make_network();

    auto machine_electrical = [&](int bus) -> const MachineElectrical& {
        for (const auto& [b, me] : machines_)
            if (b == bus) return me;
        throw ConfigError("no machine data for bus " + std::to_string(bus));
    };
    auto make_machine = [&](int bus) {
        const MachineElectrical& me = machine_electrical(bus);
        MachineParams mp = params.machine;
        mp.h = me.h;
        mp.ra = me.ra;
        mp.xd = me.xd;
        mp.xq = me.xq;
        mp.xd_p = me.xd_p;
        mp.xq_p = me.xq_p;
        mp.td0_p = me.td0_p;
        mp.tq0_p = me.tq0_p;
        return std::make_unique<SynchronousMachine>("machine" + std::to_string(bus),
                                                    net.bus_index(bus), f_nominal_, mp);
    };

    std::vector<std::unique_ptr<Device>> devices;
    std::vector<std::string> conv_units;
    devices.push_back(make_machine(1));
    conv_units.push_back("machine1");
    if (cfg.gfm == GfmKind::none) {
        devices.push_back(make_machine(2));
        conv_units.push_back("machine2");
    } else if (cfg.gfm == GfmKind::droop) {
        devices.push_back(std::make_unique<GfmDroop>("gfm2", net.bus_index(2), f_nominal_,
                                                     params.gfm_droop));
    } else {
        devices.push_back(std::make_unique<GfmVsm>("gfm2", net.bus_index(2), f_nominal_,
                                                   params.gfm_vsm));
    }
    if (cfg.has_wind) {
        devices.push_back(std::make_unique<DfigWind>("wind3", net.bus_index(3), f_nominal_,
                                                     params.wind));
    } else {
        devices.push_back(make_machine(3));
        conv_units.push_back("machine3");
    }
    if (cfg.has_condenser)
        devices.push_back(std::make_unique<SynchronousCondenser>(
            "condenser4", net.bus_index(4), f_nominal_, params.condenser));
    if (cfg.has_bess)
        devices.push_back(std::make_unique<GflBess>("bess4", net.bus_index(4), f_nominal_,
                                                    params.bess));

    const bool longterm = options.study == StudyKind::longterm;
    NoiseConfig noise = params.noise;
    noise.load_noise = params.force_load_noise.value_or(longterm && cfg.load_noise);
    noise.wind_noise =
        params.force_wind_noise.value_or(longterm && cfg.wind_noise) && cfg.has_wind;

    RampProfile load_ramp, wind_ramp;  // flat unless the study ramps
    if (longterm) {
        if (cfg.load_ramps) load_ramp = load_ramp_24h_;
        if (cfg.wind_ramps && cfg.has_wind) wind_ramp = wind_ramp_24h_;
    }

    const auto& groups = options.agc_on ? cfg.agc_with : cfg.agc_without;
    std::unique_ptr<AgcController> agc;
    if (!groups.empty()) {
        std::vector<std::string> units;
        for (const auto& group : groups) {
            if (group == "conv")
                units.insert(units.end(), conv_units.begin(), conv_units.end());
            else if (group == "wind" && cfg.has_wind)
                units.push_back("wind3");
            else if (group == "gfm" && cfg.gfm != GfmKind::none)
                units.push_back("gfm2");
            else
                throw ConfigError(cfg.name + ": AGC group '" + group +
                                  "' has no matching unit");
        }
        std::vector<std::pair<std::string, double>> participation;
        for (const auto& unit : units)
            participation.emplace_back(unit, 1.0 / static_cast<double>(units.size()));
        agc = std::make_unique<AgcController>(params.agc_k_i, params.agc_period_s,
                                              std::move(participation), f_nominal_,
                                              params.agc_windup);
    }

    ScenarioRun run;
    run.scenario_name = cfg.name;
    run.agc_on = options.agc_on;
    run.study = options.study;
    run.seed = options.seed;
    run.label = scenario_label(cfg, options.agc_on);

    run.config.t_start = 0.0;
    run.config.dt = options.dt_s.value_or(longterm ? 0.02 : 0.01);
    if (run.config.dt <= 0.0) throw ConfigError("dt must be positive");
    double horizon = longterm ? (options.full_24h ? 86400.0 : 3600.0) : 120.0;
    horizon = options.horizon_s.value_or(horizon);
    if (longterm && horizon < 600.0)
        throw ConfigError("long-term studies need a horizon of at least 600 s");
    if (!longterm && horizon > 600.0)
        throw ConfigError("contingency studies are capped at 600 s");
    run.config.t_end = horizon;
    // Record spacing: every step for contingencies, 100 ms for long-term
    // windows, 1 s for full-day runs (keeps trace files bounded).
    const double spacing = longterm ? (options.full_24h ? 1.0 : 0.1) : run.config.dt;
    run.config.record_every = std::max(1, static_cast<int>(std::lround(spacing / run.config.dt)));

    run.system = std::make_unique<GridSystem>(std::move(net), std::move(devices), noise,
                                              std::move(load_ramp), std::move(wind_ramp),
                                              std::move(agc), params.t_washout);
    run.system->initialize(setpoints_);

    if (!longterm) {
        run.schedule = contingency_schedule(run.system->network());
        run.event_time = run.schedule.front().time;
        for (const auto& ev : run.schedule)
            if (ev.time >= horizon)
                throw ConfigError("event at " + std::to_string(ev.time) +
                                  " s falls outside the horizon");
    }
    return run;
}

}  // namespace gridfreq
