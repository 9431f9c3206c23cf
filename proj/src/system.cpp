#include "tractionopt/system.hpp"

#include <algorithm>

#include "tractionopt/errors.hpp"

namespace tractionopt {

void SystemConfig::validate() const
{
    vehicle.validate();
    motor.validate();
    harmonics.validate();
    device_1200v.validate();
    device_750v.validate();
    if (!(open_winding_turn_ratio > 0)) {
        throw ConfigError("motor.open_winding_turn_ratio", "must be positive");
    }
    if (!(dc_voltage > 0)) {
        throw ConfigError("inverter.dc_voltage", "must be positive");
    }
    if (!(dc_capacitance > 0)) {
        throw ConfigError("inverter.dc_capacitance", "must be positive");
    }
    if (!(max_ripple > 0)) {
        throw ConfigError("inverter.max_ripple", "must be positive");
    }
    if (!(chip_granule > 0) || !(max_switch_area >= chip_granule)) {
        throw ConfigError("sizing.chip_granule", "granule must be positive and not above the area cap");
    }
    if (!(samples_per_carrier >= 200.0)) {
        throw ConfigError("simulation.samples_per_carrier", "must be at least 200");
    }
    if (!(min_fundamental_hz > 0)) {
        throw ConfigError("simulation.min_fundamental_hz", "must be positive");
    }
    if (envelope_points < 2) {
        throw ConfigError("sizing.envelope_points", "need at least two points per torque sign");
    }
    if (!(thermal.max_junction_temperature > thermal.heatsink_temperature)) {
        throw ConfigError("thermal.max_junction_temperature", "must exceed the heat-sink temperature");
    }
}

double InverterDesign::total_area() const
{
    double a = 0.0;
    for (const auto& s : switches) {
        a += s.area;
    }
    return a;
}

bool InverterDesign::allows(Mode mode) const
{
    return std::find(modes.begin(), modes.end(), mode) != modes.end();
}

std::string design_label(Topology topology, Variant variant, const std::vector<Mode>& modes)
{
    std::string s(to_string(topology));
    if (variant != Variant::none) {
        s += "_";
        s += to_string(variant);
    }
    if (topology != Topology::b6) {
        s += "(";
        for (std::size_t i = 0; i < modes.size(); ++i) {
            s += (i ? "/" : "");
            s += to_string(modes[i]);
        }
        s += ")";
    }
    return s;
}

SystemModel::SystemModel(SystemConfig config) : config_(std::move(config))
{
    config_.validate();
    open_winding_motor_ = scale_motor(config_.motor, config_.open_winding_turn_ratio);
    open_winding_motor_.name = config_.motor.name + "-open-winding";
    open_winding_harmonics_ = scale_harmonic_parameters(config_.harmonics, config_.open_winding_turn_ratio);
}

const MotorModel& SystemModel::motor(Topology topology) const
{
    return topology == Topology::b6_2y ? open_winding_motor_ : config_.motor;
}

const HarmonicMotorParameters& SystemModel::harmonics(Topology topology) const
{
    return topology == Topology::b6_2y ? open_winding_harmonics_ : config_.harmonics;
}

const DeviceTech& SystemModel::device(Topology topology, std::size_t switch_index) const
{
    if (topology == Topology::tnpc && switch_index % 4 >= 2) {
        return config_.device_750v;
    }
    return config_.device_1200v;
}

ModulationConfig SystemModel::modulation(Topology topology, Mode mode, Variant variant, double fsw) const
{
    ModulationConfig m;
    m.topology = topology;
    m.mode = mode;
    m.variant = variant;
    m.switching_frequency = fsw;
    m.dc_voltage = config_.dc_voltage;
    m.time_step = 1.0 / (config_.samples_per_carrier * fsw);
    m.min_fundamental_hz = config_.min_fundamental_hz;
    m.zero_vector_costs.outer = config_.device_1200v.k_on + config_.device_1200v.k_off;
    m.zero_vector_costs.mid = config_.device_750v.k_on + config_.device_750v.k_off;
    return m;
}

std::vector<OperatingPoint> SystemModel::envelope(Topology topology) const
{
    return full_load_envelope(motor(topology), config_.envelope_points);
}

PointPhysics SystemModel::simulate(Topology topology, Mode mode, Variant variant, double fsw,
                                   const OperatingPoint& point) const
{
    const auto mod = modulation(topology, mode, variant, fsw);
    mod.validate();
    const auto& machine = motor(topology);
    PointPhysics ph;
    ph.solution = solve_operating_point(machine, point, voltage_limit(mode, config_.dc_voltage));
    ph.electrical_feasible = ph.solution.feasible;
    if (!ph.electrical_feasible) {
        return ph;
    }
    ph.fundamental_motor_loss = fundamental_losses(machine, ph.solution);
    const auto trace = synthesize_period(mod, ph.solution);
    const auto& harm = harmonics(topology);
    const auto spectrum = dq_ripple_spectrum(trace, harm.window_low(fsw), harm.f_max);
    ph.harmonic = harmonic_losses(spectrum, harm);
    ph.ripple = dc_link_ripple(trace, config_.dc_capacitance);
    ph.stress.reserve(trace.switches.size());
    for (const auto& ch : trace.switches) {
        ph.stress.push_back(switch_stress(trace, ch));
    }
    return ph;
}

std::shared_ptr<const PointPhysics> SystemModel::physics(Topology topology, Mode mode, Variant variant, double fsw,
                                                         const OperatingPoint& point) const
{
    const Variant eff = effective_variant(topology, mode, variant);
    const Key key{static_cast<int>(topology), static_cast<int>(mode), static_cast<int>(eff), fsw, point.speed_rpm,
                  point.torque};
    {
        std::lock_guard lock(mutex_);
        if (auto it = cache_.find(key); it != cache_.end()) {
            return it->second;
        }
    }
    if (!is_valid_combination(topology, mode, variant)) {
        throw ConfigError("design", "invalid combination " + design_label(topology, variant, {mode}));
    }
    auto result = std::make_shared<const PointPhysics>(simulate(topology, mode, variant, fsw, point));
    std::lock_guard lock(mutex_);
    return cache_.emplace(key, std::move(result)).first->second;
}

InverterDesign SystemModel::blank_design(Topology topology, Variant variant, std::vector<Mode> modes) const
{
    if (modes.empty()) {
        throw ConfigError("design.modes", "a design needs at least one mode");
    }
    for (Mode m : modes) {
        if (!is_valid_combination(topology, m, variant)) {
            throw ConfigError("design.modes", "invalid combination " + design_label(topology, variant, {m}));
        }
    }
    InverterDesign d;
    d.topology = topology;
    d.variant = variant;
    d.modes = std::move(modes);
    d.name = design_label(topology, variant, d.modes);
    const auto ids = switch_ids(topology);
    for (std::size_t j = 0; j < ids.size(); ++j) {
        d.switches.push_back({ids[j], device(topology, j), config_.chip_granule});
    }
    return d;
}

std::size_t SystemModel::cache_size() const
{
    std::lock_guard lock(mutex_);
    return cache_.size();
}

void SystemModel::clear_cache() const
{
    std::lock_guard lock(mutex_);
    cache_.clear();
}

}  // namespace tractionopt
