#include "tractionopt/device_thermal.hpp"

#include <cmath>

#include "tractionopt/errors.hpp"

namespace tractionopt {

void DeviceTech::validate() const
{
    if (voltage_class != 750.0 && voltage_class != 1200.0) {
        throw InputError("device '" + name + "': voltage class must be 750 or 1200 V");
    }
    if (!(specific_on_resistance > 0) || !(k_on > 0) || !(k_off > 0) || !(specific_output_charge > 0) ||
        !(reference_voltage > 0)) {
        throw InputError("device '" + name + "': coefficients must be positive");
    }
    if (on_resistance_tempco < 0) {
        throw InputError("device '" + name + "': negative on-resistance temperature coefficient");
    }
}

double quantize_area(double raw, double granule)
{
    if (!(raw > 0) || !(granule > 0)) {
        throw InputError("area and granule must be positive");
    }
    // Tolerate floating-point noise on exact multiples.
    const double count = std::ceil(raw / granule - 1e-9);
    return std::max(1.0, count) * granule;
}

double thermal_resistance(double area, const ThermalLimits& limits)
{
    return limits.resistance_coefficient * std::pow(area, limits.resistance_exponent);
}

ThermalResult junction_temperature(double p_mos, double area, const ThermalLimits& limits)
{
    ThermalResult r;
    r.thermal_resistance = thermal_resistance(area, limits);
    r.junction_temperature = limits.heatsink_temperature + r.thermal_resistance * p_mos;
    r.feasible = r.junction_temperature <= limits.max_junction_temperature;
    return r;
}

double conduction_loss(const SwitchDesign& sw, const SwitchingTrace& trace, const SwitchChannel& channel)
{
    return switch_stress(trace, channel).mean_square_current * sw.tech.specific_on_resistance / sw.area;
}

double switching_loss(const SwitchDesign& sw, const std::vector<SwitchingEvent>& events, double fundamental_hz)
{
    const auto& t = sw.tech;
    double energy = 0.0;
    for (const auto& e : events) {
        const double vi = e.voltage * std::abs(e.current);
        if (e.turn_on) {
            energy += t.k_on * vi;
            if (e.voltage > 0.0) {
                energy += 0.5 * t.specific_output_charge * sw.area * e.voltage * e.voltage / t.reference_voltage;
            }
        } else {
            energy += t.k_off * vi;
        }
    }
    return energy * fundamental_hz;
}

SwitchStress switch_stress(const SwitchingTrace& trace, const SwitchChannel& channel)
{
    SwitchStress s;
    const auto& current = trace.phase_currents[static_cast<std::size_t>(channel.phase)];
    double sq = 0.0;
    for (const auto& iv : channel.conduction) {
        sq += current.square_integral(iv.begin, iv.end);
    }
    const double f = 1.0 / trace.period;
    s.mean_square_current = sq * f;
    double on = 0.0;
    double off = 0.0;
    double hard = 0.0;
    for (const auto& e : channel.events) {
        const double vi = e.voltage * std::abs(e.current);
        if (e.turn_on) {
            on += vi;
            hard += e.voltage * e.voltage;
        } else {
            off += vi;
        }
    }
    s.turn_on_rate = on * f;
    s.turn_off_rate = off * f;
    s.hard_on_square_rate = hard * f;
    return s;
}

SwitchLossBreakdown LossProfile::at(double area) const
{
    SwitchLossBreakdown b;
    b.conduction = conduction / area;
    b.output_charge = output_charge * area;
    b.switching = switching + b.output_charge;
    b.total = b.conduction + b.switching;
    return b;
}

LossProfile loss_profile(const DeviceTech& tech, const SwitchStress& stress, double resistance_scale)
{
    LossProfile p;
    p.conduction = tech.specific_on_resistance * resistance_scale * stress.mean_square_current;
    p.switching = tech.k_on * stress.turn_on_rate + tech.k_off * stress.turn_off_rate;
    p.output_charge = 0.5 * tech.specific_output_charge * stress.hard_on_square_rate / tech.reference_voltage;
    return p;
}

SwitchEvaluation evaluate_switch(const DeviceTech& tech, const SwitchStress& stress, double area,
                                 const ThermalLimits& limits, bool temperature_feedback)
{
    SwitchEvaluation ev;
    ev.loss = loss_profile(tech, stress).at(area);
    ev.thermal = junction_temperature(ev.loss.total, area, limits);
    if (temperature_feedback && tech.on_resistance_tempco > 0.0) {
        const double scale =
            1.0 + tech.on_resistance_tempco * (ev.thermal.junction_temperature - tech.reference_temperature);
        ev.loss = loss_profile(tech, stress, std::max(scale, 0.0)).at(area);
        ev.thermal = junction_temperature(ev.loss.total, area, limits);
    }
    return ev;
}

double minimum_feasible_area(const DeviceTech& tech, const SwitchStress& stress, const ThermalLimits& limits,
                             double granule, double max_area, bool temperature_feedback)
{
    for (double area = granule; area <= max_area * (1.0 + 1e-12); area += granule) {
        if (evaluate_switch(tech, stress, area, limits, temperature_feedback).thermal.feasible) {
            return area;
        }
    }
    return 0.0;
}

}  // namespace tractionopt
