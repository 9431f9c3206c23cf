#pragma once

#include <string>
#include <vector>

#include "tractionopt/pwm_engine.hpp"

namespace tractionopt {

inline constexpr double chip_granule_mm2 = 25.0;

/// Parametric SiC MOSFET technology. All quantities are per unit chip area
/// so that a switch is fully described by its technology and die area.
struct DeviceTech {
    std::string name;
    double voltage_class = 1200.0;          // V
    double specific_on_resistance = 0.0;    // Ohm mm^2
    double k_on = 0.0;                      // J/(V A)
    double k_off = 0.0;                     // J/(V A)
    double specific_output_charge = 0.0;    // C/mm^2 at reference_voltage
    double reference_voltage = 800.0;       // V
    double on_resistance_tempco = 0.0;      // 1/K, used only with temperature feedback
    double reference_temperature = 25.0;    // degC

    void validate() const;
};

struct SwitchDesign {
    std::string id;
    DeviceTech tech;
    double area = chip_granule_mm2;  // mm^2
};

struct SwitchLossBreakdown {
    double conduction = 0.0;     // W
    double switching = 0.0;      // W, including the output-charge part
    double output_charge = 0.0;  // W, share of `switching`
    double total = 0.0;          // conduction + switching
};

struct ThermalLimits {
    double heatsink_temperature = 65.0;       // degC
    double max_junction_temperature = 175.0;  // degC
    double resistance_coefficient = 3.0;      // K/W at 1 mm^2
    double resistance_exponent = -0.4;
};

struct ThermalResult {
    double thermal_resistance = 0.0;    // K/W
    double junction_temperature = 0.0;  // degC
    bool feasible = false;
};

/// Smallest multiple of `granule` not below `raw` (raw > 0).
double quantize_area(double raw, double granule = chip_granule_mm2);

double thermal_resistance(double area, const ThermalLimits& limits = {});
ThermalResult junction_temperature(double p_mos, double area, const ThermalLimits& limits = {});

/// Mean conduction loss over the trace period.
double conduction_loss(const SwitchDesign& sw, const SwitchingTrace& trace, const SwitchChannel& channel);
/// Switching loss of one period's events repeated at `fundamental_hz`.
double switching_loss(const SwitchDesign& sw, const std::vector<SwitchingEvent>& events, double fundamental_hz);

/// Area-independent stress of one switch over a period, expressed as rates.
struct SwitchStress {
    double mean_square_current = 0.0;  // A^2, period mean of i^2 while conducting
    double turn_on_rate = 0.0;         // W per J/(V A): f * sum of V*I over turn-on events
    double turn_off_rate = 0.0;        // W per J/(V A): f * sum of V*I over turn-off events
    double hard_on_square_rate = 0.0;  // V^2/s: f * sum of V^2 over hard turn-on events
};

SwitchStress switch_stress(const SwitchingTrace& trace, const SwitchChannel& channel);

/// Loss as a function of die area: P(A) = conduction / A + switching + output_charge * A.
struct LossProfile {
    double conduction = 0.0;     // W mm^2
    double switching = 0.0;      // W
    double output_charge = 0.0;  // W/mm^2

    [[nodiscard]] SwitchLossBreakdown at(double area) const;
};

/// `resistance_scale` multiplies r*_on (temperature feedback).
LossProfile loss_profile(const DeviceTech& tech, const SwitchStress& stress, double resistance_scale = 1.0);

struct SwitchEvaluation {
    SwitchLossBreakdown loss;
    ThermalResult thermal;
};

/// Losses and junction temperature at `area`; with `temperature_feedback`
/// one fixed-point step re-evaluates R_on at the first-pass temperature.
SwitchEvaluation evaluate_switch(const DeviceTech& tech, const SwitchStress& stress, double area,
                                 const ThermalLimits& limits, bool temperature_feedback = false);

/// Ascending granule search for the smallest thermally feasible area; returns
/// 0 when no multiple of `granule` up to `max_area` is feasible.
double minimum_feasible_area(const DeviceTech& tech, const SwitchStress& stress, const ThermalLimits& limits,
                             double granule, double max_area, bool temperature_feedback = false);

}  // namespace tractionopt
