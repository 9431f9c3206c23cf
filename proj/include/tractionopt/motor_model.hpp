#pragma once

#include <string>

#include "tractionopt/operating_point.hpp"

namespace tractionopt {

/// Two-term (hysteresis + eddy) fundamental iron loss, driven by the stator
/// flux linkage normalised to `flux_reference`.
struct IronLossCoefficients {
    double hysteresis = 0.0;      // W/Hz at unit normalised flux
    double eddy = 0.0;            // W/Hz^2 at unit normalised flux
    double flux_reference = 1.0;  // Wb
};

/// Analytic dq model of a permanent magnet synchronous machine.
struct MotorModel {
    std::string name = "pmsm";
    int pole_pairs = 4;
    double stator_resistance = 0.0;  // Ohm
    double d_inductance = 0.0;       // H
    double q_inductance = 0.0;       // H
    double pm_flux = 0.0;            // Wb
    double max_current = 0.0;        // A, peak (dq magnitude)
    double max_power = 0.0;          // W
    double max_torque = 0.0;         // Nm
    double max_speed_rpm = 0.0;
    double turn_ratio = 1.0;
    IronLossCoefficients iron;

    void validate() const;

    /// Speed where the torque limit meets the power limit.
    [[nodiscard]] double corner_speed_rpm() const;
    /// Largest torque magnitude of the mechanical envelope at `speed_rpm`.
    [[nodiscard]] double envelope_torque(double speed_rpm) const;
    [[nodiscard]] double electrical_speed(double speed_rpm) const;
    [[nodiscard]] double torque_from_currents(double i_d, double i_q) const;
};

struct OperatingPointSolution {
    bool feasible = false;
    std::string reason;  // set when infeasible
    double speed_rpm = 0.0;
    double torque = 0.0;
    double u_d = 0.0;
    double u_q = 0.0;
    double i_d = 0.0;
    double i_q = 0.0;
    double fundamental_hz = 0.0;
    double power_factor = 1.0;
    double modulation_index = 0.0;
    double rms_current = 0.0;
    double voltage_limit = 0.0;

    [[nodiscard]] double voltage_magnitude() const;
    [[nodiscard]] double current_magnitude() const;
    /// Angle of the voltage vector in the rotor frame.
    [[nodiscard]] double voltage_angle() const;
    [[nodiscard]] double current_angle() const;
};

/// MTPA below base speed, minimum-current field weakening above it.
/// `voltage_limit` is the peak phase voltage the active mode can apply.
OperatingPointSolution solve_operating_point(const MotorModel& motor, const OperatingPoint& point,
                                             double voltage_limit);

/// Copper plus two-term iron loss of the fundamental wave [W].
double fundamental_losses(const MotorModel& motor, const OperatingPointSolution& sol);

/// Turn-number scaling: impedances by ratio^2, flux by ratio, current limit by 1/ratio.
MotorModel scale_motor(const MotorModel& motor, double ratio);

}  // namespace tractionopt
