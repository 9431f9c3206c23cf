#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "tractionopt/motor_model.hpp"
#include "tractionopt/operating_point.hpp"

namespace tractionopt {

/// Longitudinal vehicle model parameters.
struct VehicleParameters {
    double frontal_area = 2.22;        // m^2
    double drag_coefficient = 0.25;
    double air_density = 1.25;         // kg/m^3
    double rolling_coefficient = 0.01;
    double gravity = 9.81;             // m/s^2
    double wheel_radius = 0.345;       // m
    double mass = 1927.0;              // kg
    double gear_ratio = 12.4;
    double gear_efficiency = 1.0;
    double axle_inertia = 0.0;         // kg m^2
    double machine_inertia = 0.0;      // kg m^2, per machine
    int machine_count = 1;

    void validate() const;
};

struct CycleSample {
    double time_s = 0.0;
    double velocity = 0.0;  // m/s
};

class DriveCycle {
public:
    DriveCycle() = default;
    /// Validates ordering, sign and the t = 0 start; throws InputError.
    DriveCycle(std::string name, std::vector<CycleSample> samples);

    [[nodiscard]] const std::string& name() const { return name_; }
    [[nodiscard]] const std::vector<CycleSample>& samples() const { return samples_; }
    [[nodiscard]] std::size_t size() const { return samples_.size(); }
    /// Last timestamp.
    [[nodiscard]] double duration() const;
    /// Trapezoidal integral of velocity [m].
    [[nodiscard]] double distance() const;
    /// Trapezoidal quadrature weights; they sum to duration().
    [[nodiscard]] std::vector<double> time_weights() const;
    /// Central differences, one-sided at the ends.
    [[nodiscard]] std::vector<double> accelerations() const;

private:
    std::string name_;
    std::vector<CycleSample> samples_;
};

/// Reads `t,v` rows. Lines starting with '#' carry `key=value` directives;
/// `unit=kmh|ms` selects the velocity unit (m/s when absent).
DriveCycle parse_cycle(std::istream& in, const std::string& name = "cycle");
DriveCycle load_cycle(const std::filesystem::path& path);

/// Tractive force at the wheel [N]; resistive terms vanish at standstill.
double tractive_force(const VehicleParameters& veh, double velocity, double acceleration);

std::vector<OperatingPoint> cycle_to_operating_points(const DriveCycle& cycle,
                                                      const VehicleParameters& veh);

/// `count` points per torque sign from standstill to max speed. The corner
/// speed replaces its nearest grid node when count >= 3. Motoring points come
/// first, then the mirrored generating points.
std::vector<OperatingPoint> full_load_envelope(const MotorModel& motor, int count);

/// Clamps speed and torque into the mechanical envelope. Returns the number
/// of clamped points and logs a warning when it is non-zero.
std::size_t clamp_to_envelope(std::vector<OperatingPoint>& points, const MotorModel& motor);

}  // namespace tractionopt
