#include "tractionopt/vehicle_cycle.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "tractionopt/errors.hpp"

namespace tractionopt {

namespace {

std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

bool parse_double(const std::string& text, double& out)
{
    const char* begin = text.data();
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end && std::isfinite(out);
}

}  // namespace

void VehicleParameters::validate() const
{
    if (!(frontal_area > 0 && air_density > 0 && wheel_radius > 0 && mass > 0 && gear_ratio > 0)) {
        throw InputError("vehicle: area, air density, wheel radius, mass and gear ratio must be positive");
    }
    if (drag_coefficient < 0 || rolling_coefficient < 0 || gravity < 0) {
        throw InputError("vehicle: drag, rolling and gravity coefficients must be non-negative");
    }
    if (!(gear_efficiency > 0 && gear_efficiency <= 1)) {
        throw InputError("vehicle: gear efficiency must lie in (0, 1]");
    }
    if (axle_inertia < 0 || machine_inertia < 0) {
        throw InputError("vehicle: inertias must be non-negative");
    }
    if (machine_count < 1) {
        throw InputError("vehicle: machine count must be at least 1");
    }
}

DriveCycle::DriveCycle(std::string name, std::vector<CycleSample> samples)
    : name_(std::move(name)), samples_(std::move(samples))
{
    if (samples_.empty()) {
        throw InputError("drive cycle '" + name_ + "' has no samples");
    }
    if (samples_.front().time_s != 0.0) {
        throw InputError("drive cycle must start at t = 0", 1);
    }
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        if (!(samples_[i].velocity >= 0.0)) {
            throw InputError("negative velocity", i + 1);
        }
        if (i > 0 && !(samples_[i].time_s > samples_[i - 1].time_s)) {
            throw InputError("non-monotone time", i + 1);
        }
    }
}

double DriveCycle::duration() const
{
    return samples_.empty() ? 0.0 : samples_.back().time_s;
}

double DriveCycle::distance() const
{
    double s = 0.0;
    for (std::size_t i = 1; i < samples_.size(); ++i) {
        const double dt = samples_[i].time_s - samples_[i - 1].time_s;
        s += 0.5 * dt * (samples_[i].velocity + samples_[i - 1].velocity);
    }
    return s;
}

std::vector<double> DriveCycle::time_weights() const
{
    const std::size_t n = samples_.size();
    std::vector<double> w(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        const double half = 0.5 * (samples_[i].time_s - samples_[i - 1].time_s);
        w[i - 1] += half;
        w[i] += half;
    }
    return w;
}

std::vector<double> DriveCycle::accelerations() const
{
    const std::size_t n = samples_.size();
    std::vector<double> a(n, 0.0);
    if (n < 2) {
        return a;
    }
    auto slope = [&](std::size_t i, std::size_t j) {
        return (samples_[j].velocity - samples_[i].velocity) / (samples_[j].time_s - samples_[i].time_s);
    };
    a.front() = slope(0, 1);
    a.back() = slope(n - 2, n - 1);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        a[i] = slope(i - 1, i + 1);
    }
    return a;
}

DriveCycle parse_cycle(std::istream& in, const std::string& name)
{
    double unit_scale = 1.0;
    std::string cycle_name = name;
    std::vector<CycleSample> samples;
    std::string line;
    std::size_t row = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++row;
        const std::string text = trim(line);
        if (text.empty()) {
            continue;
        }
        if (text.front() == '#') {
            const std::string directive = trim(std::string_view(text).substr(1));
            const auto eq = directive.find('=');
            if (eq == std::string::npos) {
                continue;
            }
            const std::string key = trim(std::string_view(directive).substr(0, eq));
            const std::string value = trim(std::string_view(directive).substr(eq + 1));
            if (key == "unit") {
                if (value == "kmh") {
                    unit_scale = 1.0 / 3.6;
                } else if (value == "ms") {
                    unit_scale = 1.0;
                } else {
                    throw InputError("unknown velocity unit '" + value + "'", row);
                }
            } else if (key == "name") {
                cycle_name = value;
            }
            continue;
        }
        const auto comma = text.find(',');
        if (comma == std::string::npos || text.find(',', comma + 1) != std::string::npos) {
            throw InputError("expected two comma-separated columns", row);
        }
        CycleSample s;
        const bool t_ok = parse_double(trim(std::string_view(text).substr(0, comma)), s.time_s);
        const bool v_ok = parse_double(trim(std::string_view(text).substr(comma + 1)), s.velocity);
        if (!t_ok && !v_ok && samples.empty() && !header_seen) {
            header_seen = true;  // column header such as "t,v"
            continue;
        }
        if (!t_ok || !v_ok) {
            throw InputError("malformed number", row);
        }
        if (s.velocity < 0) {
            throw InputError("negative velocity", row);
        }
        if (!samples.empty() && !(s.time_s > samples.back().time_s)) {
            throw InputError("non-monotone time", row);
        }
        s.velocity *= unit_scale;
        samples.push_back(s);
    }
    return DriveCycle(cycle_name, std::move(samples));
}

DriveCycle load_cycle(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open drive cycle file " + path.string());
    }
    return parse_cycle(in, path.stem().string());
}

double tractive_force(const VehicleParameters& veh, double velocity, double acceleration)
{
    const double rotating_mass =
        (veh.axle_inertia + veh.machine_count * veh.machine_inertia * veh.gear_ratio * veh.gear_ratio) /
        (veh.wheel_radius * veh.wheel_radius);
    double force = (veh.mass + rotating_mass) * acceleration;
    if (velocity > 0.0) {
        force += 0.5 * veh.air_density * veh.drag_coefficient * veh.frontal_area * velocity * velocity;
        force += veh.mass * veh.gravity * veh.rolling_coefficient;
    }
    return force;
}

std::vector<OperatingPoint> cycle_to_operating_points(const DriveCycle& cycle, const VehicleParameters& veh)
{
    veh.validate();
    const auto accel = cycle.accelerations();
    const auto weights = cycle.time_weights();
    std::vector<OperatingPoint> points;
    points.reserve(cycle.size());
    for (std::size_t i = 0; i < cycle.size(); ++i) {
        const double v = cycle.samples()[i].velocity;
        const double force = tractive_force(veh, v, accel[i]);
        const double wheel_torque = force * veh.wheel_radius / (veh.gear_ratio * veh.machine_count);
        const double torque = force >= 0.0 ? wheel_torque / veh.gear_efficiency : wheel_torque * veh.gear_efficiency;
        OperatingPoint p;
        p.speed_rpm = v * veh.gear_ratio / veh.wheel_radius * 60.0 / (2.0 * std::numbers::pi);
        p.torque = torque;
        p.weight_s = weights[i];
        points.push_back(p);
    }
    return points;
}

std::vector<OperatingPoint> full_load_envelope(const MotorModel& motor, int count)
{
    if (count < 2) {
        throw InputError("full-load envelope needs at least 2 points per torque sign");
    }
    motor.validate();
    std::vector<double> speeds(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        speeds[static_cast<std::size_t>(i)] = motor.max_speed_rpm * i / (count - 1);
    }
    const double corner = motor.corner_speed_rpm();
    if (count >= 3 && corner > 0.0 && corner < motor.max_speed_rpm) {
        auto nearest = std::min_element(speeds.begin() + 1, speeds.end() - 1, [&](double a, double b) {
            return std::abs(a - corner) < std::abs(b - corner);
        });
        *nearest = corner;
    }
    std::vector<OperatingPoint> points;
    points.reserve(2 * speeds.size());
    for (double sign : {1.0, -1.0}) {
        for (double n : speeds) {
            points.push_back({n, sign * motor.envelope_torque(n), 1.0});
        }
    }
    return points;
}

std::size_t clamp_to_envelope(std::vector<OperatingPoint>& points, const MotorModel& motor)
{
    std::size_t clamped = 0;
    for (auto& p : points) {
        bool changed = false;
        if (p.speed_rpm > motor.max_speed_rpm) {
            p.speed_rpm = motor.max_speed_rpm;
            changed = true;
        }
        const double limit = motor.envelope_torque(p.speed_rpm);
        if (std::abs(p.torque) > limit) {
            p.torque = std::copysign(limit, p.torque);
            changed = true;
        }
        clamped += changed ? 1 : 0;
    }
    if (clamped > 0) {
        std::clog << "warning: " << clamped << " operating point(s) clamped to the envelope of motor '"
                  << motor.name << "'\n";
    }
    return clamped;
}

}  // namespace tractionopt
