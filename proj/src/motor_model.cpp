#include "tractionopt/motor_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "tractionopt/errors.hpp"

namespace tractionopt {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

struct DqVoltage {
    double d;
    double q;
    [[nodiscard]] double magnitude() const { return std::hypot(d, q); }
};

DqVoltage dq_voltage(const MotorModel& m, double omega_e, double i_d, double i_q)
{
    return {m.stator_resistance * i_d - omega_e * m.q_inductance * i_q,
            m.stator_resistance * i_q + omega_e * (m.d_inductance * i_d + m.pm_flux)};
}

/// d-axis current of the MTPA trajectory at current magnitude `current`.
double mtpa_d_current(const MotorModel& m, double current)
{
    const double saliency = m.d_inductance - m.q_inductance;
    if (saliency == 0.0) {
        return 0.0;
    }
    const double root = std::sqrt(m.pm_flux * m.pm_flux + 8.0 * saliency * saliency * current * current);
    return 2.0 * saliency * current * current / (root + m.pm_flux);
}

double mtpa_torque(const MotorModel& m, double current)
{
    const double i_d = mtpa_d_current(m, current);
    const double i_q = std::sqrt(std::max(current * current - i_d * i_d, 0.0));
    return m.torque_from_currents(i_d, i_q);
}

/// q-axis current producing `torque` for a given d-axis current; NaN where
/// the torque equation degenerates.
double q_current_for_torque(const MotorModel& m, double torque, double i_d)
{
    const double flux = m.pm_flux + (m.d_inductance - m.q_inductance) * i_d;
    if (flux <= 0.0) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return torque / (1.5 * m.pole_pairs * flux);
}

OperatingPointSolution infeasible(OperatingPointSolution sol, std::string reason)
{
    sol.feasible = false;
    sol.reason = std::move(reason);
    return sol;
}

}  // namespace

void MotorModel::validate() const
{
    if (pole_pairs < 1 || !(stator_resistance > 0) || !(d_inductance > 0) || !(q_inductance > 0) ||
        !(pm_flux > 0) || !(max_current > 0) || !(max_power > 0) || !(max_torque > 0) ||
        !(max_speed_rpm > 0)) {
        throw InputError("motor '" + name + "': electrical and mechanical parameters must be positive");
    }
    if (!(turn_ratio > 0)) {
        throw InputError("motor '" + name + "': turn ratio must be positive");
    }
    if (iron.hysteresis < 0 || iron.eddy < 0 || !(iron.flux_reference > 0)) {
        throw InputError("motor '" + name + "': iron loss coefficients must be non-negative");
    }
}

double MotorModel::corner_speed_rpm() const
{
    return max_power / max_torque * 60.0 / two_pi;
}

double MotorModel::envelope_torque(double speed_rpm) const
{
    const double omega = speed_rpm * two_pi / 60.0;
    if (omega <= 0.0) {
        return max_torque;
    }
    return std::min(max_torque, max_power / omega);
}

double MotorModel::electrical_speed(double speed_rpm) const
{
    return pole_pairs * speed_rpm * two_pi / 60.0;
}

double MotorModel::torque_from_currents(double i_d, double i_q) const
{
    return 1.5 * pole_pairs * (pm_flux * i_q + (d_inductance - q_inductance) * i_d * i_q);
}

double OperatingPointSolution::voltage_magnitude() const
{
    return std::hypot(u_d, u_q);
}

double OperatingPointSolution::current_magnitude() const
{
    return std::hypot(i_d, i_q);
}

double OperatingPointSolution::voltage_angle() const
{
    return std::atan2(u_q, u_d);
}

double OperatingPointSolution::current_angle() const
{
    return std::atan2(i_q, i_d);
}

OperatingPointSolution solve_operating_point(const MotorModel& motor, const OperatingPoint& point,
                                             double voltage_limit)
{
    OperatingPointSolution sol;
    sol.speed_rpm = point.speed_rpm;
    sol.torque = point.torque;
    sol.voltage_limit = voltage_limit;
    sol.fundamental_hz = motor.pole_pairs * point.speed_rpm / 60.0;
    if (point.speed_rpm < 0.0 || !(voltage_limit > 0.0)) {
        return infeasible(sol, "negative speed or non-positive voltage limit");
    }
    const double omega_e = motor.electrical_speed(point.speed_rpm);
    const double torque = point.torque;
    const double magnitude = std::abs(torque);
    const double rel_tol = 1e-12;

    double i_d = 0.0;
    if (magnitude > 0.0) {
        // MTPA current magnitude by bisection on the monotone torque curve.
        double hi = motor.max_current;
        int grow = 0;
        while (mtpa_torque(motor, hi) < magnitude && grow < 8) {
            hi *= 2.0;
            ++grow;
        }
        if (mtpa_torque(motor, hi) < magnitude) {
            return infeasible(sol, "torque unreachable");
        }
        double lo = 0.0;
        for (int it = 0; it < 200 && hi - lo > rel_tol * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            (mtpa_torque(motor, mid) < magnitude ? lo : hi) = mid;
        }
        i_d = mtpa_d_current(motor, 0.5 * (lo + hi));
    }
    double i_q = magnitude > 0.0 ? q_current_for_torque(motor, torque, i_d) : 0.0;

    auto excess = [&](double d) {
        const double q = q_current_for_torque(motor, torque, d);
        return dq_voltage(motor, omega_e, d, q).magnitude() - voltage_limit;
    };

    if (dq_voltage(motor, omega_e, i_d, i_q).magnitude() > voltage_limit * (1.0 + rel_tol)) {
        // Field weakening: walk i_d away from MTPA towards -I_max and take the
        // first crossing of the voltage limit, i.e. the smallest |i_d|.
        const double start = i_d;
        const double stop = -motor.max_current;
        if (!(stop < start)) {
            return infeasible(sol, "voltage limit exceeded");
        }
        constexpr int scan_steps = 256;
        double upper = start;  // excess > 0
        double lower = start;
        bool bracketed = false;
        for (int k = 1; k <= scan_steps; ++k) {
            const double d = start + (stop - start) * k / scan_steps;
            const double e = excess(d);
            if (std::isnan(e)) {
                break;
            }
            if (e <= 0.0) {
                lower = d;
                bracketed = true;
                break;
            }
            upper = d;
        }
        if (!bracketed) {
            return infeasible(sol, "voltage limit exceeded");
        }
        for (int it = 0; it < 200 && upper - lower > rel_tol * motor.max_current; ++it) {
            const double mid = 0.5 * (upper + lower);
            (excess(mid) > 0.0 ? upper : lower) = mid;
        }
        // Newton polish inside the bracket; keep the feasible side.
        double d = lower;
        const double h = 1e-7 * motor.max_current;
        for (int it = 0; it < 3; ++it) {
            const double e = excess(d);
            const double slope = (excess(d + h) - excess(d - h)) / (2.0 * h);
            if (!(std::abs(slope) > 0.0)) {
                break;
            }
            const double next = d - e / slope;
            if (next < lower || next > upper || excess(next) > 0.0) {
                break;
            }
            d = next;
        }
        i_d = d;
        i_q = q_current_for_torque(motor, torque, i_d);
    }

    const auto u = dq_voltage(motor, omega_e, i_d, i_q);
    sol.i_d = i_d;
    sol.i_q = i_q;
    sol.u_d = u.d;
    sol.u_q = u.q;
    sol.rms_current = std::hypot(i_d, i_q) / std::numbers::sqrt2;
    sol.modulation_index = u.magnitude() / voltage_limit;
    if (sol.current_magnitude() > 0.0 && u.magnitude() > 0.0) {
        sol.power_factor = std::cos(sol.voltage_angle() - sol.current_angle());
    }
    if (sol.current_magnitude() > motor.max_current * (1.0 + 1e-9)) {
        return infeasible(sol, "current limit exceeded");
    }
    if (u.magnitude() > voltage_limit * (1.0 + 1e-9)) {
        return infeasible(sol, "voltage limit exceeded");
    }
    sol.feasible = true;
    return sol;
}

double fundamental_losses(const MotorModel& motor, const OperatingPointSolution& sol)
{
    const double copper = 1.5 * motor.stator_resistance * (sol.i_d * sol.i_d + sol.i_q * sol.i_q);
    const double psi_d = motor.d_inductance * sol.i_d + motor.pm_flux;
    const double psi_q = motor.q_inductance * sol.i_q;
    const double flux_sq = (psi_d * psi_d + psi_q * psi_q) / (motor.iron.flux_reference * motor.iron.flux_reference);
    const double f = sol.fundamental_hz;
    const double iron = flux_sq * (motor.iron.hysteresis * f + motor.iron.eddy * f * f);
    return copper + iron;
}

MotorModel scale_motor(const MotorModel& motor, double ratio)
{
    if (!(ratio > 0.0)) {
        throw InputError("turn ratio must be positive");
    }
    MotorModel scaled = motor;
    const double sq = ratio * ratio;
    scaled.stator_resistance *= sq;
    scaled.d_inductance *= sq;
    scaled.q_inductance *= sq;
    scaled.pm_flux *= ratio;
    scaled.max_current /= ratio;
    scaled.iron.flux_reference *= ratio;
    scaled.turn_ratio *= ratio;
    return scaled;
}

}  // namespace tractionopt
