#include <cmath>
#include <numbers>

#include "doctest.h"
#include "test_support.hpp"
#include "tractionopt/errors.hpp"
#include "tractionopt/motor_model.hpp"

using namespace tractionopt;

namespace {

const MotorModel& reference_motor()
{
    return testing::default_config().system.motor;
}

double star_limit()
{
    return 800.0 / std::sqrt(3.0);
}

double reconstructed_torque(const MotorModel& m, const OperatingPointSolution& s)
{
    return 1.5 * m.pole_pairs * (m.pm_flux * s.i_q + (m.d_inductance - m.q_inductance) * s.i_d * s.i_q);
}

/// Smallest current magnitude meeting torque and voltage, by scanning i_d.
double grid_min_current(const MotorModel& m, double speed_rpm, double torque, double v_lim)
{
    const double we = m.pole_pairs * speed_rpm * 2.0 * std::numbers::pi / 60.0;
    double best = 1e300;
    for (double id = -m.max_current; id <= 0.0; id += 0.05) {
        const double denom = 1.5 * m.pole_pairs * (m.pm_flux + (m.d_inductance - m.q_inductance) * id);
        if (denom <= 0.0) {
            continue;
        }
        const double iq = torque / denom;
        const double ud = m.stator_resistance * id - we * m.q_inductance * iq;
        const double uq = m.stator_resistance * iq + we * (m.d_inductance * id + m.pm_flux);
        if (std::hypot(ud, uq) <= v_lim) {
            best = std::min(best, std::hypot(id, iq));
        }
    }
    return best;
}

}  // namespace

TEST_CASE("null point")
{
    const auto s = solve_operating_point(reference_motor(), {0, 0, 1}, star_limit());
    REQUIRE(s.feasible);
    CHECK(s.i_d == 0.0);
    CHECK(s.i_q == 0.0);
    CHECK(s.u_d == 0.0);
    CHECK(s.u_q == 0.0);
    CHECK(fundamental_losses(reference_motor(), s) == 0.0);
}

TEST_CASE("surface magnet machine draws pure q current")
{
    MotorModel m = reference_motor();
    m.q_inductance = m.d_inductance;
    for (double torque : {50.0, 200.0, -300.0}) {
        const auto s = solve_operating_point(m, {1000, torque, 1}, star_limit());
        REQUIRE(s.feasible);
        CHECK(s.i_d == doctest::Approx(0.0).epsilon(1e-9).scale(1.0));
        CHECK(s.i_q == doctest::Approx(torque / (1.5 * m.pole_pairs * m.pm_flux)).epsilon(1e-6));
    }
}

TEST_CASE("corner region point respects the star voltage limit")
{
    const auto& m = reference_motor();
    const auto s = solve_operating_point(m, {5000, 573.0, 1}, star_limit());
    REQUIRE(s.feasible);
    CHECK(s.voltage_magnitude() <= star_limit() + 1e-6);
    CHECK(s.current_magnitude() <= m.max_current + 1e-6);
    CHECK(s.fundamental_hz == doctest::Approx(4 * 5000 / 60.0));
    CHECK(s.current_magnitude() <= grid_min_current(m, 5000, 573.0, star_limit()) * 1.001);

    const auto corner = solve_operating_point(m, {m.corner_speed_rpm(), 589, 1}, star_limit());
    REQUIRE(corner.feasible);
    CHECK(corner.voltage_magnitude() <= star_limit() + 1e-6);
}

TEST_CASE("torque is reconstructed across the envelope")
{
    const auto& m = reference_motor();
    for (double n = 0.0; n <= m.max_speed_rpm; n += 1000.0) {
        const double mmax = m.envelope_torque(n);
        for (double frac : {-1.0, -0.5, 0.1, 0.5, 1.0}) {
            const double torque = frac * mmax;
            const auto s = solve_operating_point(m, {n, torque, 1}, 800.0);
            REQUIRE(s.feasible);
            CHECK(std::abs(reconstructed_torque(m, s) - torque) <= 1e-3 * std::abs(torque) + 1e-9);
            CHECK(s.voltage_magnitude() <= 800.0 + 1e-6);
            CHECK(s.current_magnitude() <= m.max_current + 1e-6);
            CHECK(std::abs(s.u_d - (m.stator_resistance * s.i_d - m.electrical_speed(n) * m.q_inductance * s.i_q)) < 1e-6);
        }
    }
}

TEST_CASE("voltage limit makes high speed full power infeasible for a weak limit")
{
    const auto s = solve_operating_point(reference_motor(), {16000, 179, 1}, 100.0);
    CHECK_FALSE(s.feasible);
    CHECK_FALSE(s.reason.empty());
}

TEST_CASE("field weakening raises copper loss under the lower voltage limit")
{
    const auto& m = reference_motor();
    const OperatingPoint p{12000, 100, 1};
    const auto star = solve_operating_point(m, p, star_limit());
    const auto h = solve_operating_point(m, p, 800.0);
    REQUIRE(star.feasible);
    REQUIRE(h.feasible);
    CHECK(std::abs(star.i_d) > std::abs(h.i_d));
    CHECK(1.5 * m.stator_resistance * star.current_magnitude() * star.current_magnitude() >
          1.5 * m.stator_resistance * h.current_magnitude() * h.current_magnitude());
}

TEST_CASE("fundamental copper loss")
{
    MotorModel m = reference_motor();
    m.stator_resistance = 0.01;
    m.iron.hysteresis = 0.0;
    m.iron.eddy = 0.0;
    OperatingPointSolution s;
    s.i_q = 100.0;
    s.fundamental_hz = 300.0;
    CHECK(fundamental_losses(m, s) == doctest::Approx(150.0).epsilon(1e-12));
}

TEST_CASE("turn scaling")
{
    const auto& m = reference_motor();
    const auto same = scale_motor(m, 1.0);
    CHECK(same.stator_resistance == m.stator_resistance);
    CHECK(same.pm_flux == m.pm_flux);
    CHECK(same.max_current == m.max_current);

    const double k = 7.0 / 4.0;
    const auto s = scale_motor(m, k);
    CHECK(s.max_power == m.max_power);
    CHECK(s.max_torque == m.max_torque);
    CHECK(s.corner_speed_rpm() == m.corner_speed_rpm());
    CHECK(s.max_current == doctest::Approx(m.max_current / k));

    const OperatingPoint p{3000, 300, 1};
    const auto a = solve_operating_point(m, p, 800.0);
    const auto b = solve_operating_point(s, p, 800.0 * k);
    REQUIRE(a.feasible);
    REQUIRE(b.feasible);
    CHECK(b.current_magnitude() == doctest::Approx(a.current_magnitude() * 4.0 / 7.0).epsilon(1e-4));

    const auto ea = solve_operating_point(m, {3000, 0, 1}, 800.0);
    const auto eb = solve_operating_point(s, {3000, 0, 1}, 800.0 * k);
    CHECK(eb.u_q == doctest::Approx(ea.u_q * k).epsilon(1e-9));
    CHECK_THROWS_AS(scale_motor(m, 0.0), InputError);
}
