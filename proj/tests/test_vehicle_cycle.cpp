#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "test_support.hpp"
#include "tractionopt/errors.hpp"
#include "tractionopt/vehicle_cycle.hpp"

using namespace tractionopt;

namespace {

DriveCycle parse_text(const std::string& text)
{
    std::istringstream in(text);
    return parse_cycle(in, "inline");
}

DriveCycle constant_cycle(double v, int seconds)
{
    std::vector<CycleSample> s;
    for (int t = 0; t <= seconds; ++t) {
        s.push_back({static_cast<double>(t), v});
    }
    return DriveCycle("constant", s);
}

}  // namespace

TEST_CASE("cycle parsing")
{
    const auto c = parse_text("0,0\n1,1\n2,2\n");
    CHECK(c.size() == 3);
    CHECK(c.duration() == doctest::Approx(2.0));
    CHECK(c.distance() == doctest::Approx(2.0));

    const auto with_header = parse_text("# unit=kmh\nt,v\n0,0\n1,36\n");
    CHECK(with_header.size() == 2);
    CHECK(with_header.samples()[1].velocity == doctest::Approx(10.0));
}

TEST_CASE("cycle validation reports the row")
{
    try {
        parse_text("1,0\n0,0\n");
        FAIL("expected an error");
    } catch (const InputError& e) {
        CHECK(e.row() == 2);
        CHECK(std::string(e.what()).find("non-monotone") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_text("0,0\n1,-1\n"), InputError);
    CHECK_THROWS_AS(parse_text("0,0\n1,abc\n"), InputError);
    CHECK_THROWS_AS(parse_text("0,0,1\n"), InputError);
    CHECK_THROWS_AS(parse_text("1,0\n2,0\n"), InputError);
}

TEST_CASE("shipped cycle distance matches its documented value")
{
    const auto path = testing::source_dir() / "data" / "wltc_class3b.csv";
    std::ifstream in(path);
    double documented = 0.0;
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("# distance_m=", 0) == 0) {
            documented = std::stod(line.substr(13));
        }
    }
    REQUIRE(documented > 0.0);
    const auto cycle = load_cycle(path);
    CHECK(cycle.size() == 1801);
    CHECK(std::abs(cycle.distance() - documented) / documented < 0.005);
}

TEST_CASE("force balance at constant highway speed")
{
    const VehicleParameters veh;
    const auto pts = cycle_to_operating_points(constant_cycle(27.78, 10), veh);
    CHECK(pts[5].torque == doctest::Approx(12.71).epsilon(1e-3));
    CHECK(pts[5].speed_rpm == doctest::Approx(9534).epsilon(1e-3));
    const double aero = 0.5 * 1.25 * 0.25 * 2.22 * 27.78 * 27.78;
    CHECK(aero == doctest::Approx(267.7).epsilon(1e-3));
    CHECK(tractive_force(veh, 27.78, 0.0) - aero == doctest::Approx(189.0).epsilon(1e-3));
}

TEST_CASE("standstill and inertial term")
{
    const VehicleParameters veh;
    CHECK(tractive_force(veh, 0.0, 0.0) == 0.0);
    const auto still = cycle_to_operating_points(constant_cycle(0.0, 3), veh);
    for (const auto& p : still) {
        CHECK(p.torque == 0.0);
        CHECK(p.speed_rpm == 0.0);
    }
    const double inertial = tractive_force(veh, 10.0, 1.0) - tractive_force(veh, 10.0, 0.0);
    CHECK(inertial * veh.wheel_radius / veh.gear_ratio == doctest::Approx(53.6).epsilon(1e-3));
}

TEST_CASE("torque independent of sample spacing at constant speed")
{
    const VehicleParameters veh;
    std::vector<CycleSample> coarse{{0, 15}, {5, 15}, {10, 15}};
    std::vector<CycleSample> fine;
    for (int t = 0; t <= 10; ++t) {
        fine.push_back({0.5 * t, 15});
    }
    const auto a = cycle_to_operating_points(DriveCycle("c", coarse), veh);
    const auto b = cycle_to_operating_points(DriveCycle("f", fine), veh);
    CHECK(a[1].torque == doctest::Approx(b[3].torque).epsilon(1e-12));
}

TEST_CASE("machine count halves torque")
{
    VehicleParameters one;
    VehicleParameters two;
    two.machine_count = 2;
    const auto cycle = constant_cycle(20.0, 4);
    const auto a = cycle_to_operating_points(cycle, one);
    const auto b = cycle_to_operating_points(cycle, two);
    CHECK(b[2].torque == doctest::Approx(0.5 * a[2].torque).epsilon(1e-12));
    CHECK(b[2].speed_rpm == a[2].speed_rpm);
}

TEST_CASE("gear efficiency acts against the power flow")
{
    VehicleParameters veh;
    veh.gear_efficiency = 0.9;
    std::vector<CycleSample> s{{0, 20}, {1, 19}, {2, 18}, {3, 17}};
    const auto pts = cycle_to_operating_points(DriveCycle("braking", s), veh);
    const double force = tractive_force(veh, 19, -1.0);
    REQUIRE(force < 0.0);
    CHECK(pts[1].torque == doctest::Approx(force * veh.wheel_radius / veh.gear_ratio * 0.9));
}

TEST_CASE("energy balance over a smooth cycle")
{
    const VehicleParameters veh;
    std::vector<CycleSample> s;
    for (int t = 0; t <= 400; ++t) {
        s.push_back({static_cast<double>(t), 12.0 + 6.0 * std::sin(2.0 * std::numbers::pi * t / 200.0)});
    }
    const DriveCycle cycle("smooth", s);
    const auto acc = cycle.accelerations();
    const auto w = cycle.time_weights();
    double traction = 0.0;
    double resistive = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double v = s[i].velocity;
        traction += tractive_force(veh, v, acc[i]) * v * w[i];
        resistive += tractive_force(veh, v, 0.0) * v * w[i];
    }
    const double kinetic = veh.mass * 0.5 * (s.back().velocity * s.back().velocity - s[0].velocity * s[0].velocity);
    CHECK(std::abs(traction - (kinetic + resistive)) / std::abs(traction) < 1e-3);
}

TEST_CASE("full-load envelope")
{
    const auto& motor = testing::default_config().system.motor;
    CHECK(motor.corner_speed_rpm() == doctest::Approx(4863.8).epsilon(1e-4));

    const auto two = full_load_envelope(motor, 2);
    REQUIRE(two.size() == 4);
    CHECK(two[0].speed_rpm == 0.0);
    CHECK(two[0].torque == doctest::Approx(589.0));
    CHECK(two[1].speed_rpm == doctest::Approx(16000));
    CHECK(two[1].torque == doctest::Approx(300e3 / (16000 * 2 * std::numbers::pi / 60)));
    CHECK(two[2].torque == doctest::Approx(-589.0));

    const auto env = full_load_envelope(motor, 25);
    REQUIRE(env.size() == 50);
    bool corner = false;
    for (const auto& p : env) {
        CHECK(std::abs(p.torque) <= motor.envelope_torque(p.speed_rpm) + 1e-9);
        if (std::abs(p.speed_rpm - 5000) < 250 && p.torque == doctest::Approx(589.0)) {
            corner = true;
        }
    }
    CHECK(corner);
    CHECK_THROWS_AS(full_load_envelope(motor, 1), InputError);
}

TEST_CASE("points outside the envelope are clamped")
{
    const auto& motor = testing::default_config().system.motor;
    std::vector<OperatingPoint> pts{{1000, 700, 1}, {20000, 10, 1}, {1000, -50, 1}};
    CHECK(clamp_to_envelope(pts, motor) == 2);
    CHECK(pts[0].torque == doctest::Approx(589));
    CHECK(pts[1].speed_rpm == doctest::Approx(16000));
    CHECK(pts[2].torque == -50);
}
