#include <cmath>

#include "doctest.h"
#include "test_support.hpp"
#include "tractionopt/device_thermal.hpp"
#include "tractionopt/errors.hpp"

using namespace tractionopt;

namespace {

DeviceTech synthetic_device()
{
    DeviceTech t;
    t.name = "synthetic";
    t.specific_on_resistance = 0.3;
    t.k_on = 1e-6;
    t.k_off = 1e-6;
    t.specific_output_charge = 1e-8;
    return t;
}

/// One-period trace with a constant 100 A conducting the whole period.
SwitchingTrace constant_current_trace(double amps)
{
    SwitchingTrace tr;
    tr.period = 1e-2;
    tr.time_step = 1e-5;
    tr.sample_count = 1000;
    tr.phase_currents[0] = {amps, 0.0, 0.0};
    SwitchChannel ch;
    ch.id = "T";
    ch.conduction.push_back({0.0, tr.period});
    tr.switches.push_back(ch);
    return tr;
}

}  // namespace

TEST_CASE("thermal resistance law")
{
    const double areas[] = {1.0, 25.0, 100.0, 625.0};
    const double expected[] = {3.0, 0.8278, 0.4755, 0.2286};
    for (int k = 0; k < 4; ++k) {
        CHECK(thermal_resistance(areas[k]) == doctest::Approx(expected[k]).epsilon(2e-4));
        CHECK(std::abs(thermal_resistance(areas[k]) - 3.0 * std::pow(areas[k], -0.4)) <=
              1e-12 * 3.0 * std::pow(areas[k], -0.4));
    }
}

TEST_CASE("junction temperature")
{
    const auto idle = junction_temperature(0.0, 25.0);
    CHECK(idle.junction_temperature == 65.0);
    CHECK(idle.feasible);
    const auto r = junction_temperature(100.0, 25.0);
    CHECK(r.thermal_resistance == doctest::Approx(0.8278).epsilon(2e-4));
    CHECK(r.junction_temperature == doctest::Approx(147.8).epsilon(1e-3));
    CHECK(r.feasible);
    CHECK_FALSE(junction_temperature(1000.0, 25.0).feasible);
    CHECK(junction_temperature(110.0 / 3.0, 1.0).feasible);
}

TEST_CASE("conduction loss")
{
    const auto tr = constant_current_trace(100.0);
    const SwitchDesign sw{"T", synthetic_device(), 25.0};
    CHECK(conduction_loss(sw, tr, tr.switches[0]) == doctest::Approx(120.0).epsilon(1e-12));
    const auto zero = constant_current_trace(0.0);
    CHECK(conduction_loss(sw, zero, zero.switches[0]) == 0.0);
}

TEST_CASE("switching loss")
{
    DeviceTech t = synthetic_device();
    t.specific_output_charge = 1e-30;
    const SwitchDesign sw{"T", t, 25.0};
    CHECK(switching_loss(sw, {}, 100.0) == 0.0);

    const double f_f = 100.0;
    for (double fsw : {5e3, 10e3, 20e3}) {
        std::vector<SwitchingEvent> events;
        const int per_period = static_cast<int>(fsw / f_f);
        for (int k = 0; k < per_period; ++k) {
            events.push_back({k / fsw, 800.0, 100.0, true});
        }
        CHECK(switching_loss(sw, events, f_f) == doctest::Approx(0.08 * fsw).epsilon(1e-9));
    }
}

TEST_CASE("output charge floor grows with area at zero current")
{
    const DeviceTech t = synthetic_device();
    const std::vector<SwitchingEvent> events{{0.0, 800.0, 0.0, true}, {5e-5, 800.0, 0.0, false}};
    const double small = switching_loss({"T", t, 25.0}, events, 10e3);
    const double large = switching_loss({"T", t, 100.0}, events, 10e3);
    CHECK(small == doctest::Approx(0.5 * 1e-8 * 25.0 * 800.0 * 10e3).epsilon(1e-12));
    CHECK(large == doctest::Approx(4.0 * small).epsilon(1e-12));
}

TEST_CASE("area quantization")
{
    CHECK(quantize_area(23.2) == 25.0);
    CHECK(quantize_area(25.0) == 25.0);
    CHECK(quantize_area(26.0) == 50.0);
    CHECK(quantize_area(0.1) == 25.0);
    CHECK(quantize_area(3 * 0.1, 0.1) == doctest::Approx(0.3));
    CHECK_THROWS_AS(quantize_area(0.0), InputError);
}

TEST_CASE("stress profile agrees with direct loss functions")
{
    const auto& sys = testing::default_system();
    const OperatingPoint p{3000, 400, 1};
    const auto ph = sys.simulate(Topology::b6, Mode::two_level, Variant::none, 10e3, p);
    REQUIRE(ph.electrical_feasible);
    const auto tr = synthesize_period(sys.modulation(Topology::b6, Mode::two_level, Variant::none, 10e3),
                                      ph.solution);
    const auto& tech = sys.config().device_1200v;
    for (std::size_t j = 0; j < tr.switches.size(); ++j) {
        const SwitchDesign sw{tr.switches[j].id, tech, 75.0};
        const auto b = loss_profile(tech, ph.stress[j]).at(75.0);
        CHECK(b.conduction == doctest::Approx(conduction_loss(sw, tr, tr.switches[j])).epsilon(1e-12));
        CHECK(b.switching == doctest::Approx(switching_loss(sw, tr.switches[j].events, tr.fundamental_hz)).epsilon(1e-12));
        CHECK(b.total == b.conduction + b.switching);
    }
}

TEST_CASE("junction temperature falls with area while conduction dominates")
{
    SwitchStress s;
    s.mean_square_current = 200.0 * 200.0;
    s.turn_on_rate = 1e9;
    s.turn_off_rate = 1e9;
    s.hard_on_square_rate = 1e4 * 800.0 * 800.0;
    const auto& tech = testing::default_config().system.device_1200v;
    const ThermalLimits limits;
    double previous = 1e300;
    for (double a = 25.0; a <= 400.0; a += 25.0) {
        const double tj = evaluate_switch(tech, s, a, limits).thermal.junction_temperature;
        CHECK(tj < previous);
        previous = tj;
    }
    const double amin = minimum_feasible_area(tech, s, limits, 25.0, 1000.0);
    REQUIRE(amin > 0.0);
    CHECK(evaluate_switch(tech, s, amin, limits).thermal.feasible);
    if (amin > 25.0) {
        CHECK_FALSE(evaluate_switch(tech, s, amin - 25.0, limits).thermal.feasible);
    }
    s.mean_square_current = 1e9;
    CHECK(minimum_feasible_area(tech, s, limits, 25.0, 1000.0) == 0.0);
}

TEST_CASE("temperature feedback only increases loss")
{
    DeviceTech tech = testing::default_config().system.device_1200v;
    tech.on_resistance_tempco = 0.004;
    SwitchStress s;
    s.mean_square_current = 150.0 * 150.0;
    const ThermalLimits limits;
    const auto plain = evaluate_switch(tech, s, 100.0, limits, false);
    const auto fb = evaluate_switch(tech, s, 100.0, limits, true);
    CHECK(fb.loss.conduction > plain.loss.conduction);
}
