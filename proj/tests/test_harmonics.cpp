#include <cmath>
#include <random>

#include "doctest.h"
#include "tractionopt/harmonics.hpp"

using namespace tractionopt;

namespace {

FrequencyCurve flat(double value)
{
    return FrequencyCurve({1e3, 1e6}, {value, value});
}

HarmonicMotorParameters flat_params()
{
    HarmonicMotorParameters p;
    p.d_inductance = flat(1e-4);
    p.q_inductance = flat(1e-4);
    p.iron_resistance = flat(5.0);
    p.magnet_resistance = flat(4.0);
    p.copper_resistance = flat(1.0);
    return p;
}

}  // namespace

TEST_CASE("empty spectrum carries no loss")
{
    const auto r = harmonic_losses({}, flat_params());
    CHECK(r.copper == 0.0);
    CHECK(r.iron == 0.0);
    CHECK(r.magnet == 0.0);
    CHECK(r.total == 0.0);
}

TEST_CASE("single-bin hand values")
{
    auto p = flat_params();
    HarmonicSpectrum one{{{10e3, 1.0, 0.0}}};
    CHECK(harmonic_losses(one, p).copper == doctest::Approx(1.0).epsilon(1e-12));

    HarmonicSpectrum iron{{{10e3, 3.0, 4.0}}};
    CHECK(harmonic_losses(iron, p).iron == doctest::Approx(5.0).epsilon(1e-12));

    HarmonicSpectrum mag{{{10e3, 2.0, 0.0}}};
    CHECK(harmonic_losses(mag, p).magnet == doctest::Approx(1.0).epsilon(1e-12));

    p.k_iron = 2.0;
    CHECK(harmonic_losses(iron, p).iron == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("components sum exactly and scale quadratically")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> amp(0.0, 5.0);
    const auto p = flat_params();
    HarmonicSpectrum s;
    for (int k = 1; k <= 40; ++k) {
        s.bins.push_back({5e3 * k, amp(rng), amp(rng)});
    }
    const auto r = harmonic_losses(s, p);
    CHECK(r.total == r.magnet + r.iron + r.copper);
    HarmonicSpectrum scaled = s;
    for (auto& b : scaled.bins) {
        b.u_d *= 3.0;
        b.u_q *= 3.0;
    }
    const auto r3 = harmonic_losses(scaled, p);
    CHECK(r3.copper == doctest::Approx(9.0 * r.copper).epsilon(1e-12));
    CHECK(r3.iron == doctest::Approx(9.0 * r.iron).epsilon(1e-12));
    CHECK(r3.magnet == doctest::Approx(9.0 * r.magnet).epsilon(1e-12));
}

TEST_CASE("curves refuse to extrapolate")
{
    const auto p = flat_params();
    HarmonicSpectrum low{{{500.0, 1.0, 1.0}}};
    HarmonicSpectrum high{{{2e6, 1.0, 1.0}}};
    CHECK_THROWS(harmonic_losses(low, p));
    CHECK_THROWS(harmonic_losses(high, p));
    CHECK_THROWS(static_cast<void>(flat(1.0).at(999.0)));
}

TEST_CASE("log-frequency interpolation and power law")
{
    const FrequencyCurve c({1e3, 1e5}, {1.0, 3.0});
    CHECK(c.at(1e4) == doctest::Approx(2.0).epsilon(1e-12));
    const auto pl = FrequencyCurve::power_law(1e3, 1e6, 10, 1e3, 40.0, 0.5);
    CHECK(pl.at(1e5) == doctest::Approx(400.0).epsilon(1e-9));
    CHECK(pl.scaled(2.0).at(1e5) == doctest::Approx(800.0).epsilon(1e-9));
    FrequencyCurve::Cursor cur(pl);
    for (double f = 1e3; f < 1e6; f *= 1.37) {
        CHECK(cur(f, std::log(f)) == doctest::Approx(pl.at(f)).epsilon(1e-12));
    }
}

TEST_CASE("turn scaling of harmonic parameters")
{
    const auto p = flat_params();
    const auto s = scale_harmonic_parameters(p, 1.75);
    CHECK(s.d_inductance.at(1e4) == doctest::Approx(1e-4 * 1.75 * 1.75));
    CHECK(s.iron_resistance.at(1e4) == doctest::Approx(5.0 * 1.75 * 1.75));
}

TEST_CASE("switching window")
{
    auto p = flat_params();
    CHECK(p.window_low(10e3) == doctest::Approx(5e3));
}
