#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "tractionopt/errors.hpp"
#include "tractionopt/explorer.hpp"

using namespace tractionopt;

namespace {

ParetoPoint pp(const std::string& name, double area, double de)
{
    ParetoPoint p;
    p.design = name;
    p.area = area;
    p.delta_e = de;
    return p;
}

/// TNPC-like bounds: outer switches fixed, mid-point switches auxiliary.
FamilyAreas tnpc_areas()
{
    FamilyAreas fa;
    fa.label = "TNPC_X(2L/3L)";
    fa.baseline_area = 1056.0;
    for (int j = 0; j < 12; ++j) {
        const bool mid = j % 4 >= 2;
        fa.mandatory.push_back(mid ? 25.0 : 150.0);
        fa.full.push_back(mid ? 100.0 : 150.0);
        fa.auxiliary.push_back(mid);
    }
    return fa;
}

}  // namespace

TEST_CASE("pareto front by hand")
{
    const auto r = pareto_front({pp("a", 100, 5), pp("b", 200, 4), pp("c", 150, 6)});
    REQUIRE(r.front.size() == 2);
    CHECK(r.front[0].design == "a");
    CHECK(r.front[1].design == "b");
    REQUIRE(r.dominated.size() == 1);
    CHECK(r.dominated[0].design == "c");
    CHECK_FALSE(r.dominated[0].dominated_by.empty());

    const auto single = pareto_front({pp("only", 1, 1)});
    CHECK(single.front.size() == 1);
    CHECK(single.dominated.empty());
}

TEST_CASE("pareto front matches quadratic dominance")
{
    std::mt19937_64 rng(42);
    std::uniform_int_distribution<int> coarse(0, 40);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<ParetoPoint> pts;
        for (int i = 0; i < 1000; ++i) {
            pts.push_back(pp("p" + std::to_string(i), 1000.0 + 25.0 * coarse(rng), 10.0 + 0.1 * coarse(rng)));
        }
        std::vector<bool> expected(pts.size(), true);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            for (std::size_t j = 0; j < pts.size(); ++j) {
                if (dominates(pts[j], pts[i])) {
                    expected[i] = false;
                    break;
                }
            }
        }
        const auto r = pareto_front(pts);
        std::vector<bool> got(pts.size(), false);
        for (const auto& p : r.front) {
            got[static_cast<std::size_t>(std::stoi(p.design.substr(1)))] = true;
        }
        CHECK(got == expected);
        CHECK(r.front.size() + r.dominated.size() == pts.size());
        for (std::size_t k = 1; k < r.front.size(); ++k) {
            CHECK(r.front[k - 1].area <= r.front[k].area);
        }
    }
}

TEST_CASE("dominance relation")
{
    CHECK(dominates(pp("a", 1, 1), pp("b", 2, 1)));
    CHECK(dominates(pp("a", 1, 1), pp("b", 1, 2)));
    CHECK_FALSE(dominates(pp("a", 1, 1), pp("b", 1, 1)));
    CHECK_FALSE(dominates(pp("a", 1, 3), pp("b", 2, 1)));
}

TEST_CASE("surplus area goes to auxiliary switches")
{
    const auto fa = tnpc_areas();
    CHECK(fa.floor_area() == 1050.0);
    CHECK(fa.full_area() == 1500.0);
    const auto areas = allocate_areas(fa, 1.3 * 1056.0, 25.0, Allocation::proportional);
    double total = 0.0;
    for (std::size_t j = 0; j < areas.size(); ++j) {
        total += areas[j];
        CHECK(areas[j] >= fa.mandatory[j]);
        CHECK(areas[j] <= fa.full[j]);
        CHECK(std::fmod(areas[j], 25.0) == 0.0);
        if (!fa.auxiliary[j]) {
            CHECK(areas[j] == fa.mandatory[j]);
        }
    }
    CHECK(total == 1375.0);

    const auto at_floor = allocate_areas(fa, 1050.0, 25.0, Allocation::uniform);
    CHECK(at_floor == fa.mandatory);
    const auto beyond = allocate_areas(fa, 5000.0, 25.0, Allocation::uniform);
    CHECK(beyond == fa.full);
    CHECK_THROWS_AS(allocate_areas(fa, 1000.0, 25.0, Allocation::proportional), InputError);
}

TEST_CASE("area factors")
{
    CHECK(AreaFactor::parse("1.3").value == doctest::Approx(1.3));
    CHECK(AreaFactor::parse("floor").kind == AreaFactor::Kind::floor);
    CHECK(AreaFactor::parse("full").label() == "full");
    CHECK(AreaFactor::parse("1.5").label() == "1.50");
    CHECK_THROWS_AS(AreaFactor::parse("-1"), InputError);
    CHECK_THROWS_AS(AreaFactor::parse("big"), InputError);
    const auto fa = tnpc_areas();
    CHECK(resolve_factor(AreaFactor::parse("floor"), fa) == doctest::Approx(1050.0 / 1056.0));
    CHECK(resolve_factor(AreaFactor::parse("full"), fa) == doctest::Approx(1500.0 / 1056.0));
}

TEST_CASE("auxiliary switch sets")
{
    const auto tnpc = auxiliary_switches(Topology::tnpc, {Mode::two_level, Mode::three_level});
    CHECK(tnpc[2]);
    CHECK(tnpc[3]);
    CHECK_FALSE(tnpc[0]);
    const auto single = auxiliary_switches(Topology::tnpc, {Mode::three_level});
    CHECK(std::count(single.begin(), single.end(), true) == 0);
    const auto dual = auxiliary_switches(Topology::b6_2y, {Mode::h_bridge, Mode::star});
    CHECK(dual[12]);
    CHECK(dual[14]);
}
