#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "test_support.hpp"
#include "tractionopt/config.hpp"
#include "tractionopt/errors.hpp"

using namespace tractionopt;

namespace {

nlohmann::json default_json()
{
    std::ifstream in(testing::source_dir() / "config" / "default.json");
    return nlohmann::json::parse(in);
}

PipelineConfig parse(const nlohmann::json& j)
{
    return parse_config(j.dump(), testing::source_dir() / "config");
}

std::string error_key(const nlohmann::json& j)
{
    try {
        parse(j);
    } catch (const ConfigError& e) {
        return e.key();
    }
    return "";
}

}  // namespace

TEST_CASE("default configuration carries the physical constants")
{
    const auto& c = testing::default_config();
    CHECK(c.system.thermal.max_junction_temperature == 175.0);
    CHECK(c.system.thermal.heatsink_temperature == 65.0);
    CHECK(c.system.max_ripple == 15.0);
    CHECK(c.system.dc_capacitance == 500e-6);
    CHECK(c.system.chip_granule == 25.0);
    CHECK(c.system.harmonics.f_max == 1e6);
    CHECK(c.policy.grid.front() == 6e3);
    CHECK(c.policy.grid.back() == 18e3);
    CHECK(c.families.size() >= 6);
}

TEST_CASE("unknown and missing keys name the dotted path")
{
    auto extra = default_json();
    extra["vehicle"]["spoiler"] = 1;
    CHECK(error_key(extra) == "vehicle.spoiler");

    auto missing = default_json();
    missing["inverter"].erase("dc_voltage");
    CHECK(error_key(missing) == "inverter.dc_voltage");

    auto typed = default_json();
    typed["thermal"]["max_junction_temperature"] = "hot";
    CHECK(error_key(typed) == "thermal.max_junction_temperature");

    auto bad_value = default_json();
    bad_value["inverter"]["dc_capacitance"] = -1.0;
    CHECK(error_key(bad_value).rfind("inverter.dc_capacitance", 0) == 0);
}

TEST_CASE("configuration hash tracks values")
{
    const auto base = parse(default_json());
    const auto same = parse(default_json());
    CHECK(config_hash(base) == config_hash(same));
    CHECK(config_hash(base).size() == 64);

    auto changed = default_json();
    changed["inverter"]["max_ripple"] = 16;
    CHECK(config_hash(parse(changed)) != config_hash(base));

    // Formatting and key order do not matter.
    CHECK(config_hash(parse_config(default_json().dump(4), testing::source_dir() / "config")) == config_hash(base));
}

TEST_CASE("sha256 reference vectors")
{
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}
