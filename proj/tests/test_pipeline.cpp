#include <cstdlib>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "doctest.h"
#include "json.hpp"
#include "test_support.hpp"
#include "tractionopt/pipeline.hpp"

using namespace tractionopt;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir()
{
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / ("tractionopt_pipeline_" + std::to_string(::getpid()));
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

/// Default configuration reduced to the B6 family and a three-sample cycle.
nlohmann::json minimal_config()
{
    std::ofstream(scratch_dir() / "cycle.csv") << "t,v\n0,0\n1,5\n2,10\n";
    std::ifstream in(testing::source_dir() / "config" / "default.json");
    auto j = nlohmann::json::parse(in);
    j["cycle"]["file"] = (scratch_dir() / "cycle.csv").string();
    auto families = nlohmann::json::array();
    for (const auto& f : j["families"]) {
        if (f["topology"] == "B6") {
            families.push_back(f);
        }
    }
    j["families"] = families;
    return j;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST_CASE("minimal pipeline and byte-identical rerun")
{
    const auto cfg = parse_config(minimal_config().dump(), scratch_dir());
    RunOptions opt;
    opt.verbose = false;
    const auto a = run_pipeline(cfg, scratch_dir() / "a", opt);
    CHECK(a.complete);
    CHECK(a.designs.size() == 1);
    REQUIRE(a.front.size() == 1);
    CHECK(a.front[0].design == "B6");
    CHECK(a.designs[0].delta_e.has_value());

    const auto b = run_pipeline(cfg, scratch_dir() / "b", opt);
    CHECK(a.files == b.files);
    for (const auto& [path, hash] : a.files) {
        CHECK(slurp(scratch_dir() / "a" / path) == slurp(scratch_dir() / "b" / path));
    }
    CHECK(slurp(scratch_dir() / "a" / "manifest.json") == slurp(scratch_dir() / "b" / "manifest.json"));
    const auto manifest = nlohmann::json::parse(slurp(scratch_dir() / "a" / "manifest.json"));
    CHECK(manifest["complete"] == true);
    CHECK(manifest["config_hash"] == config_hash(cfg));
}

TEST_CASE("corrupted configuration fails before writing")
{
    auto j = minimal_config();
    j["inverter"]["dc_link"] = 1;
    const auto cfg_path = scratch_dir() / "broken.json";
    std::ofstream(cfg_path) << j.dump(2);
    const auto out = scratch_dir() / "broken_out";
    const auto err = scratch_dir() / "broken.err";
    const std::string cmd = std::string("\"") + TRACTIONOPT_CLI + "\" run --config \"" + cfg_path.string() +
                            "\" --out \"" + out.string() + "\" 2> \"" + err.string() + "\"";
    const int status = std::system(cmd.c_str());
    CHECK(status != 0);
    CHECK_FALSE(fs::exists(out));
    const auto message = slurp(err);
    CHECK(message.find("[config]") != std::string::npos);
    CHECK(message.find("inverter.dc_link") != std::string::npos);
}

TEST_CASE("failing stage leaves an incomplete manifest")
{
    auto j = minimal_config();
    std::ofstream(scratch_dir() / "still.csv") << "t,v\n0,0\n1,0\n2,0\n";
    j["cycle"]["file"] = (scratch_dir() / "still.csv").string();
    const auto cfg = parse_config(j.dump(), scratch_dir());
    RunOptions opt;
    opt.verbose = false;
    try {
        run_pipeline(cfg, scratch_dir() / "still", opt);
        FAIL("expected a stage error");
    } catch (const StageError& e) {
        CHECK(e.stage() == Stage::evaluate);
        CHECK(std::string(e.what()).rfind("[evaluate]", 0) == 0);
    }
    const auto manifest = nlohmann::json::parse(slurp(scratch_dir() / "still" / "manifest.json"));
    CHECK(manifest["complete"] == false);
    CHECK(manifest["failed_stage"] == "evaluate");
}
