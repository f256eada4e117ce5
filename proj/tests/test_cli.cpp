#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "uavad/io.hpp"
#include "uavad/synth.hpp"

using namespace uavad;
namespace fs = std::filesystem;

#ifndef UAVAD_CLI_PATH
#error "UAVAD_CLI_PATH must point at the built CLI binary"
#endif

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string("\"") + UAVAD_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path fresh_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("uavad_cli_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("cli: synth/score/evaluate round trip through the binary") {
    const fs::path dir = fresh_dir("roundtrip");
    const ScenarioConfig scenario = preset_scenario("local", true, 30, 5);
    atomic_write_file(dir / "scenario.json", scenario_to_json_text(scenario));

    CHECK(run_cli("synth --config " + (dir / "scenario.json").string() + " --out " +
                  (dir / "ds").string()) == 0);
    CHECK(fs::exists(dir / "ds" / "annotations.csv"));
    CHECK(fs::exists(dir / "ds" / "manifest.json"));

    // evaluate over hand-written scores exercises the read side.
    atomic_write_file(dir / "scores.csv", "frame,score,verdict\n0,0.100000,normal\n"
                                          "1,0.900000,anomalous\n");
    atomic_write_file(dir / "ann.csv", "frame,label\n0,0\n1,1\n");
    CHECK(run_cli("evaluate --scores " + (dir / "scores.csv").string() + " --labels " +
                  (dir / "ann.csv").string() + " --roc " + (dir / "roc.csv").string()) == 0);
    CHECK(fs::exists(dir / "roc.csv"));
}

TEST_CASE("cli: errors exit nonzero with a diagnostic") {
    const fs::path dir = fresh_dir("errors");
    SUBCASE("missing config file") {
        CHECK(run_cli("synth --config " + (dir / "nope.json").string() + " --out " +
                      (dir / "out").string()) == 1);
    }
    SUBCASE("unknown subcommand") {
        CHECK(run_cli("transmogrify") != 0);
    }
    SUBCASE("score without a usable bundle") {
        atomic_write_file(dir / "features.csv", "bad header\n");
        CHECK(run_cli("score --bundle " + (dir / "missing").string() + " --features " +
                      (dir / "features.csv").string() + " --out " + (dir / "s.csv").string()) ==
              1);
    }
    SUBCASE("invalid flow source flag") {
        CHECK(run_cli("extract --bundle x --data y --out z --flow sideways") == 1);
    }
}

TEST_CASE("cli: seed override changes the synthesized bytes") {
    const fs::path dir = fresh_dir("seed");
    const ScenarioConfig scenario = preset_scenario("local", false, 10, 5);
    atomic_write_file(dir / "scenario.json", scenario_to_json_text(scenario));
    const std::string base = "synth --config " + (dir / "scenario.json").string();
    CHECK(run_cli(base + " --out " + (dir / "a").string() + " --seed 1") == 0);
    CHECK(run_cli(base + " --out " + (dir / "b").string() + " --seed 1") == 0);
    CHECK(run_cli(base + " --out " + (dir / "c").string() + " --seed 2") == 0);
    CHECK(read_file(dir / "a" / "frames" / "000000.ppm") ==
          read_file(dir / "b" / "frames" / "000000.ppm"));
    CHECK(read_file(dir / "a" / "frames" / "000000.ppm") !=
          read_file(dir / "c" / "frames" / "000000.ppm"));
}
