#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "flownet/cli.hpp"
#include "test_support.hpp"

using namespace flownet;
using namespace flownet::testing;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "flownet");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path temp_dir(const std::string& name) {
    auto p = fs::temp_directory_path() / name;
    fs::remove_all(p);
    return p;
}

fs::path write_temp(const std::string& name, const std::string& text) {
    auto p = fs::temp_directory_path() / name;
    std::ofstream(p) << text;
    return p;
}

}  // namespace

TEST_CASE("verify passes on the two-junction network") {
    const auto r = run({"verify", "--scenario", scenario_path("example_2_1.scenario")});
    CHECK(r.code == kExitOk);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["status"] == "ok");
    CHECK(j["violations"] == 0);
}

TEST_CASE("verify exits 3 when the slack is too tight to hold") {
    // With zero slack the discrete regulator step at the boundary is a violation.
    const auto r = run({"verify", "--scenario", scenario_path("example_2_1.scenario"), "--eps-factor", "0"});
    CHECK(r.code == kExitInvariantViolation);
}

TEST_CASE("equilibrium prints the stationary outflow") {
    const auto r = run({"equilibrium", "--scenario", scenario_path("single_cell.scenario")});
    CHECK(r.code == kExitOk);
    CHECK(r.out == "link,a\nc,0\n");
    const auto chain = run({"equilibrium", "--scenario", scenario_path("two_cell_chain.scenario")});
    CHECK(chain.out.find("e2,0.47999999999999998") != std::string::npos);
    CHECK(chain.out.find("# inflow segment 1") != std::string::npos);
}

TEST_CASE("compare-oracle on a closed-form scenario") {
    const auto r = run({"compare-oracle", "--scenario", scenario_path("single_cell.scenario"), "--json"});
    CHECK(r.code == kExitOk);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["sup_distance"].get<double>() <= j["reference_bound"].get<double>());
    CHECK(j.contains("closed_form"));
    const auto tight = run({"compare-oracle", "--scenario", scenario_path("two_cell_chain.scenario"), "--max-distance", "1e-12"});
    CHECK(tight.code == kExitInvariantViolation);
}

TEST_CASE("simulate and plot-data write their files") {
    const auto dir = temp_dir("flownet_cli_out");
    auto r = run({"simulate", "--scenario", scenario_path("two_cell_chain.scenario"), "--out", dir.string()});
    CHECK(r.code == kExitOk);
    CHECK(fs::exists(dir / "trajectory.csv"));
    CHECK(fs::exists(dir / "report.json"));
    r = run({"plot-data", "--scenario", scenario_path("two_cell_chain.scenario"), "--out", dir.string(), "--stride", "5"});
    CHECK(r.code == kExitOk);
    CHECK(fs::exists(dir / "volumes.csv"));
    CHECK(fs::exists(dir / "controls.csv"));
    fs::remove_all(dir);
}

TEST_CASE("validation failures exit 1 with a structured error") {
    const auto bad = write_temp("flownet_bad.scenario", R"({"nodes": ["a","b"], "links": [{"id":"e","tail":"a","head":"b"}],
        "routing": [{"from":"e","to":"nope","fraction":0.5}],
        "controllers": [{"kind":"constant","links":["e"],"value":1}], "horizon": 1, "step": 0.1})");
    const auto r = run({"verify", "--scenario", bad.string()});
    CHECK(r.code == kExitValidation);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["status"] == "error");
    CHECK(j["exit_code"] == 1);
    CHECK(j["issues"].size() >= 1);

    const auto garbage = write_temp("flownet_garbage.scenario", "{ not json");
    CHECK(run({"simulate", "--scenario", garbage.string(), "--out", "/tmp/x"}).code == kExitValidation);
    CHECK(run({"verify", "--scenario", "/nonexistent.scenario"}).code == kExitValidation);
    CHECK(run({"frobnicate"}).code == kExitValidation);
    CHECK(run({}).code == kExitValidation);
    fs::remove(bad);
    fs::remove(garbage);
}

TEST_CASE("non-convergence exits 2") {
    // Windows span several steps here, so one pass per window cannot settle.
    const auto r = run({"verify", "--scenario", scenario_path("two_cell_chain.scenario"), "--max-picard", "1"});
    CHECK(r.code == kExitNonConvergence);
    CHECK(nlohmann::json::parse(r.out)["kind"] == "non_convergence");
}
