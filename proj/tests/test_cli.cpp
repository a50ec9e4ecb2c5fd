#include <catch_amalgamated.hpp>

#include <fstream>
#include <iterator>
#include <map>
#include <sstream>

#include "semiclassical/cli.hpp"
#include "semiclassical/scenario_io.hpp"
#include "support.hpp"

using namespace semiclassical;
namespace fs = std::filesystem;

namespace {

const fs::path configs = SEMICLASSICAL_CONFIG_DIR;

struct Result {
    int code;
    std::string out, err;
};

Result run(std::vector<std::string> args)
{
    args.insert(args.begin(), "semiclassical");
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string bytes(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string config(const char* name) { return (configs / name).string(); }

}  // namespace

TEST_CASE("headline pipeline passes end to end", "[cli]")
{
    const auto dir = testing::scratch_dir("headline");
    const auto scen = (dir / "scenario").string(), evo = (dir / "evolution").string();
    const auto gen = run({"generate", "--config", config("headline.json"), "--out", scen, "--quiet"});
    INFO(gen.err);
    REQUIRE(gen.code == cli::kExitPass);
    CHECK(fs::exists(fs::path(scen) / "scenario.json"));
    CHECK(fs::exists(fs::path(scen) / "report.json"));

    CHECK(run({"verify", scen, "--quiet"}).code == cli::kExitPass);
    REQUIRE(run({"evolve", scen, "--out", evo, "--quiet"}).code == cli::kExitPass);
    const auto cmp = run({"compare", scen, evo, "--out", (dir / "compare").string()});
    INFO(cmp.out);
    CHECK(cmp.code == cli::kExitPass);
    CHECK(cmp.out.find("trajectory_deviation") != std::string::npos);
    CHECK(fs::exists(dir / "compare" / "bohmian.csv"));
    CHECK(fs::exists(dir / "compare" / "classical.csv"));

    const auto tilted = run({"compare", scen, evo, "--out", (dir / "tilted").string(), "--override",
                             "compare.potential_tilt=0.1", "--quiet"});
    CHECK(tilted.code == cli::kExitFail);

    const auto gauge = run({"gauge", scen, "--evolution", evo, "--out", (dir / "gauge").string(), "--quiet"});
    INFO(gauge.err);
    CHECK(gauge.code == cli::kExitPass);
    const auto report = io::read_json(dir / "gauge" / "report.json");
    bool equivalence = false;
    for (const auto& e : report["entries"]) equivalence |= e["name"] == "zero_quantum_potential_equivalence";
    CHECK(equivalence);
}

TEST_CASE("usage and configuration errors exit 2", "[cli]")
{
    const auto dir = testing::scratch_dir("usage");
    CHECK(run({}).code == cli::kExitUsage);
    CHECK(run({"frobnicate"}).code == cli::kExitUsage);
    CHECK(run({"generate", "--out", dir.string()}).code == cli::kExitUsage);
    CHECK(run({"generate", "--config", (dir / "missing.json").string(), "--out", dir.string()}).code == cli::kExitUsage);
    const auto bad = run({"generate", "--config", config("headline.json"), "--out", dir.string(), "--override",
                          "grid.bogus=1"});
    CHECK(bad.code == cli::kExitUsage);
    CHECK(bad.err.find("grid.bogus") != std::string::npos);
    CHECK(run({"verify", (dir / "nowhere").string()}).code == cli::kExitUsage);
}

TEST_CASE("Helmholtz precondition failure exits 1", "[cli]")
{
    const auto dir = testing::scratch_dir("precondition");
    const auto r = run({"generate", "--config", config("headline.json"), "--out", dir.string(), "--override",
                        "tolerances.helmholtz=1e-12"});
    CHECK(r.code == cli::kExitFail);
    CHECK(r.err.find("helmholtz_R") != std::string::npos);
}

TEST_CASE("resonant phase solve exits 1", "[cli]")
{
    const auto dir = testing::scratch_dir("resonant");
    const auto r = run({"generate", "--config", config("resonant.json"), "--out", dir.string()});
    CHECK(r.code == cli::kExitFail);
    CHECK(r.err.find("resonance") != std::string::npos);
}

TEST_CASE("mask-dominated scenario verifies inconclusive", "[cli]")
{
    const auto dir = testing::scratch_dir("inconclusive");
    REQUIRE(run({"generate", "--config", config("headline.json"), "--out", dir.string(), "--override", "eps_node=0.6",
                 "--quiet"})
                .code == cli::kExitPass);
    CHECK(run({"verify", dir.string(), "--quiet"}).code == cli::kExitInconclusive);
}

TEST_CASE("generation is deterministic", "[cli]")
{
    const auto dir = testing::scratch_dir("determinism");
    for (const char* sub : {"a", "b"})
        REQUIRE(run({"generate", "--config", config("time_dependent.json"), "--out", (dir / sub).string(), "--quiet"})
                    .code == cli::kExitPass);
    for (const auto& entry : fs::directory_iterator(dir / "a")) {
        const auto name = entry.path().filename();
        INFO(name.string());
        CHECK(bytes(entry.path()) == bytes(dir / "b" / name));
    }
}

TEST_CASE("zero gauge leaves payloads bitwise equal; unit gauge gives zeta = -t", "[cli][gauge]")
{
    const auto dir = testing::scratch_dir("gauge_constant");
    const auto scen = dir / "scenario";
    REQUIRE(run({"generate", "--config", config("free_particle.json"), "--out", scen.string(), "--quiet"}).code ==
            cli::kExitPass);
    REQUIRE(run({"gauge", scen.string(), "--out", (dir / "zero").string(), "--override", "gauge.f=0", "--quiet"}).code ==
            cli::kExitPass);
    for (const char* stem : {"R", "S_tilde", "S", "V"}) CHECK(bytes(scen / (std::string(stem) + ".bin")) == bytes(dir / "zero" / (std::string(stem) + ".bin")));

    REQUIRE(run({"gauge", scen.string(), "--out", (dir / "one").string(), "--quiet"}).code == cli::kExitPass);
    const auto g = io::read_json(dir / "one" / "gauge.json");
    CHECK(g["zeta"].back().get<double>() == Catch::Approx(-1.0).margin(1e-14));
    const auto shifted = io::load_scenario(dir / "one");
    CHECK(shifted.energy == Catch::Approx(0.245 + 1.0));
}

TEST_CASE("resting particles stay put under a flat phase", "[cli]")
{
    const auto dir = testing::scratch_dir("resting");
    const auto scen = (dir / "scenario").string(), evo = (dir / "evolution").string();
    // S~ proportional to R: constant phase, zero guidance velocity, constant V.
    const std::vector<std::string> args{"generate", "--config", config("headline.json"), "--out", scen,
                                        "--override", "modes.S_tilde.phases=[0.0]",
                                        "--override", "modes.S_tilde.amplitudes=[0.001]",
                                        "--override", "dynamics.T=0.2", "--quiet"};
    REQUIRE(run(args).code == cli::kExitPass);
    REQUIRE(run({"evolve", scen, "--out", evo, "--quiet"}).code == cli::kExitPass);
    REQUIRE(run({"compare", scen, evo, "--out", (dir / "cmp").string(), "--quiet"}).code == cli::kExitPass);

    std::ifstream in(dir / "cmp" / "classical.csv");
    std::string line;
    std::getline(in, line);
    std::map<int, double> first;
    double worst = 0;
    while (std::getline(in, line)) {
        std::istringstream row(line);
        std::string id, t, x;
        std::getline(row, id, ',');
        std::getline(row, t, ',');
        std::getline(row, x, ',');
        const int p = std::stoi(id);
        if (!first.contains(p)) first[p] = std::stod(x);
        worst = std::max(worst, std::abs(std::stod(x) - first[p]));
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("closed evolution stays unitary at dt and dt / 2", "[cli]")
{
    const auto dir = testing::scratch_dir("unitarity");
    const auto scen = (dir / "scenario").string();
    REQUIRE(run({"generate", "--config", config("periodic_cos2x.json"), "--out", scen, "--quiet"}).code == cli::kExitPass);
    for (const char* dt : {"dynamics.dt=0.001", "dynamics.dt=0.0005"}) {
        const auto out = (dir / dt).string();
        const auto r = run({"evolve", scen, "--out", out, "--override", dt});
        INFO(r.out << r.err);
        CHECK(r.code == cli::kExitPass);
        const auto report = io::read_json(fs::path(out) / "report.json");
        CHECK(report["entries"][0]["name"] == "norm_drift_rate");
        CHECK(report["entries"][0]["measured"].get<double>() <= 1e-10);
    }
}
