#include <catch_amalgamated.hpp>

#include "semiclassical/config.hpp"
#include "semiclassical/error.hpp"
#include "support.hpp"

using namespace semiclassical;
using nlohmann::json;

namespace {

json minimal()
{
    return json::parse(R"({
      "grid": {"extents": [64], "origin": [-1.2], "upper": [1.2], "boundary": "dirichlet_zero"},
      "case": "stationary",
      "lambda": 1.0,
      "E": 0.0,
      "modes": {
        "R": {"kind": "plane_wave_superposition", "wavevectors": [[1.0]], "amplitudes": [1.0]},
        "S_tilde": {"kind": "plane_wave_superposition", "wavevectors": [[1.0]], "amplitudes": [1.0],
                    "phases": [-1.5707963267948966]}
      }
    })");
}

}  // namespace

TEST_CASE("minimal stationary config builds", "[config]")
{
    const ScenarioConfig cfg(minimal());
    CHECK(cfg.id() == "scenario");
    CHECK(cfg.grid().extent(0) == 64);
    CHECK(cfg.grid().upper(0) == Catch::Approx(1.2));
    CHECK(cfg.constants().hbar == 1.0);
    CHECK(cfg.scenario_case() == ScenarioCase::stationary);
    const auto s = cfg.build();
    CHECK(s.config_hash == cfg.hash());
    CHECK(s.phase[0][32] == Catch::Approx(std::tan(s.grid.coordinate(0, 32))).margin(1e-12));
}

TEST_CASE("unknown keys are rejected with their path", "[config]")
{
    auto doc = minimal();
    doc["grid"]["spacnig"] = 0.1;
    try {
        ScenarioConfig{doc};
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("grid.spacnig") != std::string::npos);
    }
    auto top = minimal();
    top["extra"] = 1;
    CHECK_THROWS_AS(ScenarioConfig{top}, ConfigError);
    auto mode = minimal();
    mode["modes"]["R"]["colour"] = "red";
    CHECK_THROWS_AS(ScenarioConfig{mode}, ConfigError);
}

TEST_CASE("malformed values are rejected", "[config]")
{
    auto neg = minimal();
    neg["constants"] = {{"hbar", -1.0}, {"mass", 1.0}};
    CHECK_THROWS_AS(ScenarioConfig{neg}, ConfigError);
    auto bad_case = minimal();
    bad_case["case"] = "steady";
    CHECK_THROWS_AS(ScenarioConfig{bad_case}, ConfigError);
    auto dim = minimal();
    dim["grid"]["extents"] = {8, 8, 8, 8};
    CHECK_THROWS_AS(ScenarioConfig{dim}, ConfigError);
}

TEST_CASE("overrides edit nested keys and revalidate", "[config]")
{
    ScenarioConfig cfg(minimal());
    const auto before = cfg.hash();
    cfg.apply_override("E=0.5");
    CHECK(cfg.document()["E"] == 0.5);
    CHECK(cfg.hash() != before);
    cfg.apply_override("grid.extents=[32]");
    CHECK(cfg.grid().extent(0) == 32);
    cfg.apply_override("id=custom");
    CHECK(cfg.id() == "custom");
    CHECK_THROWS_AS(cfg.apply_override("no_equals_sign"), ConfigError);
    CHECK_THROWS_AS(cfg.apply_override("grid.bogus=1"), ConfigError);
    CHECK_THROWS_AS(cfg.apply_override("E.value=1"), ConfigError);
}

TEST_CASE("hash is independent of key order", "[config]")
{
    const auto a = ScenarioConfig(json::parse(minimal().dump()));
    json reordered = json::object();
    const auto src = minimal();
    for (auto it = src.rbegin(); it != src.rend(); ++it) reordered[it.key()] = it.value();
    CHECK(ScenarioConfig(reordered).hash() == a.hash());
    CHECK(a.hash().size() == 16);
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("seeded particles are reproducible and in range", "[config]")
{
    auto doc = minimal();
    doc["dynamics"] = json::parse(R"({"dt": 0.01, "T": 1.0, "snapshot_stride": 10,
        "particles": [{"x0": [0.1]}],
        "random_particles": {"count": 5, "lower": [-0.5], "upper": [0.5]}})");
    doc["seed"] = 42;
    const auto a = ScenarioConfig(doc).dynamics();
    const auto b = ScenarioConfig(doc).dynamics();
    REQUIRE(a.x0.size() == 6);
    CHECK(a.x0[0][0] == 0.1);
    for (std::size_t p = 0; p < a.x0.size(); ++p) {
        CHECK(a.x0[p] == b.x0[p]);
        CHECK(a.x0[p][0] >= -0.5);
        CHECK(a.x0[p][0] <= 0.5);
    }
    doc["seed"] = 43;
    CHECK(ScenarioConfig(doc).dynamics().x0[1] != a.x0[1]);
}

TEST_CASE("mode JSON round trip", "[config]")
{
    HelmholtzMode m;
    m.kind = ModeKind::separable_trig;
    m.lambda = std::sqrt(2.0);
    m.wavevectors = {{1.0, 1.0}};
    m.amplitudes = {2.0};
    m.phases = {0.25};
    const auto back = mode_from_json(mode_to_json(m), m.lambda);
    CHECK(back.kind == m.kind);
    CHECK(back.wavevectors == m.wavevectors);
    CHECK(back.amplitudes == m.amplitudes);
    CHECK(back.phases == m.phases);
}

TEST_CASE("gauge and compare sections", "[config]")
{
    auto doc = minimal();
    doc["gauge"] = {{"f", "-K"}, {"T", 2.0}, {"samples", 21}};
    doc["compare"] = {{"tolerance", 1e-4}, {"potential_tilt", 0.1}};
    const ScenarioConfig cfg(doc);
    const auto g = cfg.gauge();
    REQUIRE(g);
    CHECK(g->kind == "-K");
    CHECK(g->T == 2.0);
    CHECK(g->samples == 21);
    CHECK(cfg.compare().tolerance == 1e-4);
    CHECK(cfg.compare().potential_tilt == 0.1);
    CHECK_FALSE(ScenarioConfig(minimal()).gauge());
}

TEST_CASE("time-dependent config with solved phase numerator", "[config][time]")
{
    const auto doc = json::parse(R"({
      "grid": {"extents": [101], "origin": [-1.0], "upper": [1.0], "boundary": "dirichlet_zero"},
      "case": "time_dependent",
      "lambda_schedule": {"times": [0, 0.1, 0.2, 0.3, 0.4, 0.5], "values": [1, 1.02, 1.04, 1.06, 1.08, 1.1]},
      "modes": {
        "R": {"kind": "plane_wave_superposition", "wavevectors": [[1.0]], "amplitudes": [1.0], "amplitude_rates": [0.5]},
        "phi_tilde": "solve"
      }
    })");
    const auto s = ScenarioConfig(doc).build();
    REQUIRE(s.slices() == 6);
    CHECK(s.lambda_at_slice(5) == Catch::Approx(1.1));
    const double x = s.grid.coordinate(0, 20);
    CHECK(s.amplitude[5][20] == Catch::Approx(1.25 * std::cos(1.1 * x)));
}
