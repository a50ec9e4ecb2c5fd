#include "semiclassical/scenario_io.hpp"

#include <cstdio>
#include <fstream>

#include "semiclassical/error.hpp"
#include "semiclassical/field_io.hpp"

namespace semiclassical::io {

namespace fs = std::filesystem;

namespace {

constexpr const char* kScenarioFormat = "semiclassical-scenario";
constexpr const char* kEvolutionFormat = "semiclassical-evolution";
constexpr int kFormatVersion = 1;

std::string slice_stem(const char* name, std::size_t k, bool stationary)
{
    if (stationary) return name;
    char buf[16];
    std::snprintf(buf, sizeof buf, "_%04zu", k);
    return std::string(name) + buf;
}

const char* numerator_name(const SemiclassicalScenario& s)
{
    return s.stationary() ? "S_tilde" : "phi_tilde";
}

const char* phase_name(const SemiclassicalScenario& s)
{
    return s.stationary() ? "S" : "phi";
}

void require_format(const nlohmann::json& j, const char* format, const fs::path& path)
{
    if (j.value("format", "") != format) {
        throw FieldError(path.string() + " is not a " + std::string(format) + " header");
    }
    if (j.value("version", 0) != kFormatVersion) {
        throw FieldError(path.string() + ": unsupported format version");
    }
}

}  // namespace

void write_json(const fs::path& path, const nlohmann::json& j)
{
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << j.dump(2) << '\n';
    if (!out) throw Error("failed writing " + path.string());
}

nlohmann::json read_json(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) throw FieldError("cannot open " + path.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw FieldError(path.string() + ": " + e.what());
    }
}

nlohmann::json scenario_header(const SemiclassicalScenario& s)
{
    nlohmann::json j;
    j["format"] = kScenarioFormat;
    j["version"] = kFormatVersion;
    j["id"] = s.id;
    j["config_hash"] = s.config_hash;
    j["case"] = std::string(to_string(s.kind));
    j["constants"] = {{"hbar", s.constants.hbar}, {"mass", s.constants.mass}};
    j["grid"] = grid_to_json(s.grid);
    j["times"] = s.times;
    j["lambda"] = {{"times", std::vector<double>(s.lambda.times().begin(), s.lambda.times().end())},
                   {"values", std::vector<double>(s.lambda.values().begin(), s.lambda.values().end())}};
    j["E"] = s.energy;
    j["eps_node"] = s.eps_node;
    j["tolerances"] = {{"helmholtz", s.tolerances.helmholtz}, {"inhomogeneous", s.tolerances.inhomogeneous}};
    j["gauge_zeta"] = s.gauge_zeta;
    j["normalization"] = "box";
    j["mask_fraction"] = s.mask_fraction();
    j["fields"] = {{"R", "R"}, {"numerator", numerator_name(s)}, {"phase", phase_name(s)}, {"V", "V"}};
    return j;
}

void save_scenario(const fs::path& dir, const SemiclassicalScenario& s)
{
    fs::create_directories(dir);
    const bool st = s.stationary();
    for (std::size_t k = 0; k < s.slices(); ++k) {
        write_field(dir / slice_stem("R", k, st), s.amplitude[k]);
        write_field(dir / slice_stem(numerator_name(s), k, st), s.phase_numerator[k]);
        write_field(dir / slice_stem(phase_name(s), k, st), s.phase[k]);
        write_field(dir / slice_stem("V", k, st), s.potential[k]);
    }
    write_json(dir / "scenario.json", scenario_header(s));
}

SemiclassicalScenario load_scenario(const fs::path& dir)
{
    const fs::path header = dir / "scenario.json";
    if (!fs::exists(header)) throw FieldError("no scenario.json in " + dir.string());
    const nlohmann::json j = read_json(header);
    require_format(j, kScenarioFormat, header);
    try {
        const auto& jc = j.at("constants");
        SemiclassicalScenario s{
            .constants = PhysicalConstants(jc.at("hbar").get<double>(), jc.at("mass").get<double>()),
            .grid = grid_from_json(j.at("grid")),
            .kind = scenario_case_from_string(j.at("case").get<std::string>()),
            .times = j.at("times").get<std::vector<double>>(),
            .amplitude = {},
            .phase_numerator = {},
            .phase = {},
            .potential = {},
            .mask = {},
            .energy = j.at("E").get<double>(),
            .lambda = LambdaSchedule(j.at("lambda").at("times").get<std::vector<double>>(),
                                     j.at("lambda").at("values").get<std::vector<double>>()),
            .eps_node = j.at("eps_node").get<double>(),
            .tolerances = {j.at("tolerances").at("helmholtz").get<double>(),
                           j.at("tolerances").at("inhomogeneous").get<double>()},
            .gauge_zeta = j.value("gauge_zeta", std::vector<double>{}),
            .id = j.value("id", ""),
            .config_hash = j.value("config_hash", ""),
        };
        const bool st = s.stationary();
        const std::size_t n = s.times.size();
        if (n == 0 || (st && n != 1)) throw FieldError(header.string() + ": inconsistent slice count");
        for (std::size_t k = 0; k < n; ++k) {
            s.amplitude.push_back(read_scalar_field(dir / slice_stem("R", k, st)));
            s.phase_numerator.push_back(read_scalar_field(dir / slice_stem(numerator_name(s), k, st)));
            s.phase.push_back(read_scalar_field(dir / slice_stem(phase_name(s), k, st)));
            s.potential.push_back(read_scalar_field(dir / slice_stem("V", k, st)));
            require_same_grid(s.grid, s.amplitude.back().grid(), "load_scenario");
            require_same_grid(s.grid, s.phase_numerator.back().grid(), "load_scenario");
            require_same_grid(s.grid, s.phase.back().grid(), "load_scenario");
            require_same_grid(s.grid, s.potential.back().grid(), "load_scenario");
            s.mask.push_back(NodeMask::below(s.amplitude.back(), s.eps_node));
        }
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw FieldError(header.string() + ": " + e.what());
    }
}

void save_evolution(const fs::path& dir, const EvolutionResult& ev)
{
    fs::create_directories(dir);
    nlohmann::json j;
    j["format"] = kEvolutionFormat;
    j["version"] = kFormatVersion;
    j["scheme"] = ev.scheme;
    j["dt"] = ev.dt;
    j["driven"] = ev.driven;
    j["times"] = ev.times;
    j["norm_history"] = ev.norm_history;
    j["norm_drift_rate"] = ev.norm_drift_rate();
    for (std::size_t k = 0; k < ev.psi_history.size(); ++k) {
        write_field(dir / slice_stem("psi", k, false), ev.psi_history[k]);
    }
    write_json(dir / "evolution.json", j);
}

EvolutionResult load_evolution(const fs::path& dir)
{
    const fs::path header = dir / "evolution.json";
    if (!fs::exists(header)) throw FieldError("no evolution.json in " + dir.string());
    const nlohmann::json j = read_json(header);
    require_format(j, kEvolutionFormat, header);
    EvolutionResult ev;
    try {
        ev.scheme = j.at("scheme").get<std::string>();
        ev.dt = j.at("dt").get<double>();
        ev.driven = j.at("driven").get<bool>();
        ev.times = j.at("times").get<std::vector<double>>();
        ev.norm_history = j.at("norm_history").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw FieldError(header.string() + ": " + e.what());
    }
    for (std::size_t k = 0; k < ev.times.size(); ++k) {
        ev.psi_history.push_back(read_complex_field(dir / slice_stem("psi", k, false)));
    }
    return ev;
}

}  // namespace semiclassical::io
