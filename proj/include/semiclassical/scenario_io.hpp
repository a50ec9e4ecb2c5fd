#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "semiclassical/dynamics.hpp"
#include "semiclassical/potentials.hpp"
#include "semiclassical/report.hpp"

namespace semiclassical::io {

/// Scenario directory: `scenario.json` (constants, case, lambda schedule, E,
/// eps_node, tolerances, gauge phase, provenance) plus one field payload per
/// slice for R, the phase numerator, the phase and V. Masks are recomputed
/// from R and eps_node on load.
void save_scenario(const std::filesystem::path& dir, const SemiclassicalScenario& s);
SemiclassicalScenario load_scenario(const std::filesystem::path& dir);
nlohmann::json scenario_header(const SemiclassicalScenario& s);

/// Evolution directory: `evolution.json` plus `psi_NNNN` complex payloads.
void save_evolution(const std::filesystem::path& dir, const EvolutionResult& ev);
EvolutionResult load_evolution(const std::filesystem::path& dir);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace semiclassical::io
