#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "semiclassical/dynamics.hpp"
#include "semiclassical/helmholtz.hpp"
#include "semiclassical/potentials.hpp"

namespace semiclassical {

/// Scenario configuration document (JSON):
///
///   id          string, optional
///   grid        {dim?, extents, origin, spacing | upper, boundary}
///   constants   {hbar, mass}, optional (defaults 1, 1)
///   case        "stationary" | "time_dependent"
///   lambda      number                         (stationary, or constant schedule)
///   lambda_schedule {times, values | K}        (time_dependent)
///   E           number, stationary only
///   modes       {R: mode, S_tilde: mode}       stationary
///               {R: mode, phi_tilde: mode | "solve"}  time_dependent
///   eps_node    number >= 0 (0 selects the default)
///   tolerances  {helmholtz, inhomogeneous}
///   dynamics    {dt, T, snapshot_stride, particles: [{x0, v0?}],
///                random_particles: {count, lower, upper}}
///   gauge       {f: number | [samples] | "K" | "-K", T, samples}
///   compare     {tolerance, potential_tilt}
///   seed        unsigned integer
///
/// A mode is {kind, wavevectors, amplitudes, phases, center, slope,
/// amplitude_rates}; its lambda is the scenario's (lambda(t) when
/// time-dependent, with wavevectors rescaled to |k| = lambda(t) and
/// amplitudes a + rate * t). Unknown keys are rejected everywhere.
class ScenarioConfig {
public:
    explicit ScenarioConfig(nlohmann::json document);

    static ScenarioConfig load(const std::filesystem::path& path);
    /// `key.path=value`; value parsed as JSON when possible, else kept as a string.
    void apply_override(std::string_view assignment);

    const nlohmann::json& document() const noexcept { return doc_; }
    /// FNV-1a 64 of the canonical (sorted, compact) dump, as 16 hex digits.
    std::string hash() const;
    std::string id() const;

    Grid grid() const;
    PhysicalConstants constants() const;
    ScenarioCase scenario_case() const;
    LambdaSchedule lambda_schedule() const;
    std::uint64_t seed() const;

    /// Builds the scenario (Helmholtz checks run at construction).
    SemiclassicalScenario build() const;

    struct Dynamics {
        double dt = 1e-3;
        double T = 1.0;
        std::size_t snapshot_stride = 1;
        std::vector<Point3> x0;
        /// Classical velocity overrides per particle (guidance-matched when absent).
        std::vector<std::optional<Point3>> v0;
    };
    /// Explicit particles followed by seeded uniform placements.
    Dynamics dynamics() const;

    struct Compare {
        double tolerance = 1e-3;
        /// delta in V + delta * x_0, the broken-potential negative control.
        double potential_tilt = 0.0;
    };
    Compare compare() const;

    struct Gauge {
        /// "K", "-K", or explicit samples on the mesh.
        std::string kind = "samples";
        std::vector<double> f;
        double T = 1.0;
        std::size_t samples = 101;
    };
    std::optional<Gauge> gauge() const;

private:
    void validate() const;
    nlohmann::json doc_;
};

HelmholtzMode mode_from_json(const nlohmann::json& j, double lambda, double t = 0.0);
nlohmann::json mode_to_json(const HelmholtzMode& m);

/// FNV-1a 64-bit hash of a byte string, as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

}  // namespace semiclassical
