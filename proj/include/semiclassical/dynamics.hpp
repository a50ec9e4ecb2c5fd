#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "semiclassical/field.hpp"
#include "semiclassical/operators.hpp"
#include "semiclassical/potentials.hpp"
#include "semiclassical/report.hpp"

namespace semiclassical {

/// Potential sampled on a uniform time mesh, linear in time between slices.
/// A single slice is a static potential.
class PotentialSchedule {
public:
    explicit PotentialSchedule(ScalarField v);
    PotentialSchedule(std::vector<double> times, std::vector<ScalarField> slices);

    bool is_static() const noexcept { return slices_.size() == 1; }
    const Grid& grid() const { return slices_.front().grid(); }
    std::span<const double> times() const noexcept { return times_; }
    std::span<const ScalarField> slices() const noexcept { return slices_; }
    ScalarField at(double t) const;

    /// Bracketing slices and the weight of the upper one.
    struct Bracket {
        std::size_t lo, hi;
        double w;
    };
    Bracket bracket(double t) const;

private:
    std::vector<double> times_;
    std::vector<ScalarField> slices_;
};

/// Potential of a scenario with masked nodes filled from the nearest unmasked node.
PotentialSchedule potential_schedule(const SemiclassicalScenario& s);

/// Prescribed wavefunction value on a dirichlet boundary node at time t.
using BoundaryDrive = std::function<complex(std::size_t node, double t)>;

/// psi_b(t) = psi0_b exp(-i E t / hbar)
BoundaryDrive stationary_drive(const ComplexField& psi0, double E, double hbar);
/// Exact boundary data of a scenario: the stationary phase rotation, or R and
/// phi interpolated linearly in time between slices.
BoundaryDrive scenario_drive(const SemiclassicalScenario& s);

struct EvolutionOptions {
    double dt = 1e-3;
    double T = 1.0;
    std::size_t snapshot_stride = 1;
    /// Empty: homogeneous Dirichlet data (closed system, unitarity enforced).
    BoundaryDrive drive;
    /// Allowed |norm(t) - norm(0)| per unit time for closed systems.
    double unitarity_tolerance = 1e-10;
};

struct EvolutionResult {
    std::vector<double> times;  ///< snapshot times
    std::vector<ComplexField> psi_history;
    std::vector<double> norm_history;  ///< every step, t = k * dt
    double dt = 0.0;
    std::string scheme = "crank_nicolson";
    bool driven = false;

    /// max_t |norm(t) - norm(0)| / max(1, t)
    double norm_drift_rate() const;
};

/// Crank-Nicolson steps of i hbar dpsi/dt = -hbar^2/2m Laplacian psi + V psi,
/// with V sampled at half steps. Dirichlet grids evolve interior nodes and take
/// boundary values from options.drive (zero when unset); periodic grids wrap.
/// Throws UnitarityError for a closed system whose norm drifts past the bound.
EvolutionResult evolve_schrodinger(const ComplexField& psi0, const PotentialSchedule& V, const PhysicalConstants& c,
                                   const EvolutionOptions& options);

struct PolarDecomposition {
    ScalarField R;
    ScalarField phi;  ///< unwrapped, hbar * arg; zero on masked nodes
    NodeMask mask;
    std::size_t components = 0;
    bool disconnected = false;
};

/// R = |psi|, phi = hbar * arg(psi) unwrapped by flood fill from the largest
/// |psi| node of each connected unmasked component.
PolarDecomposition polar_decompose(const ComplexField& psi, const PhysicalConstants& c, double eps_node = -1.0);

struct VelocityField {
    VectorField v;
    NodeMask mask;
};

/// v = hbar Im(conj(psi) grad psi) / (m |psi|^2) on unmasked nodes.
VelocityField bohmian_velocity(const ComplexField& psi, const PhysicalConstants& c, double eps_node = -1.0);

/// Multilinear interpolation support on a grid cell.
struct CellWeights {
    std::array<std::size_t, 8> nodes{};
    std::array<double, 8> weights{};
    int count = 0;
};

/// Cell containing x, or nullopt outside a dirichlet box. Periodic grids wrap.
std::optional<CellWeights> locate(const Grid& g, const Point3& x);
double interpolate(std::span<const double> values, const CellWeights& cell);

enum class PathStatus { ok, escaped, masked };
std::string_view to_string(PathStatus s);

struct InitialCondition {
    Point3 position{0, 0, 0};
    Point3 velocity{0, 0, 0};
};

enum class TrajectoryKind { classical, bohmian };

/// Particle paths on a shared uniform time mesh. A truncated path is shorter
/// than `times` and carries the reason in `status`.
struct TrajectorySet {
    TrajectoryKind kind = TrajectoryKind::classical;
    int dim = 1;
    std::vector<InitialCondition> initial;
    std::vector<double> times;
    std::vector<std::vector<Point3>> paths;
    std::vector<PathStatus> status;

    std::size_t particles() const noexcept { return paths.size(); }
};

/// Classical initial velocities equal to the Bohmian velocity at t = 0.
std::vector<InitialCondition> guidance_matched_conditions(const ComplexField& psi0, std::span<const Point3> x0,
                                                          const PhysicalConstants& c, double eps_node = -1.0);

/// RK4 on dx/dt = v(x, t) with multilinear interpolation in space and linear
/// interpolation between stored snapshots.
TrajectorySet integrate_bohmian(const EvolutionResult& evolution, std::span<const Point3> x0,
                                const PhysicalConstants& c, double eps_node = -1.0);

/// RK4 on m x'' = -grad V with the force interpolated from gradient(V).
/// Paths whose cell touches a masked node are truncated.
TrajectorySet integrate_classical(const PotentialSchedule& V, const PhysicalConstants& c,
                                  std::span<const InitialCondition> ic, double dt, double T,
                                  const NodeMask* mask = nullptr);

struct TrajectoryComparison {
    std::vector<double> sup_deviation;
    std::vector<double> mean_deviation;
    double max_deviation = 0.0;
    std::size_t truncated = 0;
};

TrajectoryComparison measure_deviation(const TrajectorySet& a, const TrajectorySet& b);
/// "trajectory_deviation": max over particles of sup_t |a(t) - b(t)|.
ReportEntry compare_trajectories(const TrajectorySet& a, const TrajectorySet& b, double tolerance);

/// psi'(t) = exp(i zeta(t)) psi(t) for every snapshot.
EvolutionResult gauge_shift(const EvolutionResult& evolution, const GaugeShift& shift);
/// V'(t) = V(t) + f(t) on the shift's mesh.
PotentialSchedule gauge_shift(const PotentialSchedule& V, const GaugeShift& shift);

namespace io {
/// Columns particle_id,t,x[,y,z],flag
void write_trajectories_csv(const std::filesystem::path& path, const TrajectorySet& set);
}  // namespace io

}  // namespace semiclassical
