#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "semiclassical/dynamics.hpp"
#include "semiclassical/potentials.hpp"
#include "semiclassical/report.hpp"

namespace semiclassical {

/// Log-log least squares of error against step size.
struct ConvergenceFit {
    std::vector<double> steps;
    std::vector<double> errors;
    double fitted_order = 0.0;
    double r_squared = 0.0;
    /// Every error at or below the exactness floor: the discretisation
    /// reproduces the quantity and no order is defined.
    bool exact = false;
    /// Errors do not decrease monotonically with the step.
    bool flagged = false;
};

/// Needs at least 3 levels with strictly decreasing steps.
ConvergenceFit fit_convergence(std::span<const double> steps, std::span<const double> errors,
                               double exact_floor = 1e-12);

/// Pass iff the fit is exact or unflagged with order in [lo, hi].
ReportEntry convergence_entry(std::string name, const ConvergenceFit& fit, double lo, double hi);

// ---------------------------------------------------------------------------
// Raw measurements on a scenario (max over unmasked nodes and slices)

/// max |Q - K(t)|
double q_constancy_error(const SemiclassicalScenario& s);
/// max |dR^2/dt + div(R^2 grad phi) / m| away from the nodal set
double continuity_residual(const SemiclassicalScenario& s);
/// max |d phi/dt + |grad phi|^2/2m + V + Q|
double qhj_residual(const SemiclassicalScenario& s);
/// max |d phi/dt + |grad phi|^2/2m + V + K|, zero up to rounding for a
/// scenario built with the same discrete operators.
double qhj_assembly_residual(const SemiclassicalScenario& s);
/// max over axes of (max - min) of R^2 d_a S away from the nodal set.
double flux_variation(const SemiclassicalScenario& s);

/// Nodes whose central stencils reach the nodal set (mask dilated by `reach`
/// nodes along each axis).
NodeMask stencil_mask(const NodeMask& mask, const Grid& g, std::size_t reach = 1);
/// Dirichlet nodes within `width` of the boundary. Derivatives of fluxes there
/// mix one-sided closures with central stencils and lose an order.
NodeMask boundary_layer(const Grid& g, std::size_t width = 2);

/// Tolerance C h^2 with C measured on the scenario coarsened by two.
struct TwoGridBudget {
    double tolerance = 0.0;
    double constant = 0.0;
    double coarse_value = 0.0;
    bool available = false;
};

using ScenarioMeasure = double (*)(const SemiclassicalScenario&);
/// tolerance = max(coarse / 2, floor): the fine value is expected near coarse / 4.
TwoGridBudget two_grid_budget(const SemiclassicalScenario& s, ScenarioMeasure measure, double floor);

// ---------------------------------------------------------------------------
// Report entries

ReportEntry check_q_constancy(const SemiclassicalScenario& s);
/// continuity, qhj_residual and qhj_assembly entries.
std::vector<ReportEntry> check_madelung(const SemiclassicalScenario& s);
/// Continuity and QHJ residuals of a stored evolution, with the time
/// derivative taken across snapshots; the first and last snapshots are skipped.
std::vector<ReportEntry> check_madelung(const EvolutionResult& evolution, const PotentialSchedule& V,
                                        const PhysicalConstants& c, double tolerance, double eps_node = -1.0);
/// Helmholtz residual entries for R (every slice) and S~ (stationary) or the
/// inhomogeneous residual of phi~ (time-dependent), at the scenario tolerances.
std::vector<ReportEntry> check_helmholtz(const SemiclassicalScenario& s);
/// 1D: R^2 dS/dx is constant up to a C h^2 budget.
ReportEntry check_restricted_ansatz(const SemiclassicalScenario& s);

/// max over unmasked nodes and snapshots of | |Psi(t)| - |R| | (R may change sign).
double amplitude_drift(const EvolutionResult& evolution, const SemiclassicalScenario& s);

/// R, Q, V and phase-gradient entries comparing a scenario to its gauge
/// transform. When f = sign * K(t) on the whole mesh an extra entry checks
/// V' - sign * Q = V within the Q-constancy budget.
std::vector<ReportEntry> check_gauge(const SemiclassicalScenario& before, const SemiclassicalScenario& after,
                                     const GaugeShift& shift);

/// Bohmian velocities, Bohmian paths and classical paths before and after
/// the shift; all must agree to 1e-10.
std::vector<ReportEntry> check_gauge_motion(const EvolutionResult& evolution, const PotentialSchedule& V,
                                            const GaugeShift& shift, const PhysicalConstants& c,
                                            std::span<const Point3> x0, double eps_node = -1.0);

inline constexpr double kGaugeTolerance = 1e-12;
inline constexpr double kGaugeMotionTolerance = 1e-10;
inline constexpr double kAssemblyTolerance = 1e-12;

/// Every scenario-level check.
VerificationReport verify_scenario(const SemiclassicalScenario& s);

}  // namespace semiclassical
